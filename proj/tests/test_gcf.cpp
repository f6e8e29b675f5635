#include "featcop/gcf.hpp"
#include "featcop/harness.hpp"
#include "featcop/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace featcop;

namespace {

CopulaMatrix uniform_copula(std::size_t n, std::size_t dims, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n * dims);
    for (auto& x : v) x = 2.0 * uniform_open(rng) - 1.0;
    return CopulaMatrix(n, dims, std::move(v));
}

CopulaMatrix comonotone_copula(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(2 * n);
    for (std::size_t i = 0; i < n; ++i) v[2 * i] = v[2 * i + 1] = 2.0 * uniform_open(rng) - 1.0;
    return CopulaMatrix(n, 2, std::move(v));
}

MomentTensor uniform_moments(BasisFamily fam, int dims, int k) {
    auto idx = enumerate_indices(dims, k, Truncation::TensorProduct);
    std::vector<double> v(idx.size(), 0.0);
    v[idx.constant_position()] = std::pow(std::sqrt(2.0) / 2, dims);
    return MomentTensor(BasisSpec(fam, k), std::move(idx), std::move(v), 1);
}

CopulaMatrix to_cube(const std::vector<double>& u, std::size_t dims) {
    std::vector<double> y(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) y[i] = 2.0 * u[i] - 1.0;
    return CopulaMatrix(u.size() / dims, dims, std::move(y));
}

}  // namespace

TEST_SUITE("gcf") {

TEST_CASE("exact uniform copula") {
    for (auto fam : {BasisFamily::LegendreNormalized, BasisFamily::FourierReal}) {
        const auto est = DensityEstimate::from_moments(uniform_moments(fam, 2, 4));
        const std::vector<double> y{0.3, -0.7};
        CHECK(est(y) == doctest::Approx(0.25).epsilon(1e-14));
        const auto grid = density_grid(est, 4);
        REQUIRE(grid.values.size() == 16);
        for (double v : grid.values) CHECK(v == doctest::Approx(0.25).epsilon(1e-14));
        const auto e4 = DensityEstimate::from_moments(uniform_moments(fam, 4, 2));
        CHECK(cross_entropy(e4, uniform_copula(100, 4, 1)) == doctest::Approx(std::log(16.0)).epsilon(1e-13));
    }
}

TEST_CASE("one-dimensional series") {
    const double m = 0.2;
    const MomentTensor mu(BasisSpec(BasisFamily::LegendreNormalized, 1), enumerate_indices(1, 1, Truncation::TensorProduct),
                          {std::sqrt(2.0) / 2, m}, 10);
    const auto est = DensityEstimate::from_moments(mu);
    for (double y : {-0.9, 0.0, 0.55}) {
        const std::vector<double> p{y};
        CHECK(est(p) == doctest::Approx(0.5 + m * std::sqrt(1.5) * y).epsilon(1e-14));
    }
}

TEST_CASE("normalization by quadrature") {
    SUBCASE("D=1") {
        Rng rng(4);
        std::vector<double> v(500);
        for (auto& x : v) x = std::tanh(3.0 * (uniform_open(rng) - 0.3));
        const CopulaMatrix m(500, 1, v);
        for (auto fam : {BasisFamily::LegendreNormalized, BasisFamily::FourierReal}) {
            const auto est = DensityEstimate::from_moments(
                accumulate(m, BasisSpec(fam, 12), enumerate_indices(1, 12, Truncation::TensorProduct)));
            const double total = oracle::integrate([&](double y) { return est.raw(std::span<const double>(&y, 1)); });
            CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("D=2") {
        const auto m = comonotone_copula(2000, 5);
        for (auto fam : {BasisFamily::LegendreNormalized, BasisFamily::FourierReal}) {
            const auto est = DensityEstimate::from_moments(
                accumulate(m, BasisSpec(fam, 6), enumerate_indices(2, 6, Truncation::TensorProduct)));
            const double total = oracle::integrate([&](double a) {
                return oracle::integrate([&](double b) {
                    const double y[2] = {a, b};
                    return est.raw(y);
                });
            });
            CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("grid sums integrate to one") {
    const auto m = comonotone_copula(5000, 6);
    const auto est = DensityEstimate::from_moments(accumulate(m, BasisSpec(BasisFamily::LegendreNormalized, 8),
                                                              enumerate_indices(2, 8, Truncation::TensorProduct)));
    const auto grid = density_grid(est, 128, false);
    double s = 0;
    for (double v : grid.values) s += v;
    CHECK(s * (2.0 / 128) * (2.0 / 128) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("clamping") {
    // Strongly concentrated data produce negative lobes in the truncated series.
    const auto m = comonotone_copula(5000, 7);
    const auto est = DensityEstimate::from_moments(accumulate(m, BasisSpec(BasisFamily::LegendreNormalized, 8),
                                                              enumerate_indices(2, 8, Truncation::TensorProduct)));
    const auto raw = density_grid(est, 32, false), clamped = density_grid(est, 32, true);
    CHECK(*std::min_element(raw.values.begin(), raw.values.end()) < 0.0);
    CHECK(*std::min_element(clamped.values.begin(), clamped.values.end()) == kDensityFloor);
}

TEST_CASE("gcd") {
    const BasisSpec b(BasisFamily::LegendreNormalized, 8);
    const auto idx = enumerate_indices(2, 8, Truncation::TensorProduct);
    const auto big = uniform_copula(200'000, 2, 8);
    const auto a = accumulate(big.slice(0, 100'000), b, idx), c = accumulate(big.slice(100'000, 100'000), b, idx);
    CHECK(gcd(a, a).value == 0.0);
    CHECK(gcd(a, c).value == doctest::Approx(gcd(c, a).value));
    CHECK(gcd(a, c).value <= 0.6);
    CHECK(gcd(a, c).contributions.size() == 80);
    const auto top = gcd(a, c).top(10);
    REQUIRE(top.size() == 10);
    for (std::size_t i = 1; i < top.size(); ++i) CHECK(top[i - 1].second >= top[i].second);
    CHECK_THROWS_AS(gcd(a, accumulate(big, BasisSpec(BasisFamily::FourierReal, 8), idx)), std::invalid_argument);
}

TEST_CASE("gci") {
    const BasisSpec leg(BasisFamily::LegendreNormalized, 8);
    const auto idx = enumerate_indices(2, 8, Truncation::TensorProduct);
    CHECK(gci(uniform_moments(BasisFamily::LegendreNormalized, 2, 8)) == 0.0);
    CHECK(gci(accumulate(uniform_copula(100'000, 2, 9), leg, idx)) <= 0.3);
    CHECK(gci(accumulate(comonotone_copula(100'000, 10), leg, idx)) >= 1.0);
    CHECK_THROWS_AS(gci(accumulate(uniform_copula(10, 2, 1), BasisSpec(BasisFamily::Chebyshev, 8), idx)),
                    std::invalid_argument);
}

TEST_CASE("plot-only bases cannot estimate") {
    const auto idx = enumerate_indices(2, 2, Truncation::TensorProduct);
    const auto mu = accumulate(uniform_copula(10, 2, 1), BasisSpec(BasisFamily::LegendreRaw, 2), idx);
    CHECK_THROWS_AS(DensityEstimate::from_moments(mu), std::invalid_argument);
}

TEST_CASE("checked evaluation") {
    const auto est = DensityEstimate::from_moments(uniform_moments(BasisFamily::FourierReal, 2, 2));
    const std::vector<double> in{0.0, 0.5}, edge{1.0, 0.0}, short_point{0.0};
    CHECK(eval_density(est, in) == doctest::Approx(0.25));
    CHECK_THROWS_AS(eval_density(est, edge), std::domain_error);
    CHECK_THROWS_AS(eval_density(est, short_point), std::invalid_argument);
    const auto e3 = DensityEstimate::from_moments(uniform_moments(BasisFamily::FourierReal, 3, 2));
    CHECK_THROWS_AS(density_grid(e3, 8), std::invalid_argument);
}

TEST_CASE("histogram estimates are clamped") {
    const CopulaMatrix m(2, 2, {0.1, 0.1, 0.2, 0.2});
    const auto est = DensityEstimate::from_histogram(fit_hist(m, 4));
    const std::vector<double> empty{-0.9, -0.9};
    CHECK(est(empty) == kDensityFloor);
    CHECK(est.kind() == EstimateKind::Histogram);
    CHECK_THROWS_AS(DensityEstimate::from_histogram(fit_hist(m, 4), 0.0), std::invalid_argument);
}

TEST_CASE("histogram overfits 4-D uniform data") {
    // The CoD mechanism in miniature: 6^4 cells from 10^4 points overfit.
    const auto tr = uniform_copula(10'000, 4, 21), te = uniform_copula(10'000, 4, 22);
    const auto hist = DensityEstimate::from_histogram(fit_hist(tr, 6));
    const auto gcf = DensityEstimate::from_moments(accumulate(tr, BasisSpec(BasisFamily::LegendreNormalized, 4),
                                                              enumerate_indices(4, 4, Truncation::TotalDegree)));
    CHECK(cross_entropy(hist, te) > cross_entropy(gcf, te));
}

// With rho = 0.8 the true density is unbounded towards the (+1,+1) and (-1,-1)
// corners, so the corner cells of any K = 8 series and a 64-bin histogram differ
// by far more than 0.15. Away from the corners they agree closely.
TEST_CASE("gaussian copula: series grid vs fine histogram, max cell error" * doctest::should_fail()) {
    CopulaDatasetSpec spec;
    spec.kind = CopulaKind::Gaussian;
    spec.rho = 0.8;
    spec.n = 200'000;
    const auto fit = to_cube(synth_copula_sample(spec, 1), 2);
    spec.n = 2'000'000;
    const auto ref = to_cube(synth_copula_sample(spec, 2), 2);
    const auto est = DensityEstimate::from_moments(accumulate(fit, BasisSpec(BasisFamily::LegendreNormalized, 8),
                                                              enumerate_indices(2, 8, Truncation::TensorProduct)));
    const auto series = density_grid(est, 64, false);
    const auto hist = fit_hist(ref, 64);
    double worst = 0;
    for (std::size_t c = 0; c < 64 * 64; ++c) worst = std::max(worst, std::fabs(series.values[c] - hist.cell_density(c)));
    CHECK(worst <= 0.15);
}

TEST_CASE("gaussian copula: series grid vs fine histogram, median cell error") {
    CopulaDatasetSpec spec;
    spec.kind = CopulaKind::Gaussian;
    spec.rho = 0.8;
    spec.n = 200'000;
    const auto fit = to_cube(synth_copula_sample(spec, 1), 2);
    spec.n = 2'000'000;
    const auto ref = to_cube(synth_copula_sample(spec, 2), 2);
    const auto est = DensityEstimate::from_moments(accumulate(fit, BasisSpec(BasisFamily::LegendreNormalized, 8),
                                                              enumerate_indices(2, 8, Truncation::TensorProduct)));
    const auto series = density_grid(est, 64, false);
    const auto hist = fit_hist(ref, 64);
    std::vector<double> err(64 * 64);
    for (std::size_t c = 0; c < err.size(); ++c) err[c] = std::fabs(series.values[c] - hist.cell_density(c));
    std::nth_element(err.begin(), err.begin() + err.size() / 2, err.end());
    CHECK(err[err.size() / 2] <= 0.05);
}

}
