// Randomized checks of invariants over many small generated inputs.

#include "featcop/copula.hpp"
#include "featcop/gcf.hpp"
#include "featcop/histogram.hpp"
#include "featcop/moments.hpp"
#include "featcop/random.hpp"
#include "featcop/tensor_io.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

using namespace featcop;

namespace {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

CopulaMatrix random_copula(Rng& rng, std::size_t n, std::size_t dims) {
    std::vector<double> v(n * dims);
    // Skewed coordinates so the moments are far from the independent case.
    for (auto& x : v) x = std::pow(uniform_open(rng), 1.0 + 2.0 * uniform_open(rng)) * 2.0 - 1.0;
    for (auto& x : v) x = std::clamp(x, std::nextafter(-1.0, 0.0), std::nextafter(1.0, 0.0));
    return CopulaMatrix(n, dims, std::move(v));
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("tensor round trip over random shapes") {
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const TensorShape s{static_cast<std::uint64_t>(uniform_int(rng, 1, 4)), static_cast<std::uint64_t>(uniform_int(rng, 1, 5)),
                            static_cast<std::uint64_t>(uniform_int(rng, 1, 4)), static_cast<std::uint64_t>(uniform_int(rng, 1, 4))};
        std::vector<float> v(s.element_count());
        for (auto& x : v) {
            const auto bits = static_cast<std::uint32_t>(rng());
            std::memcpy(&x, &bits, 4);  // any bit pattern, NaNs included
        }
        const FeatureTensor t(s, v);
        std::stringstream ss;
        write_tensor(ss, t);
        const auto back = read_tensor(ss);
        CHECK(back.shape() == s);
        CHECK(std::memcmp(back.payload().data(), v.data(), v.size() * 4) == 0);
        const auto f = static_cast<std::uint64_t>(uniform_int(rng, 0, static_cast<int>(s.filters) - 1));
        const auto sample = flatten_filter(t, f);
        CHECK(sample.size() == s.images * s.rows * s.cols);
    }
}

TEST_CASE("copula coordinates are rank-invariant and inside the cube") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 400));
        const auto s = synth_sample(zero_inflated(0.5 * uniform_open(rng), {GammaShape{0.5 + uniform_open(rng), 1.0}}), n,
                                    rng());
        FeatureSample warped = s;
        for (auto& v : warped.values) v = v * v * v + 2.0 * v;  // increasing, keeps zeros at zero
        const auto seed = rng();
        const auto a = transform(fit_cdf(s, seed), s, seed);
        const auto b = transform(fit_cdf(warped, seed), warped, seed);
        CHECK(a == b);
        for (double y : a) {
            CHECK(y > -1.0);
            CHECK(y < 1.0);
        }
    }
}

TEST_CASE("moments merge over arbitrary splits") {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const auto dims = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        const int k = uniform_int(rng, 0, 6);
        const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 300));
        const auto m = random_copula(rng, n, dims);
        const auto fam = trial % 2 ? BasisFamily::FourierReal : BasisFamily::LegendreNormalized;
        const auto trunc = trial % 3 ? Truncation::TotalDegree : Truncation::TensorProduct;
        const BasisSpec b(fam, k);
        const auto idx = enumerate_indices(static_cast<int>(dims), k, trunc);
        const auto whole = accumulate(m, b, idx);
        const auto cut = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(n) - 1));
        const auto merged = merge(accumulate(m.slice(0, cut), b, idx), accumulate(m.slice(cut, n - cut), b, idx));
        for (std::size_t j = 0; j < idx.size(); ++j) CHECK(std::fabs(merged.values()[j] - whole.values()[j]) <= 1e-12);
        CHECK(index_count(static_cast<int>(dims), k, trunc) == idx.size());
    }
}

TEST_CASE("series estimates integrate to one in one dimension") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_copula(rng, static_cast<std::size_t>(uniform_int(rng, 1, 500)), 1);
        const int k = uniform_int(rng, 1, 16);
        for (auto fam : {BasisFamily::LegendreNormalized, BasisFamily::FourierReal}) {
            const auto est = DensityEstimate::from_moments(
                accumulate(m, BasisSpec(fam, k), enumerate_indices(1, k, Truncation::TensorProduct)));
            const double total = oracle::integrate([&](double y) { return est.raw(std::span<const double>(&y, 1)); });
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("gcd is a metric on moment tensors") {
    Rng rng(5);
    const BasisSpec b(BasisFamily::LegendreNormalized, 4);
    const auto idx = enumerate_indices(2, 4, Truncation::TensorProduct);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = accumulate(random_copula(rng, 100, 2), b, idx);
        const auto y = accumulate(random_copula(rng, 100, 2), b, idx);
        const auto z = accumulate(random_copula(rng, 100, 2), b, idx);
        CHECK(gcd(x, y).value >= 0.0);
        CHECK(gcd(x, y).value == doctest::Approx(gcd(y, x).value));
        CHECK(gcd(x, z).value <= gcd(x, y).value + gcd(y, z).value + 1e-12);
        CHECK(gci(x) == doctest::Approx(gcd(x, MomentTensor::empty(b, idx)).value));
    }
}

TEST_CASE("histograms conserve counts and integrate to one") {
    Rng rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        const auto dims = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        const int bins = uniform_int(rng, 2, 9);
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 500));
        const auto h = fit_hist(random_copula(rng, n, dims), bins);
        std::uint64_t total = 0;
        double mass = 0;
        for (std::size_t c = 0; c < h.counts().size(); ++c) {
            total += h.counts()[c];
            mass += h.cell_density(c) * h.cell_volume();
        }
        CHECK(total == n);
        CHECK(mass == doctest::Approx(1.0));
    }
}

TEST_CASE("basis orthonormality for random degree pairs") {
    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int s = uniform_int(rng, 0, 24), t = uniform_int(rng, 0, 24);
        for (auto fam : {BasisFamily::LegendreNormalized, BasisFamily::FourierReal}) {
            const BasisSpec b(fam, 24);
            const double ip = oracle::integrate([&](double y) { return eval_basis(b, s, y) * eval_basis(b, t, y); });
            CHECK(ip == doctest::Approx(s == t ? 1.0 : 0.0).epsilon(1e-9));
        }
    }
}

}
