#include "featcop/moments.hpp"
#include "featcop/random.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace featcop;

namespace {

CopulaMatrix uniform_copula(std::size_t n, std::size_t dims, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n * dims);
    for (auto& x : v) x = 2.0 * uniform_open(rng) - 1.0;
    return CopulaMatrix(n, dims, std::move(v));
}

// Direct mean of products through the scalar basis path.
double brute_moment(const CopulaMatrix& m, const BasisSpec& b, const MultiIndex& t) {
    long double s = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        long double p = 1;
        for (std::size_t d = 0; d < m.dims(); ++d) p *= eval_basis(b, t[d], m(i, d));
        s += p;
    }
    return static_cast<double>(s / m.rows());
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("enumeration") {
    const auto tp = enumerate_indices(2, 1, Truncation::TensorProduct);
    CHECK(tp.indices() == std::vector<MultiIndex>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(enumerate_indices(2, 2, Truncation::TotalDegree).size() == 6);
    CHECK(enumerate_indices(4, 8, Truncation::TensorProduct).size() == 6561);
    CHECK(enumerate_indices(4, 4, Truncation::TotalDegree).size() == 70);
    CHECK(enumerate_indices(3, 2, Truncation::TotalDegree).indices() ==
          std::vector<MultiIndex>{{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 1, 0}, {0, 1, 1}, {0, 2, 0}, {1, 0, 0},
                                  {1, 0, 1}, {1, 1, 0}, {2, 0, 0}});
    CHECK(tp.constant_position() == 0);
}

TEST_CASE("index cap") {
    CHECK(index_count(8, 8, Truncation::TensorProduct) == 43'046'721);
    CHECK_THROWS_AS(enumerate_indices(8, 8, Truncation::TensorProduct), IndexSetTooLarge);
    CHECK_THROWS_AS(enumerate_indices(8, 8, Truncation::TensorProduct), std::length_error);
    CHECK(index_count(64, 64, Truncation::TensorProduct) == UINT64_MAX);
    CHECK_THROWS_AS(enumerate_indices(2, 2, Truncation::Custom), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_indices(0, 2, Truncation::TotalDegree), std::invalid_argument);
    CHECK(parse_truncation("total-degree") == Truncation::TotalDegree);
    CHECK_THROWS_AS(parse_truncation("sparse"), std::invalid_argument);
}

TEST_CASE("constant moment is 2^(-D/2)") {
    const auto m = uniform_copula(50, 2, 1);
    for (auto fam : {BasisFamily::LegendreNormalized, BasisFamily::FourierReal}) {
        const auto mu = accumulate(m, BasisSpec(fam, 3), enumerate_indices(2, 3, Truncation::TensorProduct));
        CHECK(mu.at({0, 0}) == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("P1 at zero") {
    const CopulaMatrix m(1, 1, {0.0});
    const auto mu = accumulate(m, BasisSpec(BasisFamily::LegendreNormalized, 1),
                               enumerate_indices(1, 1, Truncation::TensorProduct));
    CHECK(mu.at({1}) == 0.0);
    CHECK(mu.sample_count() == 1);
}

TEST_CASE("accumulate agrees with the scalar path") {
    const auto m = uniform_copula(300, 3, 2);
    const BasisSpec b(BasisFamily::FourierReal, 3);
    const auto idx = enumerate_indices(3, 3, Truncation::TotalDegree);
    const auto mu = accumulate(m, b, idx);
    for (std::size_t j = 0; j < idx.size(); ++j) CHECK(mu.values()[j] == doctest::Approx(brute_moment(m, b, idx[j])).epsilon(1e-12));
}

TEST_CASE("independent uniform moments are small") {
    const std::size_t n = 100'000;
    const auto m = uniform_copula(n, 2, 3);
    const auto mu = accumulate(m, BasisSpec(BasisFamily::LegendreNormalized, 8),
                               enumerate_indices(2, 8, Truncation::TensorProduct));
    for (std::size_t j = 1; j < mu.values().size(); ++j) CHECK(std::fabs(mu.values()[j]) <= 4.0 / std::sqrt(double(n)));
}

TEST_CASE("merge") {
    const auto m = uniform_copula(1001, 2, 4);
    const BasisSpec b(BasisFamily::LegendreNormalized, 6);
    const auto idx = enumerate_indices(2, 6, Truncation::TensorProduct);
    const auto whole = accumulate(m, b, idx);

    SUBCASE("identity") {
        const auto e = MomentTensor::empty(b, idx);
        CHECK(merge(whole, e).values() == whole.values());
        CHECK(merge(e, whole).values() == whole.values());
        CHECK(merge(e, whole).sample_count() == whole.sample_count());
    }
    SUBCASE("split halves") {
        const auto merged = merge(accumulate(m.slice(0, 400), b, idx), accumulate(m.slice(400, 601), b, idx));
        CHECK(merged.sample_count() == 1001);
        for (std::size_t j = 0; j < idx.size(); ++j) CHECK(std::fabs(merged.values()[j] - whole.values()[j]) <= 1e-12);
    }
    SUBCASE("blocked accumulation") {
        for (std::size_t block : {1u, 7u, 100u, 5000u}) {
            const auto blocked = accumulate_blocked(m, b, idx, block, 3);
            for (std::size_t j = 0; j < idx.size(); ++j) CHECK(std::fabs(blocked.values()[j] - whole.values()[j]) <= 1e-12);
        }
        CHECK(accumulate_blocked(m, b, idx, 64, 1).values() == accumulate_blocked(m, b, idx, 64, 4).values());
    }
    SUBCASE("incompatible") {
        const auto other = accumulate(m, BasisSpec(BasisFamily::FourierReal, 6), idx);
        CHECK_THROWS_AS(merge(whole, other), std::invalid_argument);
    }
}

TEST_CASE("validation") {
    const auto m = uniform_copula(10, 2, 5);
    CHECK_THROWS_AS(accumulate(m, BasisSpec(BasisFamily::LegendreNormalized, 2),
                               enumerate_indices(2, 3, Truncation::TensorProduct)),
                    std::out_of_range);
    CHECK_THROWS_AS(accumulate(m, BasisSpec(BasisFamily::LegendreNormalized, 2),
                               enumerate_indices(3, 2, Truncation::TensorProduct)),
                    std::invalid_argument);
    CHECK_THROWS_AS(IndexSet(2, 2, Truncation::Custom, {{0, 3}}), std::out_of_range);
    CHECK_THROWS_AS(IndexSet(2, 2, Truncation::Custom, {{0}}), std::invalid_argument);
    CHECK_THROWS_AS(MomentTensor(BasisSpec(BasisFamily::LegendreNormalized, 2),
                                 enumerate_indices(2, 2, Truncation::TensorProduct), {1.0}, 1),
                    std::invalid_argument);
}

TEST_CASE("binary record round trip") {
    const auto m = uniform_copula(200, 3, 6);
    const BasisSpec b(BasisFamily::FourierReal, 4);
    const auto mu = accumulate(m, b, enumerate_indices(3, 4, Truncation::TotalDegree));
    std::stringstream ss;
    write_moments(ss, mu);
    const std::string bytes = ss.str();
    CHECK(bytes.size() == 4 + 4 + 1 + 1 + 4 + 4 + 8 + 8 + 8 * mu.values().size());
    CHECK(bytes.substr(0, 4) == "FCPM");
    const auto back = read_moments(ss);
    CHECK(back.values() == mu.values());
    CHECK(back.sample_count() == 200);
    CHECK(back.compatible_with(mu));

    auto kind = [](std::string s) {
        std::istringstream in(s);
        try {
            read_moments(in);
        } catch (const FormatError& e) {
            return e.kind();
        }
        return FormatErrorKind::Io;
    };
    CHECK(kind("XXXX" + bytes.substr(4)) == FormatErrorKind::BadMagic);
    CHECK(kind(bytes.substr(0, bytes.size() - 3)) == FormatErrorKind::TruncatedPayload);
    CHECK(kind(bytes + "x") == FormatErrorKind::TrailingBytes);

    const IndexSet custom(3, 4, Truncation::Custom, {{0, 0, 0}, {1, 1, 1}});
    std::stringstream bad;
    CHECK_THROWS_AS(write_moments(bad, accumulate(m, b, custom)), std::invalid_argument);
}

}
