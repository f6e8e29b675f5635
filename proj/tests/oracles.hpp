#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's numerical code.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

inline double integrate(const std::function<double(double)>& f, double a = -1.0, double b = 1.0) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

// Explicit Legendre polynomials up to degree 5.
inline double legendre_poly(int t, double y) {
    switch (t) {
        case 0: return 1.0;
        case 1: return y;
        case 2: return (3 * y * y - 1) / 2;
        case 3: return (5 * y * y * y - 3 * y) / 2;
        case 4: return (35 * std::pow(y, 4) - 30 * y * y + 3) / 8;
        case 5: return (63 * std::pow(y, 5) - 70 * y * y * y + 15 * y) / 8;
    }
    return NAN;
}

inline int sign_changes(const std::function<double(double)>& f, int points = 200001) {
    int changes = 0;
    double prev = 0.0;
    for (int i = 0; i < points; ++i) {
        const double v = f(-1.0 + 2.0 * (i + 0.5) / points);
        if (v == 0.0) continue;
        if (prev != 0.0 && (v > 0) != (prev > 0)) ++changes;
        prev = v;
    }
    return changes;
}

// Brute-force mid-rank: count below, plus half of the ties beyond the first.
inline double brute_rank(const std::vector<double>& ref, double x) {
    double below = 0, ties = 0;
    for (double r : ref) {
        if (r < x) ++below;
        if (r == x) ++ties;
    }
    const double rank = ties > 0 ? below + (ties + 1) / 2 : below;
    return std::max(rank, 0.5);
}

// Profile-likelihood Weibull MLE by dense grid search over the shape.
struct WeibullMle {
    double shape, scale;
};
inline WeibullMle weibull_grid_mle(const std::vector<double>& x, double lo = 0.2, double hi = 5.0,
                                   int steps = 20000) {
    double mean_log = 0;
    for (double v : x) mean_log += std::log(v);
    mean_log /= static_cast<double>(x.size());
    double best_ll = -INFINITY, best_k = lo;
    for (int i = 0; i <= steps; ++i) {
        const double k = lo + (hi - lo) * i / steps;
        double s = 0;
        for (double v : x) s += std::pow(v, k);
        s /= static_cast<double>(x.size());
        // log-likelihood per sample with lambda^k = mean(x^k)
        const double ll = std::log(k) - std::log(s) + (k - 1) * mean_log - 1.0;
        if (ll > best_ll) {
            best_ll = ll;
            best_k = k;
        }
    }
    double s = 0;
    for (double v : x) s += std::pow(v, best_k);
    return {best_k, std::pow(s / static_cast<double>(x.size()), 1.0 / best_k)};
}

// Hand-assembled tensor file bytes.
inline std::string tensor_bytes(const std::vector<std::uint64_t>& dims, const std::vector<float>& values,
                                const char* magic = "FCPG", std::uint32_t version = 1, std::uint8_t dtype = 0) {
    std::string s(magic, 4);
    auto put = [&](const void* p, std::size_t n) { s.append(static_cast<const char*>(p), n); };
    put(&version, 4);  // the test host is little-endian
    put(&dtype, 1);
    const auto ndim = static_cast<std::uint8_t>(dims.size());
    put(&ndim, 1);
    for (auto d : dims) put(&d, 8);
    for (float v : values) put(&v, 4);
    return s;
}

}  // namespace oracle
