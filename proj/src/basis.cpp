#include "featcop/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace featcop {

namespace {

constexpr double kHalfSqrt2 = std::numbers::sqrt2 / 2.0;

void check_degree(int t) {
    if (t < 0) throw std::out_of_range("basis degree must be non-negative");
}

}  // namespace

std::string_view to_string(BasisFamily family) {
    switch (family) {
        case BasisFamily::LegendreNormalized: return "legendre";
        case BasisFamily::FourierReal: return "fourier";
        case BasisFamily::LegendreRaw: return "legendre-raw";
        case BasisFamily::Chebyshev: return "chebyshev";
    }
    return "unknown";
}

BasisFamily parse_basis_family(std::string_view name) {
    for (auto f : {BasisFamily::LegendreNormalized, BasisFamily::FourierReal,
                   BasisFamily::LegendreRaw, BasisFamily::Chebyshev})
        if (name == to_string(f)) return f;
    throw std::invalid_argument("unknown basis family '" + std::string(name) + "'");
}

BasisSpec::BasisSpec(BasisFamily f, int k) : family(f), max_degree(k) {
    if (k < 0 || k > kMaxBasisDegree)
        throw std::out_of_range("max degree must lie in [0, " + std::to_string(kMaxBasisDegree) + "]");
}

double legendre_raw(int t, double y) {
    check_degree(t);
    if (t == 0) return 1.0;
    double prev = 1.0, cur = y;
    for (int n = 1; n < t; ++n) {
        const double next = ((2.0 * n + 1.0) * y * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double legendre_l2_norm(int t) {
    check_degree(t);
    return std::sqrt(2.0 / (2.0 * t + 1.0));
}

double eval_basis(const BasisSpec& spec, int t, double y) {
    if (t < 0 || t > spec.max_degree)
        throw std::out_of_range("degree " + std::to_string(t) + " outside [0, " +
                                std::to_string(spec.max_degree) + "]");
    switch (spec.family) {
        case BasisFamily::LegendreNormalized: return legendre_raw(t, y) / legendre_l2_norm(t);
        case BasisFamily::FourierReal:
            return t == 0 ? kHalfSqrt2 : std::cos(t * (std::numbers::pi / 2.0) * (y - 1.0));
        case BasisFamily::LegendreRaw: return legendre_raw(t, y);
        case BasisFamily::Chebyshev: return std::cos(t * std::acos(y));
    }
    return 0.0;
}

void eval_basis_row(const BasisSpec& spec, double y, std::span<double> out) {
    const int k = spec.max_degree;
    switch (spec.family) {
        case BasisFamily::LegendreRaw:
        case BasisFamily::LegendreNormalized: {
            out[0] = 1.0;
            if (k >= 1) out[1] = y;
            for (int n = 1; n < k; ++n)
                out[n + 1] = ((2.0 * n + 1.0) * y * out[n] - n * out[n - 1]) / (n + 1.0);
            if (spec.family == BasisFamily::LegendreNormalized)
                for (int n = 0; n <= k; ++n) out[n] *= std::sqrt((2.0 * n + 1.0) / 2.0);
            break;
        }
        case BasisFamily::FourierReal: {
            out[0] = kHalfSqrt2;
            const double theta = (std::numbers::pi / 2.0) * (y - 1.0);
            for (int n = 1; n <= k; ++n) out[n] = std::cos(n * theta);
            break;
        }
        case BasisFamily::Chebyshev: {
            out[0] = 1.0;
            if (k >= 1) out[1] = y;
            for (int n = 1; n < k; ++n) out[n + 1] = 2.0 * y * out[n] - out[n - 1];
            break;
        }
    }
}

BasisTable basis_table(const BasisSpec& spec, std::span<const double> ys) {
    const auto cols = static_cast<std::size_t>(spec.max_degree) + 1;
    BasisTable table(ys.size(), cols);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double y = ys[i];
        if (!(y >= -1.0 && y <= 1.0))
            throw std::domain_error("basis input " + std::to_string(y) + " outside [-1, 1]");
        eval_basis_row(spec, y, table.row(i));
    }
    return table;
}

}  // namespace featcop
