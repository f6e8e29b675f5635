#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace featcop {

// Orthogonal function families on (-1, 1).
//
// LegendreNormalized and FourierReal are orthonormal, and every non-constant
// member integrates to zero; they are the estimation families. LegendreRaw and
// Chebyshev exist for comparison plots only.
enum class BasisFamily : std::uint8_t {
    LegendreNormalized = 0,
    FourierReal = 1,
    LegendreRaw = 2,
    Chebyshev = 3,
};

inline constexpr int kMaxBasisDegree = 64;

std::string_view to_string(BasisFamily family);
BasisFamily parse_basis_family(std::string_view name);

/// True for the families usable as density estimators.
constexpr bool is_estimation_family(BasisFamily f) {
    return f == BasisFamily::LegendreNormalized || f == BasisFamily::FourierReal;
}

struct BasisSpec {
    BasisFamily family = BasisFamily::LegendreNormalized;
    int max_degree = 8;

    BasisSpec() = default;
    BasisSpec(BasisFamily f, int k);

    bool operator==(const BasisSpec&) const = default;
};

/// P_t(y) by Bonnet's three-term recurrence.
double legendre_raw(int t, double y);

/// sqrt(2 / (2t + 1)), the L2 norm of P_t over (-1, 1).
double legendre_l2_norm(int t);

/// phi_t(y) for the given family. Throws std::out_of_range if t > spec.max_degree.
double eval_basis(const BasisSpec& spec, int t, double y);

/// Fills out[0..K] with phi_0(y)..phi_K(y) in one sweep. No range checks.
void eval_basis_row(const BasisSpec& spec, double y, std::span<double> out);

/// Row-major [samples x (K+1)] table of basis values.
class BasisTable {
public:
    BasisTable(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t i, std::size_t t) const { return data_[i * cols_ + t]; }
    double& operator()(std::size_t i, std::size_t t) { return data_[i * cols_ + t]; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

/// Throws std::domain_error if any y lies outside [-1, 1].
BasisTable basis_table(const BasisSpec& spec, std::span<const double> ys);

}  // namespace featcop
