#pragma once

#include "featcop/tensor_io.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace featcop {

/// Magnitude of the negative jitter that breaks ties among exact zeros.
inline constexpr double kZeroJitter = 1e-9;

/// Replaces every exact zero with a draw from (-kZeroJitter, 0). The i-th zero
/// always consumes the i-th draw of the seeded stream, so equal seeds give equal
/// jitter for equal zero patterns.
std::vector<double> jitter_zeros(std::span<const double> values, std::uint64_t seed);

/// Empirical CDF over a jittered training sample.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> sorted_reference);

    std::span<const double> reference() const noexcept { return reference_; }
    std::size_t size() const noexcept { return reference_.size(); }

    /// Mid-rank of x among the reference values, clamped below at 0.5.
    double rank(double x) const;

    /// 2 r / (n + 1) - 1, strictly inside (-1, 1).
    double operator()(double x) const;

private:
    std::vector<double> reference_;
};

EmpiricalCdf fit_cdf(const FeatureSample& train, std::uint64_t jitter_seed);

/// Maps x through the rescaled probability integral transform; zeros in x are
/// jittered with `jitter_seed` first.
std::vector<double> transform(const EmpiricalCdf& cdf, const FeatureSample& x,
                              std::uint64_t jitter_seed);

/// Row-major n x D matrix of copula coordinates, every entry in (-1, 1).
class CopulaMatrix {
public:
    CopulaMatrix() = default;
    CopulaMatrix(std::size_t rows, std::size_t dims, std::vector<double> values,
                 std::vector<std::string> column_ids = {});

    std::size_t rows() const noexcept { return rows_; }
    std::size_t dims() const noexcept { return dims_; }
    const std::vector<std::string>& column_ids() const noexcept { return column_ids_; }
    std::span<const double> values() const noexcept { return values_; }

    double operator()(std::size_t i, std::size_t d) const { return values_[i * dims_ + d]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * dims_, dims_}; }
    std::vector<double> column(std::size_t d) const;

    /// Rows [first, first + count) as a new matrix.
    CopulaMatrix slice(std::size_t first, std::size_t count) const;

private:
    std::size_t rows_ = 0;
    std::size_t dims_ = 0;
    std::vector<double> values_;
    std::vector<std::string> column_ids_;
};

/// Column d = transform(cdfs[d], samples[d], jitter_seeds[d]).
CopulaMatrix build_copula(std::span<const EmpiricalCdf> cdfs, std::span<const FeatureSample> samples,
                          std::span<const std::uint64_t> jitter_seeds);

/// Persists as a tensor with dims [n, D, 1, 1].
FeatureTensor copula_to_tensor(const CopulaMatrix& m);

/// Inverse of copula_to_tensor. Values that rounded onto +-1 in float storage are
/// nudged back inside the open interval.
CopulaMatrix copula_from_tensor(const FeatureTensor& t);

}  // namespace featcop
