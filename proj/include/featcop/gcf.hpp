#pragma once

#include "featcop/copula.hpp"
#include "featcop/histogram.hpp"
#include "featcop/moments.hpp"

#include <algorithm>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace featcop {

/// Lower clamp applied to density values; truncated series can go negative.
inline constexpr double kDensityFloor = 1e-8;

enum class EstimateKind { Gcf, Histogram };

/// Evaluatable copula density: a truncated orthogonal series built from a
/// moment tensor, or a histogram.
class DensityEstimate {
public:
    static DensityEstimate from_moments(MomentTensor moments, double floor = kDensityFloor);
    static DensityEstimate from_histogram(HistogramGrid grid, double floor = kDensityFloor);

    EstimateKind kind() const noexcept;
    std::size_t dims() const noexcept;
    double floor() const noexcept { return floor_; }

    /// Series or bin value without clamping. No domain checks.
    double raw(std::span<const double> y) const;
    double operator()(std::span<const double> y) const { return std::max(raw(y), floor_); }

private:
    DensityEstimate(std::variant<MomentTensor, HistogramGrid> model, double floor);

    std::variant<MomentTensor, HistogramGrid> model_;
    double floor_;
};

/// Checked evaluation: dimension must match and y must lie in the open cube.
double eval_density(const DensityEstimate& est, std::span<const double> y);

struct GcdReport {
    double value = 0.0;
    /// |mu_T - nu_T| for every non-constant index, in index order.
    std::vector<std::pair<MultiIndex, double>> contributions;

    /// Largest `k` contributions, descending; ties keep index order.
    std::vector<std::pair<MultiIndex, double>> top(std::size_t k) const;
};

GcdReport gcd(const MomentTensor& mu, const MomentTensor& nu);

/// L1 norm of the non-constant moments; rejects plot-only bases.
double gci(const MomentTensor& mu);
GcdReport gci_report(const MomentTensor& mu);

/// Density at cell centres of a resolution x resolution grid over (-1, 1)^2.
struct DensityGrid {
    int resolution = 0;
    std::vector<double> centers;  // shared by both axes
    std::vector<double> values;   // values[i * resolution + j] at (centers[i], centers[j])

    double at(int i, int j) const { return values[static_cast<std::size_t>(i * resolution + j)]; }
};

/// `clamped = false` reports the raw series values.
DensityGrid density_grid(const DensityEstimate& est, int resolution, bool clamped = true);

/// -(1/n) sum log(max(c(y_i), floor)), natural log.
double cross_entropy(const DensityEstimate& est, const CopulaMatrix& test);

}  // namespace featcop
