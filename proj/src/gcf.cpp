#include "featcop/gcf.hpp"

#include "featcop/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace featcop {

DensityEstimate::DensityEstimate(std::variant<MomentTensor, HistogramGrid> model, double floor)
    : model_(std::move(model)), floor_(floor) {
    if (!(floor_ > 0.0)) throw std::invalid_argument("density floor must be positive");
}

DensityEstimate DensityEstimate::from_moments(MomentTensor moments, double floor) {
    if (!is_estimation_family(moments.basis().family))
        throw std::invalid_argument("density estimates need an orthonormal zero-integral basis, got " +
                                    std::string(to_string(moments.basis().family)));
    return DensityEstimate(std::move(moments), floor);
}

DensityEstimate DensityEstimate::from_histogram(HistogramGrid grid, double floor) {
    return DensityEstimate(std::move(grid), floor);
}

EstimateKind DensityEstimate::kind() const noexcept {
    return std::holds_alternative<MomentTensor>(model_) ? EstimateKind::Gcf : EstimateKind::Histogram;
}

std::size_t DensityEstimate::dims() const noexcept {
    if (const auto* m = std::get_if<MomentTensor>(&model_)) return static_cast<std::size_t>(m->dims());
    return static_cast<std::size_t>(std::get<HistogramGrid>(model_).dims());
}

double DensityEstimate::raw(std::span<const double> y) const {
    if (const auto* grid = std::get_if<HistogramGrid>(&model_)) return grid->density(y);

    const auto& m = std::get<MomentTensor>(model_);
    const auto dims = static_cast<std::size_t>(m.dims());
    const auto width = static_cast<std::size_t>(m.basis().max_degree) + 1;
    thread_local std::vector<double> scratch;
    scratch.resize(dims * width);
    for (std::size_t d = 0; d < dims; ++d)
        eval_basis_row(m.basis(), y[d], std::span<double>(scratch.data() + d * width, width));

    const auto& indices = m.indices();
    const auto& values = m.values();
    double sum = 0.0;
    for (std::size_t j = 0; j < indices.size(); ++j) {
        const auto& idx = indices[j];
        double p = values[j];
        for (std::size_t d = 0; d < dims; ++d) p *= scratch[d * width + static_cast<std::size_t>(idx[d])];
        sum += p;
    }
    return sum;
}

double eval_density(const DensityEstimate& est, std::span<const double> y) {
    if (y.size() != est.dims())
        throw std::invalid_argument("point has " + std::to_string(y.size()) + " coordinates, estimate has " +
                                    std::to_string(est.dims()));
    for (double v : y)
        if (!(v > -1.0 && v < 1.0)) throw std::domain_error("point outside the open cube (-1, 1)^D");
    return est(y);
}

std::vector<std::pair<MultiIndex, double>> GcdReport::top(std::size_t k) const {
    auto sorted = contributions;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (sorted.size() > k) sorted.resize(k);
    return sorted;
}

GcdReport gcd(const MomentTensor& mu, const MomentTensor& nu) {
    if (!mu.compatible_with(nu)) throw std::invalid_argument("gcd needs tensors of the same basis and index set");
    const auto& idx = mu.indices();
    GcdReport report;
    CompensatedSum total;
    for (std::size_t j = 0; j < idx.size(); ++j) {
        if (j == idx.constant_position()) continue;
        const double c = std::fabs(mu.values()[j] - nu.values()[j]);
        report.contributions.emplace_back(idx[j], c);
        total.add(c);
    }
    report.value = total.value();
    return report;
}

GcdReport gci_report(const MomentTensor& mu) {
    if (!is_estimation_family(mu.basis().family))
        throw std::invalid_argument("GCI requires a zero-integral basis; " +
                                    std::string(to_string(mu.basis().family)) + " is plot-only");
    return gcd(mu, MomentTensor::empty(mu.basis(), mu.indices()));
}

double gci(const MomentTensor& mu) { return gci_report(mu).value; }

DensityGrid density_grid(const DensityEstimate& est, int resolution, bool clamped) {
    if (est.dims() != 2) throw std::invalid_argument("density grids are only defined for D = 2");
    if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
    DensityGrid grid;
    grid.resolution = resolution;
    for (int i = 0; i < resolution; ++i) grid.centers.push_back(-1.0 + (2.0 * i + 1.0) / resolution);
    grid.values.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            const double y[2] = {grid.centers[static_cast<std::size_t>(i)], grid.centers[static_cast<std::size_t>(j)]};
            grid.values.push_back(clamped ? est(y) : est.raw(y));
        }
    }
    return grid;
}

double cross_entropy(const DensityEstimate& est, const CopulaMatrix& test) {
    if (test.rows() == 0) throw std::invalid_argument("cross entropy of an empty test set");
    if (test.dims() != est.dims()) throw std::invalid_argument("test columns differ from estimate dimension");
    CompensatedSum s;
    for (std::size_t i = 0; i < test.rows(); ++i) s.add(-std::log(est(test.row(i))));
    return s.value() / static_cast<double>(test.rows());
}

}  // namespace featcop
