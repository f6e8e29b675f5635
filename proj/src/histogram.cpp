#include "featcop/histogram.hpp"

#include <cmath>
#include <stdexcept>

namespace featcop {

HistogramGrid::HistogramGrid(int dims, int bins, std::uint64_t cell_cap) : dims_(dims), bins_(bins) {
    if (dims < 1) throw std::invalid_argument("histogram dimension must be >= 1");
    if (bins < 2) throw std::invalid_argument("histogram needs at least 2 bins per dimension");
    std::uint64_t cells = 1;
    for (int d = 0; d < dims; ++d) {
        if (cells > cell_cap / static_cast<std::uint64_t>(bins))
            throw std::length_error("histogram grid of " + std::to_string(bins) + "^" + std::to_string(dims) +
                                    " cells exceeds cap " + std::to_string(cell_cap));
        cells *= static_cast<std::uint64_t>(bins);
    }
    counts_.assign(static_cast<std::size_t>(cells), 0);
    cell_volume_ = std::pow(2.0 / bins, dims);
}

int HistogramGrid::bin_of(double y) const {
    const double scaled = (y + 1.0) * bins_ / 2.0;
    int k = static_cast<int>(std::floor(scaled));
    // floor can land one below an exact boundary after rounding in `scaled`.
    if (k + 1 < bins_ && -1.0 + 2.0 * (k + 1) / bins_ <= y) ++k;
    if (k > 0 && y < -1.0 + 2.0 * k / bins_) --k;
    if (k < 0) k = 0;
    if (k >= bins_) k = bins_ - 1;
    return k;
}

std::size_t HistogramGrid::cell_of(std::span<const double> y) const {
    if (y.size() != static_cast<std::size_t>(dims_)) throw std::invalid_argument("point dimension mismatch");
    std::size_t cell = 0;
    for (double v : y) cell = cell * static_cast<std::size_t>(bins_) + static_cast<std::size_t>(bin_of(v));
    return cell;
}

void HistogramGrid::add(std::span<const double> y) {
    ++counts_[cell_of(y)];
    ++n_;
}

void HistogramGrid::add_counts(const HistogramGrid& other) {
    if (other.dims_ != dims_ || other.bins_ != bins_) throw std::invalid_argument("histogram grids differ");
    for (std::size_t c = 0; c < counts_.size(); ++c) counts_[c] += other.counts_[c];
    n_ += other.n_;
}

double HistogramGrid::cell_density(std::size_t cell) const {
    if (n_ == 0) return 0.0;
    return static_cast<double>(counts_.at(cell)) / (static_cast<double>(n_) * cell_volume_);
}

double HistogramGrid::density(std::span<const double> y) const { return cell_density(cell_of(y)); }

HistogramGrid HistogramGrid::coarsen() const {
    if (bins_ % 2 != 0) throw std::invalid_argument("coarsening needs an even bin count");
    HistogramGrid out(dims_, bins_ / 2, counts_.size());
    const auto b = static_cast<std::size_t>(bins_);
    for (std::size_t cell = 0; cell < counts_.size(); ++cell) {
        std::size_t rest = cell, coarse = 0, scale = 1;
        for (int d = 0; d < dims_; ++d) {
            coarse += ((rest % b) / 2) * scale;
            rest /= b;
            scale *= b / 2;
        }
        out.counts_[coarse] += counts_[cell];
    }
    out.n_ = n_;
    return out;
}

HistogramGrid fit_hist(const CopulaMatrix& copula, int bins, std::uint64_t cell_cap) {
    HistogramGrid grid(static_cast<int>(copula.dims()), bins, cell_cap);
    for (std::size_t i = 0; i < copula.rows(); ++i) grid.add(copula.row(i));
    return grid;
}

}  // namespace featcop
