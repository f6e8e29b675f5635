#pragma once

#include "featcop/copula.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace featcop {

inline constexpr std::uint64_t kDefaultHistogramCellCap = std::uint64_t{1} << 26;

/// Dense D-dimensional histogram over (-1, 1)^D with B uniform bins per axis.
class HistogramGrid {
public:
    HistogramGrid(int dims, int bins, std::uint64_t cell_cap = kDefaultHistogramCellCap);

    int dims() const noexcept { return dims_; }
    int bins() const noexcept { return bins_; }
    std::uint64_t total() const noexcept { return n_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    double cell_volume() const noexcept { return cell_volume_; }

    /// Bin of a coordinate; a value on an interior boundary -1 + 2k/B goes to bin k.
    int bin_of(double y) const;
    std::size_t cell_of(std::span<const double> y) const;

    void add(std::span<const double> y);
    void add_counts(const HistogramGrid& other);

    /// count / (n * cell volume); zero for an empty grid.
    double density(std::span<const double> y) const;
    double cell_density(std::size_t cell) const;

    /// Merges adjacent bin pairs along every axis; requires even B.
    HistogramGrid coarsen() const;

private:
    int dims_;
    int bins_;
    double cell_volume_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t n_ = 0;
};

/// Throws std::length_error when B^D exceeds `cell_cap`.
HistogramGrid fit_hist(const CopulaMatrix& copula, int bins,
                       std::uint64_t cell_cap = kDefaultHistogramCellCap);

}  // namespace featcop
