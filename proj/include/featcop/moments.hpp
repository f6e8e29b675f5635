#pragma once

#include "featcop/basis.hpp"
#include "featcop/copula.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace featcop {

/// Per-dimension basis degrees; all zeros is the constant moment.
using MultiIndex = std::vector<int>;

enum class Truncation : std::uint8_t {
    TensorProduct = 0,  // every degree in 0..K
    TotalDegree = 1,    // degree sum <= K
    Custom = 2,         // caller-supplied set, not serializable
};

std::string_view to_string(Truncation t);
Truncation parse_truncation(std::string_view name);

inline constexpr std::uint64_t kDefaultIndexCap = 1'000'000;

class IndexSetTooLarge : public std::length_error {
public:
    IndexSetTooLarge(std::uint64_t count, std::uint64_t cap);
    std::uint64_t count() const noexcept { return count_; }

private:
    std::uint64_t count_;
};

class IndexSet {
public:
    IndexSet(int dims, int max_degree, Truncation truncation, std::vector<MultiIndex> indices);

    int dims() const noexcept { return dims_; }
    int max_degree() const noexcept { return max_degree_; }
    Truncation truncation() const noexcept { return truncation_; }
    std::size_t size() const noexcept { return indices_.size(); }
    const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
    const std::vector<MultiIndex>& indices() const noexcept { return indices_; }

    /// Position of the all-zeros index, or size() if absent.
    std::size_t constant_position() const noexcept { return constant_; }

    bool operator==(const IndexSet& o) const {
        return dims_ == o.dims_ && max_degree_ == o.max_degree_ && indices_ == o.indices_;
    }

private:
    int dims_;
    int max_degree_;
    Truncation truncation_;
    std::vector<MultiIndex> indices_;
    std::size_t constant_;
};

/// Number of indices the truncation would produce (saturates at UINT64_MAX).
std::uint64_t index_count(int dims, int max_degree, Truncation truncation);

/// Lexicographic enumeration, last dimension fastest.
IndexSet enumerate_indices(int dims, int max_degree, Truncation truncation,
                           std::uint64_t cap = kDefaultIndexCap);

/// Sample moments mu_T = mean over rows of prod_d phi_{T_d}(y_d).
class MomentTensor {
public:
    MomentTensor(BasisSpec basis, IndexSet indices, std::vector<double> values, std::uint64_t n);

    /// n = 0 tensor; the identity of merge().
    static MomentTensor empty(BasisSpec basis, IndexSet indices);

    const BasisSpec& basis() const noexcept { return basis_; }
    const IndexSet& indices() const noexcept { return indices_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::uint64_t sample_count() const noexcept { return n_; }
    int dims() const noexcept { return indices_.dims(); }

    double at(const MultiIndex& index) const;

    bool compatible_with(const MomentTensor& o) const {
        return basis_ == o.basis_ && indices_ == o.indices_;
    }

private:
    BasisSpec basis_;
    IndexSet indices_;
    std::vector<double> values_;
    std::uint64_t n_;
};

MomentTensor accumulate(const CopulaMatrix& copula, const BasisSpec& basis, const IndexSet& indices);

/// Map-reduce accumulation over row blocks; `workers` = 0 picks hardware concurrency.
MomentTensor accumulate_blocked(const CopulaMatrix& copula, const BasisSpec& basis,
                                const IndexSet& indices, std::size_t block_rows,
                                unsigned workers = 0);

/// n-weighted mean of two compatible tensors.
MomentTensor merge(const MomentTensor& a, const MomentTensor& b);

// Binary record, little-endian:
//   "FCPM" | u32 version (=1) | u8 basis | u8 truncation | u32 D | u32 K | u64 n
//   | u64 count | f64 values[count] in index order
void write_moments(std::ostream& out, const MomentTensor& m);
void write_moments(const std::filesystem::path& path, const MomentTensor& m);
MomentTensor read_moments(std::istream& in);
MomentTensor read_moments(const std::filesystem::path& path);

}  // namespace featcop
