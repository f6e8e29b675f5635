#include "featcop/moments.hpp"

#include "featcop/detail/binary.hpp"
#include "featcop/detail/parallel.hpp"
#include "featcop/numeric.hpp"
#include "featcop/tensor_io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>

namespace featcop {

using detail::get_le;
using detail::put_le;

std::string_view to_string(Truncation t) {
    switch (t) {
        case Truncation::TensorProduct: return "tensor-product";
        case Truncation::TotalDegree: return "total-degree";
        case Truncation::Custom: return "custom";
    }
    return "unknown";
}

Truncation parse_truncation(std::string_view name) {
    if (name == "tensor-product") return Truncation::TensorProduct;
    if (name == "total-degree") return Truncation::TotalDegree;
    throw std::invalid_argument("unknown truncation '" + std::string(name) + "'");
}

IndexSetTooLarge::IndexSetTooLarge(std::uint64_t count, std::uint64_t cap)
    : std::length_error("index set of " + std::to_string(count) + " moments exceeds cap " +
                        std::to_string(cap)),
      count_(count) {}

IndexSet::IndexSet(int dims, int max_degree, Truncation truncation, std::vector<MultiIndex> indices)
    : dims_(dims), max_degree_(max_degree), truncation_(truncation), indices_(std::move(indices)) {
    if (dims_ < 1) throw std::invalid_argument("index set dimension must be >= 1");
    if (max_degree_ < 0) throw std::invalid_argument("max degree must be >= 0");
    constant_ = indices_.size();
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        const auto& idx = indices_[i];
        if (idx.size() != static_cast<std::size_t>(dims_))
            throw std::invalid_argument("multi-index length differs from dimension");
        for (int t : idx)
            if (t < 0 || t > max_degree_) throw std::out_of_range("multi-index degree outside 0..K");
        if (std::all_of(idx.begin(), idx.end(), [](int t) { return t == 0; })) constant_ = i;
    }
}

std::uint64_t index_count(int dims, int max_degree, Truncation truncation) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    if (truncation == Truncation::TotalDegree) {
        // C(K + D, D), built incrementally so every partial value is an integer.
        std::uint64_t c = 1;
        for (int i = 1; i <= dims; ++i) {
            const auto num = static_cast<std::uint64_t>(max_degree + i);
            if (c > kMax / num) return kMax;
            c = c * num / static_cast<std::uint64_t>(i);
        }
        return c;
    }
    std::uint64_t c = 1;
    const auto base = static_cast<std::uint64_t>(max_degree + 1);
    for (int i = 0; i < dims; ++i) {
        if (c > kMax / base) return kMax;
        c *= base;
    }
    return c;
}

IndexSet enumerate_indices(int dims, int max_degree, Truncation truncation, std::uint64_t cap) {
    if (dims < 1) throw std::invalid_argument("dimension must be >= 1");
    if (max_degree < 0) throw std::invalid_argument("max degree must be >= 0");
    if (truncation == Truncation::Custom) throw std::invalid_argument("custom sets are not enumerable");
    const auto count = index_count(dims, max_degree, truncation);
    if (count > cap) throw IndexSetTooLarge(count, cap);

    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(count));
    MultiIndex cur(static_cast<std::size_t>(dims), 0);
    const auto d = static_cast<std::size_t>(dims);
    for (;;) {
        const int total = std::accumulate(cur.begin(), cur.end(), 0);
        if (truncation == Truncation::TensorProduct || total <= max_degree) out.push_back(cur);
        // Odometer increment, last position fastest.
        std::size_t pos = d;
        while (pos > 0) {
            --pos;
            if (cur[pos] < max_degree) {
                ++cur[pos];
                break;
            }
            cur[pos] = 0;
            if (pos == 0) return IndexSet(dims, max_degree, truncation, std::move(out));
        }
    }
}

MomentTensor::MomentTensor(BasisSpec basis, IndexSet indices, std::vector<double> values, std::uint64_t n)
    : basis_(basis), indices_(std::move(indices)), values_(std::move(values)), n_(n) {
    if (values_.size() != indices_.size()) throw std::invalid_argument("one value per index required");
    if (indices_.max_degree() > basis_.max_degree)
        throw std::out_of_range("index degree exceeds basis max degree");
}

MomentTensor MomentTensor::empty(BasisSpec basis, IndexSet indices) {
    const auto n = indices.size();
    return MomentTensor(basis, std::move(indices), std::vector<double>(n, 0.0), 0);
}

double MomentTensor::at(const MultiIndex& index) const {
    const auto& all = indices_.indices();
    const auto it = std::find(all.begin(), all.end(), index);
    if (it == all.end()) throw std::out_of_range("multi-index not in tensor");
    return values_[static_cast<std::size_t>(it - all.begin())];
}

MomentTensor accumulate(const CopulaMatrix& copula, const BasisSpec& basis, const IndexSet& indices) {
    if (copula.rows() == 0) throw std::invalid_argument("cannot accumulate moments of an empty matrix");
    if (copula.dims() != static_cast<std::size_t>(indices.dims()))
        throw std::invalid_argument("copula columns differ from index dimension");
    if (indices.max_degree() > basis.max_degree)
        throw std::out_of_range("index degree exceeds basis max degree");

    const std::size_t dims = copula.dims();
    const std::size_t width = static_cast<std::size_t>(basis.max_degree) + 1;
    const std::size_t m = indices.size();
    std::vector<double> phi(dims * width);
    std::vector<CompensatedSum> sums(m);

    for (std::size_t i = 0; i < copula.rows(); ++i) {
        const auto row = copula.row(i);
        for (std::size_t d = 0; d < dims; ++d)
            eval_basis_row(basis, row[d], std::span<double>(phi.data() + d * width, width));
        for (std::size_t j = 0; j < m; ++j) {
            const auto& idx = indices[j];
            double p = phi[static_cast<std::size_t>(idx[0])];
            for (std::size_t d = 1; d < dims; ++d) p *= phi[d * width + static_cast<std::size_t>(idx[d])];
            sums[j].add(p);
        }
    }

    std::vector<double> values(m);
    const auto n = static_cast<double>(copula.rows());
    for (std::size_t j = 0; j < m; ++j) values[j] = sums[j].value() / n;
    return MomentTensor(basis, indices, std::move(values), copula.rows());
}

MomentTensor accumulate_blocked(const CopulaMatrix& copula, const BasisSpec& basis,
                                const IndexSet& indices, std::size_t block_rows, unsigned workers) {
    if (block_rows == 0) throw std::invalid_argument("block size must be positive");
    if (copula.rows() == 0) throw std::invalid_argument("cannot accumulate moments of an empty matrix");

    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    for (std::size_t first = 0; first < copula.rows(); first += block_rows)
        blocks.emplace_back(first, std::min(block_rows, copula.rows() - first));

    std::vector<std::optional<MomentTensor>> partial(blocks.size());
    detail::parallel_for(
        blocks.size(),
        [&](std::size_t b) {
            partial[b] = accumulate(copula.slice(blocks[b].first, blocks[b].second), basis, indices);
        },
        workers);

    // Fixed merge order keeps the result independent of scheduling.
    MomentTensor total = std::move(*partial[0]);
    for (std::size_t b = 1; b < partial.size(); ++b) total = merge(total, *partial[b]);
    return total;
}

MomentTensor merge(const MomentTensor& a, const MomentTensor& b) {
    if (!a.compatible_with(b)) throw std::invalid_argument("cannot merge moment tensors of different specs");
    const std::uint64_t n = a.sample_count() + b.sample_count();
    if (n == 0) return a;
    const double wa = static_cast<double>(a.sample_count()) / static_cast<double>(n);
    const double wb = static_cast<double>(b.sample_count()) / static_cast<double>(n);
    std::vector<double> values(a.values().size());
    for (std::size_t j = 0; j < values.size(); ++j) values[j] = wa * a.values()[j] + wb * b.values()[j];
    return MomentTensor(a.basis(), a.indices(), std::move(values), n);
}

namespace {

constexpr std::array<char, 4> kMomentMagic{'F', 'C', 'P', 'M'};
constexpr std::uint32_t kMomentVersion = 1;

[[noreturn]] void moment_fail(FormatErrorKind kind, const std::string& msg) {
    throw FormatError(kind, std::string(to_string(kind)) + ": " + msg);
}

}  // namespace

void write_moments(std::ostream& out, const MomentTensor& m) {
    const auto& idx = m.indices();
    if (idx.truncation() == Truncation::Custom)
        throw std::invalid_argument("moment tensors over custom index sets are not serializable");
    if (idx.max_degree() != m.basis().max_degree)
        throw std::invalid_argument("serialized tensors must use the basis max degree for their index set");
    out.write(kMomentMagic.data(), kMomentMagic.size());
    put_le(out, kMomentVersion);
    put_le(out, static_cast<std::uint8_t>(m.basis().family));
    put_le(out, static_cast<std::uint8_t>(idx.truncation()));
    put_le(out, static_cast<std::uint32_t>(idx.dims()));
    put_le(out, static_cast<std::uint32_t>(idx.max_degree()));
    put_le(out, m.sample_count());
    put_le(out, static_cast<std::uint64_t>(m.values().size()));
    for (double v : m.values()) put_le(out, v);
    if (!out) moment_fail(FormatErrorKind::Io, "write failed");
}

void write_moments(const std::filesystem::path& path, const MomentTensor& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) moment_fail(FormatErrorKind::Io, "cannot open " + path.string() + " for writing");
    write_moments(out, m);
}

MomentTensor read_moments(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4 || magic != kMomentMagic) moment_fail(FormatErrorKind::BadMagic, "expected FCPM");
    std::uint32_t version = 0, dims = 0, k = 0;
    std::uint8_t family = 0, trunc = 0;
    std::uint64_t n = 0, count = 0;
    if (!get_le(in, version)) moment_fail(FormatErrorKind::TruncatedPayload, "header");
    if (version != kMomentVersion)
        moment_fail(FormatErrorKind::VersionMismatch, "got version " + std::to_string(version));
    if (!get_le(in, family) || !get_le(in, trunc) || !get_le(in, dims) || !get_le(in, k) ||
        !get_le(in, n) || !get_le(in, count))
        moment_fail(FormatErrorKind::TruncatedPayload, "header");
    if (family > 3 || trunc > 1) moment_fail(FormatErrorKind::BadShape, "unknown basis or truncation id");
    if (k > static_cast<std::uint32_t>(kMaxBasisDegree) || dims == 0)
        moment_fail(FormatErrorKind::BadShape, "bad dimension or degree");

    auto indices = enumerate_indices(static_cast<int>(dims), static_cast<int>(k),
                                     static_cast<Truncation>(trunc));
    if (indices.size() != count) moment_fail(FormatErrorKind::BadShape, "value count does not match index set");
    std::vector<double> values(static_cast<std::size_t>(count));
    for (auto& v : values)
        if (!get_le(in, v)) moment_fail(FormatErrorKind::TruncatedPayload, "values");
    if (in.peek() != std::char_traits<char>::eof()) moment_fail(FormatErrorKind::TrailingBytes, "data after values");
    return MomentTensor(BasisSpec(static_cast<BasisFamily>(family), static_cast<int>(k)), std::move(indices),
                        std::move(values), n);
}

MomentTensor read_moments(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) moment_fail(FormatErrorKind::Io, "cannot open " + path.string());
    return read_moments(in);
}

}  // namespace featcop
