#include "featcop/copula.hpp"

#include "featcop/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace featcop {

std::vector<double> jitter_zeros(std::span<const double> values, std::uint64_t seed) {
    std::vector<double> out(values.begin(), values.end());
    Rng rng(seed);
    for (auto& v : out)
        if (v == 0.0) v = -kZeroJitter * uniform_open(rng);
    return out;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> sorted_reference)
    : reference_(std::move(sorted_reference)) {
    if (reference_.empty()) throw std::invalid_argument("empirical CDF needs at least one value");
    if (!std::is_sorted(reference_.begin(), reference_.end()))
        throw std::invalid_argument("reference values must be non-decreasing");
}

double EmpiricalCdf::rank(double x) const {
    const auto lo = std::lower_bound(reference_.begin(), reference_.end(), x);
    const auto hi = std::upper_bound(lo, reference_.end(), x);
    const auto below = static_cast<double>(lo - reference_.begin());
    const auto ties = static_cast<double>(hi - lo);
    const double r = ties > 0 ? below + (ties + 1.0) / 2.0 : below;
    return std::max(r, 0.5);
}

double EmpiricalCdf::operator()(double x) const {
    return 2.0 * rank(x) / (static_cast<double>(reference_.size()) + 1.0) - 1.0;
}

EmpiricalCdf fit_cdf(const FeatureSample& train, std::uint64_t jitter_seed) {
    if (train.values.empty()) throw std::invalid_argument("cannot fit a CDF to an empty sample");
    auto ref = jitter_zeros(train.values, jitter_seed);
    std::sort(ref.begin(), ref.end());
    return EmpiricalCdf(std::move(ref));
}

std::vector<double> transform(const EmpiricalCdf& cdf, const FeatureSample& x,
                              std::uint64_t jitter_seed) {
    if (x.values.empty()) throw std::invalid_argument("cannot transform an empty sample");
    auto out = jitter_zeros(x.values, jitter_seed);
    for (auto& v : out) v = cdf(v);
    return out;
}

CopulaMatrix::CopulaMatrix(std::size_t rows, std::size_t dims, std::vector<double> values,
                           std::vector<std::string> column_ids)
    : rows_(rows), dims_(dims), values_(std::move(values)), column_ids_(std::move(column_ids)) {
    if (dims_ == 0) throw std::invalid_argument("copula matrix needs at least one column");
    if (values_.size() != rows_ * dims_) throw std::invalid_argument("copula matrix size mismatch");
    if (column_ids_.empty()) {
        for (std::size_t d = 0; d < dims_; ++d) column_ids_.push_back(std::to_string(d));
    } else if (column_ids_.size() != dims_) {
        throw std::invalid_argument("one column id per dimension required");
    }
    for (double v : values_)
        if (!(v > -1.0 && v < 1.0)) throw std::domain_error("copula value outside (-1, 1)");
}

std::vector<double> CopulaMatrix::column(std::size_t d) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, d);
    return out;
}

CopulaMatrix CopulaMatrix::slice(std::size_t first, std::size_t count) const {
    if (first + count > rows_) throw std::out_of_range("row slice out of range");
    std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(first * dims_),
                          values_.begin() + static_cast<std::ptrdiff_t>((first + count) * dims_));
    return CopulaMatrix(count, dims_, std::move(v), column_ids_);
}

CopulaMatrix build_copula(std::span<const EmpiricalCdf> cdfs, std::span<const FeatureSample> samples,
                          std::span<const std::uint64_t> jitter_seeds) {
    if (samples.empty()) throw std::invalid_argument("no samples");
    if (cdfs.size() != samples.size() || jitter_seeds.size() != samples.size())
        throw std::invalid_argument("one CDF and one jitter seed per sample required");
    const std::size_t n = samples.front().size();
    for (const auto& s : samples)
        if (s.size() != n) throw std::invalid_argument("samples must have equal length");

    const std::size_t dims = samples.size();
    std::vector<double> values(n * dims);
    std::vector<std::string> ids;
    for (std::size_t d = 0; d < dims; ++d) {
        const auto col = transform(cdfs[d], samples[d], jitter_seeds[d]);
        for (std::size_t i = 0; i < n; ++i) values[i * dims + d] = col[i];
        ids.push_back("L" + std::to_string(samples[d].layer) + "F" + std::to_string(samples[d].filter));
    }
    return CopulaMatrix(n, dims, std::move(values), std::move(ids));
}

FeatureTensor copula_to_tensor(const CopulaMatrix& m) {
    const auto v = m.values();
    std::vector<float> payload(v.begin(), v.end());
    return FeatureTensor(TensorShape{m.rows(), m.dims(), 1, 1}, std::move(payload));
}

CopulaMatrix copula_from_tensor(const FeatureTensor& t) {
    const auto& s = t.shape();
    if (s.rows != 1 || s.cols != 1)
        throw std::invalid_argument("copula tensors have dims [n, D, 1, 1]");
    std::vector<double> values(t.payload().begin(), t.payload().end());
    for (auto& v : values) {
        if (v >= 1.0) v = std::nextafter(1.0, 0.0);
        if (v <= -1.0) v = std::nextafter(-1.0, 0.0);
    }
    return CopulaMatrix(s.images, s.filters, std::move(values));
}

}  // namespace featcop
