#include "featcop/tensor_io.hpp"

#include "featcop/detail/binary.hpp"
#include "featcop/random.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace featcop {

namespace {

static_assert(std::numeric_limits<float>::is_iec559);

using detail::get_le;
using detail::put_le;

[[noreturn]] void fail(FormatErrorKind kind, const std::string& msg) {
    throw FormatError(kind, std::string(to_string(kind)) + ": " + msg);
}

std::uint64_t checked_product(const std::array<std::uint64_t, 4>& dims) {
    std::uint64_t total = 1;
    for (auto d : dims) {
        if (d != 0 && total > std::numeric_limits<std::uint64_t>::max() / d)
            fail(FormatErrorKind::BadShape, "element count overflows");
        total *= d;
    }
    return total;
}

}  // namespace

const char* to_string(FormatErrorKind kind) {
    switch (kind) {
        case FormatErrorKind::BadMagic: return "bad magic";
        case FormatErrorKind::VersionMismatch: return "version mismatch";
        case FormatErrorKind::UnsupportedDtype: return "unsupported dtype";
        case FormatErrorKind::BadShape: return "bad shape";
        case FormatErrorKind::TruncatedPayload: return "truncated payload";
        case FormatErrorKind::TrailingBytes: return "trailing bytes";
        case FormatErrorKind::Io: return "i/o error";
    }
    return "unknown";
}

FeatureTensor::FeatureTensor(TensorShape shape, std::vector<float> payload)
    : shape_(shape), payload_(std::move(payload)) {
    if (payload_.size() != shape_.element_count())
        throw std::invalid_argument("payload length does not match tensor dims");
}

float FeatureTensor::at(std::uint64_t image, std::uint64_t filter, std::uint64_t row,
                        std::uint64_t col) const {
    const auto& s = shape_;
    return payload_[((image * s.filters + filter) * s.rows + row) * s.cols + col];
}

FeatureTensor read_tensor(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4 || magic != kTensorMagic) fail(FormatErrorKind::BadMagic, "expected FCPG");

    std::uint32_t version = 0;
    if (!get_le(in, version)) fail(FormatErrorKind::TruncatedPayload, "header ends before version");
    if (version != kTensorVersion)
        fail(FormatErrorKind::VersionMismatch, "got version " + std::to_string(version));

    std::uint8_t dtype = 0, ndim = 0;
    if (!get_le(in, dtype) || !get_le(in, ndim))
        fail(FormatErrorKind::TruncatedPayload, "header ends before dtype/ndim");
    if (dtype != kDtypeF32) fail(FormatErrorKind::UnsupportedDtype, "dtype code " + std::to_string(dtype));
    if (ndim != 4) fail(FormatErrorKind::BadShape, "ndim must be 4, got " + std::to_string(ndim));

    std::array<std::uint64_t, 4> dims{};
    for (auto& d : dims)
        if (!get_le(in, d)) fail(FormatErrorKind::TruncatedPayload, "header ends inside dims");
    const std::uint64_t count = checked_product(dims);

    std::vector<float> payload;
    payload.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) {
        float v;
        if (!get_le(in, v))
            fail(FormatErrorKind::TruncatedPayload,
                 "expected " + std::to_string(count) + " values, got " + std::to_string(i));
        payload.push_back(v);
    }
    if (in.peek() != std::char_traits<char>::eof())
        fail(FormatErrorKind::TrailingBytes, "data after payload");

    return FeatureTensor(TensorShape{dims[0], dims[1], dims[2], dims[3]}, std::move(payload));
}

FeatureTensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(FormatErrorKind::Io, "cannot open " + path.string());
    return read_tensor(in);
}

void write_tensor(std::ostream& out, const FeatureTensor& tensor) {
    out.write(kTensorMagic.data(), kTensorMagic.size());
    put_le(out, kTensorVersion);
    put_le(out, kDtypeF32);
    put_le(out, std::uint8_t{4});
    const auto& s = tensor.shape();
    for (auto d : {s.images, s.filters, s.rows, s.cols}) put_le(out, d);
    for (float v : tensor.payload()) put_le(out, v);
    if (!out) fail(FormatErrorKind::Io, "write failed");
}

void write_tensor(const std::filesystem::path& path, const FeatureTensor& tensor) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(FormatErrorKind::Io, "cannot open " + path.string() + " for writing");
    write_tensor(out, tensor);
}

FeatureSample flatten_filter(const FeatureTensor& tensor, std::uint64_t filter, int layer) {
    const auto& s = tensor.shape();
    if (filter >= s.filters)
        throw std::out_of_range("filter " + std::to_string(filter) + " out of range [0, " +
                                std::to_string(s.filters) + ")");
    FeatureSample out;
    out.filter = static_cast<int>(filter);
    out.layer = layer;
    out.values.reserve(static_cast<std::size_t>(s.per_filter_count()));
    const std::uint64_t plane = s.rows * s.cols;
    const auto& data = tensor.payload();
    for (std::uint64_t img = 0; img < s.images; ++img) {
        const std::uint64_t base = (img * s.filters + filter) * plane;
        for (std::uint64_t k = 0; k < plane; ++k) out.values.push_back(data[base + k]);
    }
    return out;
}

SampleSpec zero_inflated(double zero_mass, SampleSpec inner) {
    if (!(zero_mass >= 0.0 && zero_mass <= 1.0))
        throw std::invalid_argument("zero mass must lie in [0, 1]");
    // Stacking wrappers composes the zero masses.
    inner.zero_mass = 1.0 - (1.0 - inner.zero_mass) * (1.0 - zero_mass);
    return inner;
}

namespace {

void validate(const SampleShape& shape) {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    };
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, UniformShape>) {
                require(s.lo >= 0.0 && s.hi > s.lo, "uniform requires 0 <= lo < hi");
            } else if constexpr (std::is_same_v<S, TruncatedGaussianShape>) {
                require(s.sd > 0.0 && std::isfinite(s.mean), "gaussian requires sd > 0");
                // Rejection sampler must accept with reasonable probability.
                require(s.mean / s.sd > -6.0, "gaussian mass above zero is negligible");
            } else if constexpr (std::is_same_v<S, ExponentialShape>) {
                require(s.rate > 0.0, "exponential requires rate > 0");
            } else if constexpr (std::is_same_v<S, GammaShape>) {
                require(s.shape > 0.0 && s.scale > 0.0, "gamma requires shape, scale > 0");
            } else {
                require(s.shape > 0.0 && s.scale > 0.0, "weibull requires shape, scale > 0");
            }
        },
        shape);
}

double draw(const SampleShape& shape, Rng& rng) {
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, UniformShape>) {
                return s.lo + (s.hi - s.lo) * uniform_open(rng);
            } else if constexpr (std::is_same_v<S, TruncatedGaussianShape>) {
                std::normal_distribution<double> normal(s.mean, s.sd);
                for (;;) {
                    const double v = normal(rng);
                    if (v >= 0.0) return v;
                }
            } else if constexpr (std::is_same_v<S, ExponentialShape>) {
                return -std::log(uniform_open(rng)) / s.rate;
            } else if constexpr (std::is_same_v<S, GammaShape>) {
                std::gamma_distribution<double> gamma(s.shape, s.scale);
                return gamma(rng);
            } else {
                return s.scale * std::pow(-std::log(uniform_open(rng)), 1.0 / s.shape);
            }
        },
        shape);
}

}  // namespace

FeatureSample synth_sample(const SampleSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    if (!(spec.zero_mass >= 0.0 && spec.zero_mass <= 1.0))
        throw std::invalid_argument("zero mass must lie in [0, 1]");
    validate(spec.shape);

    Rng rng(seed);
    FeatureSample out;
    out.values.resize(n);
    for (auto& v : out.values) {
        if (spec.zero_mass > 0.0 && uniform_open(rng) < spec.zero_mass) {
            v = 0.0;
        } else {
            v = draw(spec.shape, rng);
        }
    }
    return out;
}

}  // namespace featcop
