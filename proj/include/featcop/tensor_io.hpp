#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace featcop {

// Binary feature tensor, layout [images, filters, rows, cols], row-major.
//
// On-disk record (all integers little-endian):
//   "FCPG" | u32 version (=1) | u8 dtype (=0, f32 LE) | u8 ndim (=4)
//   | ndim x u64 dims | payload f32[prod(dims)]
inline constexpr std::array<char, 4> kTensorMagic{'F', 'C', 'P', 'G'};
inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::uint8_t kDtypeF32 = 0;

enum class FormatErrorKind {
    BadMagic,
    VersionMismatch,
    UnsupportedDtype,
    BadShape,
    TruncatedPayload,
    TrailingBytes,
    Io,
};

const char* to_string(FormatErrorKind kind);

class FormatError : public std::runtime_error {
public:
    FormatError(FormatErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    FormatErrorKind kind() const noexcept { return kind_; }

private:
    FormatErrorKind kind_;
};

struct TensorShape {
    std::uint64_t images = 0;
    std::uint64_t filters = 0;
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;

    std::uint64_t element_count() const { return images * filters * rows * cols; }
    std::uint64_t per_filter_count() const { return images * rows * cols; }
    bool operator==(const TensorShape&) const = default;
};

class FeatureTensor {
public:
    FeatureTensor() = default;
    FeatureTensor(TensorShape shape, std::vector<float> payload);

    const TensorShape& shape() const noexcept { return shape_; }
    const std::vector<float>& payload() const noexcept { return payload_; }

    float at(std::uint64_t image, std::uint64_t filter, std::uint64_t row,
             std::uint64_t col) const;

private:
    TensorShape shape_;
    std::vector<float> payload_;
};

/// One filter's activations flattened over (image, row, col).
struct FeatureSample {
    int filter = 0;
    int layer = 0;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
};

FeatureTensor read_tensor(const std::filesystem::path& path);
FeatureTensor read_tensor(std::istream& in);
void write_tensor(const std::filesystem::path& path, const FeatureTensor& tensor);
void write_tensor(std::ostream& out, const FeatureTensor& tensor);

/// Extracts filter `filter` in (image, row, col) lexicographic order.
/// Throws std::out_of_range for a bad filter index.
FeatureSample flatten_filter(const FeatureTensor& tensor, std::uint64_t filter,
                             int layer = 0);

// Synthetic sample descriptors. Every shape has support on [0, inf).
struct UniformShape {
    double lo = 0.0;
    double hi = 1.0;
};
/// Gaussian truncated at zero (negative draws are rejected).
struct TruncatedGaussianShape {
    double mean = 0.0;
    double sd = 1.0;
};
struct ExponentialShape {
    double rate = 1.0;
};
struct GammaShape {
    double shape = 1.0;
    double scale = 1.0;
};
struct WeibullShape {
    double shape = 1.0;
    double scale = 1.0;
};

using SampleShape = std::variant<UniformShape, TruncatedGaussianShape, ExponentialShape,
                                 GammaShape, WeibullShape>;

struct SampleSpec {
    SampleShape shape;
    double zero_mass = 0.0;  // probability of an exact zero
};

SampleSpec zero_inflated(double zero_mass, SampleSpec inner);

/// Deterministic given `seed`. Throws std::invalid_argument on bad parameters.
FeatureSample synth_sample(const SampleSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace featcop
