#pragma once

#include "featcop/basis.hpp"
#include "featcop/gcf.hpp"
#include "featcop/marginal.hpp"
#include "featcop/moments.hpp"
#include "featcop/tensor_io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace featcop {

inline constexpr const char* kProtocolNote =
    "marginal CDFs are fitted on the training split and reused unchanged to transform the test split";

// ---------------------------------------------------------------------------
// Group-of-g cross-entropy comparison

struct GroupExperimentConfig {
    std::filesystem::path train_file;
    std::filesystem::path test_file;
    int layer = 0;
    int group_size = 4;
    int rounds = 30;
    // Unset options depend on the group size:
    //   max_degree  8 for groups of <= 2, 4 above
    //   truncation  tensor-product for groups of <= 2, total-degree above
    //   bins        16 per axis for groups of <= 2, 6 above
    std::optional<int> max_degree;
    std::optional<Truncation> truncation;
    std::optional<int> bins;
    std::vector<BasisFamily> bases{BasisFamily::LegendreNormalized, BasisFamily::FourierReal};
    bool histogram = true;
    double density_floor = kDensityFloor;
    std::uint64_t seed = 0;
    unsigned workers = 0;

    int effective_max_degree() const;
    Truncation effective_truncation() const;
    int effective_bins() const;
    void validate() const;
};

struct MethodSummary {
    std::string method;  // "legendre", "fourier", "histogram"
    double mean = 0.0;
    double sd = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> per_round;
    bool significantly_best = false;
};

struct ComparisonReport {
    GroupExperimentConfig config;
    std::size_t live_features = 0;
    std::size_t dead_features = 0;
    std::vector<std::vector<int>> groups;  // filter ids per round
    std::vector<MethodSummary> methods;
    std::string protocol = kProtocolNote;

    const MethodSummary& method(const std::string& name) const;
};

/// A method is significantly best when its +-1 sd interval lies strictly below
/// every other method's interval.
void mark_significance(std::vector<MethodSummary>& methods);

ComparisonReport run_group_experiment(const GroupExperimentConfig& cfg, const FeatureTensor& train,
                                      const FeatureTensor& test);
ComparisonReport run_group_experiment(const GroupExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Per-layer marginal fits and the nonzero table

struct MarginalExperimentConfig {
    std::vector<std::filesystem::path> train_files;  // one per layer
    std::vector<std::filesystem::path> test_files;   // empty: split each file's images in half
    int rounds = 30;
    int bins = 50;
    int features_per_round = 4;
    std::size_t max_values = 20000;  // positives per filter used for fitting / testing
    AnnealSchedule schedule{};
    std::uint64_t seed = 0;
    unsigned workers = 0;
};

struct NonzeroRow {
    int layer = 0;
    std::string source;
    std::size_t filters = 0;
    std::size_t dead_features = 0;
    double nonzero_percent = 0.0;
};

struct LayerMarginalReport {
    NonzeroRow nonzero;
    std::vector<FamilyFit> families;
    Family winner = Family::Exponential;
};

struct MarginalExperimentReport {
    std::vector<LayerMarginalReport> layers;
};

NonzeroRow nonzero_row(const FeatureTensor& t, int layer, std::string source = {});

MarginalExperimentReport run_marginal_experiment(const MarginalExperimentConfig& cfg,
                                                 const std::vector<FeatureTensor>& train,
                                                 const std::vector<FeatureTensor>& test);
MarginalExperimentReport run_marginal_experiment(const MarginalExperimentConfig& cfg);

/// Splits a tensor along the image axis: first half, second half.
std::pair<FeatureTensor, FeatureTensor> split_images(const FeatureTensor& t);

// ---------------------------------------------------------------------------
// Synthetic copula datasets

enum class CopulaKind { Independent, Gaussian, Comonotone, TailDependent };

std::string_view to_string(CopulaKind k);
CopulaKind parse_copula_kind(std::string_view name);

struct CopulaDatasetSpec {
    CopulaKind kind = CopulaKind::Independent;
    int dims = 2;
    std::size_t n = 10000;
    double rho = 0.5;             // gaussian: equicorrelation
    double tail_quantile = 0.02;  // tail-dependent: top fraction of column 0
    double tail_probability = 0.8;
    double tail_target = 0.10;    // top fraction of column 1 receiving forced rows
};

/// n x D sample with uniform (0, 1) marginals, as a double matrix (row-major).
std::vector<double> synth_copula_sample(const CopulaDatasetSpec& spec, std::uint64_t seed);

/// Two independent draws stored as feature tensors with dims [n, D, 1, 1].
std::pair<FeatureTensor, FeatureTensor> synth_copula_dataset(const CopulaDatasetSpec& spec, std::uint64_t seed);

/// Copula matrix of a tensor's filters under CDFs fitted to `train` itself.
CopulaMatrix self_copula(const FeatureTensor& train, std::uint64_t seed);

}  // namespace featcop
