#pragma once

#include "featcop/tensor_io.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace featcop {

enum class Family : std::uint8_t { Uniform, Gaussian, Exponential, Gamma, Weibull };

inline constexpr std::array<Family, 5> kAllFamilies{Family::Uniform, Family::Gaussian, Family::Exponential,
                                                    Family::Gamma, Family::Weibull};

std::string_view to_string(Family f);
Family parse_family(std::string_view name);

// Parameterizations:
//   uniform      (lo, hi)
//   gaussian     (mean, sd)       untruncated, on the whole real line
//   exponential  (rate, unused)
//   gamma        (shape, scale)
//   weibull      (shape, scale)
struct Distribution {
    Family family = Family::Exponential;
    std::array<double, 2> params{1.0, 0.0};

    static Distribution uniform(double lo, double hi) { return {Family::Uniform, {lo, hi}}; }
    static Distribution gaussian(double mean, double sd) { return {Family::Gaussian, {mean, sd}}; }
    static Distribution exponential(double rate) { return {Family::Exponential, {rate, 0.0}}; }
    static Distribution gamma(double shape, double scale) { return {Family::Gamma, {shape, scale}}; }
    static Distribution weibull(double shape, double scale) { return {Family::Weibull, {shape, scale}}; }

    /// Multiplicative scale parameter (rate is inverted for the exponential).
    double scale() const;
};

/// Throws std::invalid_argument for invalid parameters.
void validate(const Distribution& d);

double pdf(const Distribution& d, double x);
double log_pdf(const Distribution& d, double x);
double cdf(const Distribution& d, double x);

struct ZeroSplit {
    double p_zero = 0.0;
    FeatureSample positives;
};

/// Throws std::domain_error on a negative value.
ZeroSplit zero_split(const FeatureSample& x);

/// Geometric-cooling annealing schedule over mean negative log-likelihood.
struct AnnealSchedule {
    double initial_temperature = 1.0;
    double cooling = 0.95;
    int temperature_steps = 200;
    int proposals_per_step = 20;
    /// Proposal std in log/scale units at the initial temperature; shrinks with sqrt(T).
    double step_scale = 0.5;
};

/// Mean negative log-likelihood; +inf when a value falls outside the support.
double mean_nll(const Distribution& d, std::span<const double> data);

/// Method-of-moments starting point for the annealer.
Distribution moment_matched(Family family, std::span<const double> positives);

struct FitResult {
    Distribution dist;
    double objective = 0.0;          // mean NLL at return
    double initial_objective = 0.0;  // mean NLL at the moment-matched start
    std::size_t train_n = 0;
    int evaluations = 0;
};

/// Minimizes mean NLL by simulated annealing; deterministic given seed. A sample
/// of identical values gets a floored spread for uniform/gaussian and is rejected
/// (std::invalid_argument) for the positive-support families.
FitResult fit_sa(Family family, std::span<const double> positives, std::uint64_t seed,
                 const AnnealSchedule& schedule = {});

inline constexpr double kKlMassFloor = 1e-12;

/// Discrete KL(empirical || model) over `bins` equal-probability bins spanning
/// [min(test), max(test)]. Throws std::domain_error when the model assigns no mass
/// to the test support.
double kl_binned(std::span<const double> test, const std::function<double(double)>& model_cdf, int bins);
double kl_fit(const Distribution& d, std::span<const double> test_positives, int bins = 50);

struct MarginalModel {
    double p_zero = 0.0;
    FitResult fit;
};

struct FamilyFit {
    Family family = Family::Exponential;
    double mean_kl = 0.0;
    double sd_kl = 0.0;
    double lo = 0.0;  // mean - sd
    double hi = 0.0;  // mean + sd
    std::vector<double> per_round;
    Distribution last_fit;
};

struct FitReport {
    std::vector<FamilyFit> families;  // kAllFamilies order
    Family winner = Family::Exponential;
    double train_p_zero = 0.0;

    const FamilyFit& at(Family f) const;
};

struct FitOptions {
    int bins = 50;
    /// Values drawn (without replacement) from each of train/test positives per
    /// round; 0 uses the full samples every round.
    std::size_t subset_size = 0;
    AnnealSchedule schedule{};
    unsigned workers = 0;
};

/// Summarizes per-round KL values into mean and a +-1 sd interval.
FamilyFit summarize(Family family, std::vector<double> per_round);

FitReport fit_report(const FeatureSample& train, const FeatureSample& test, int rounds, std::uint64_t seed,
                     const FitOptions& options = {});

}  // namespace featcop
