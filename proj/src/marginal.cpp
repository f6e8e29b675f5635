#include "featcop/marginal.hpp"

#include "featcop/detail/parallel.hpp"
#include "featcop/numeric.hpp"
#include "featcop/random.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace featcop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sigma_floor(double location) { return std::max(1e-6 * std::fabs(location), 1e-12); }

/// Cached summary statistics so each annealing step costs O(1), except the
/// Weibull likelihood which needs a pass over log(x).
class Likelihood {
public:
    explicit Likelihood(std::span<const double> data) {
        if (data.empty()) throw std::invalid_argument("likelihood of an empty sample");
        n_ = static_cast<double>(data.size());
        min_ = *std::min_element(data.begin(), data.end());
        max_ = *std::max_element(data.begin(), data.end());
        mean_ = featcop::mean(data);
        CompensatedSum sq;
        for (double x : data) sq.add((x - mean_) * (x - mean_));
        var_ = sq.value() / n_;
        if (min_ > 0.0) {
            log_x_.reserve(data.size());
            CompensatedSum sl;
            for (double x : data) {
                log_x_.push_back(std::log(x));
                sl.add(log_x_.back());
            }
            mean_log_ = sl.value() / n_;
        }
    }

    double operator()(const Distribution& d) const {
        const double a = d.params[0], b = d.params[1];
        switch (d.family) {
            case Family::Uniform:
                if (!(b > a) || a > min_ || b < max_) return kInf;
                return std::log(b - a);
            case Family::Gaussian:
                if (!(b > 0.0)) return kInf;
                return 0.5 * std::log(2.0 * std::numbers::pi * b * b) +
                       (var_ + (mean_ - a) * (mean_ - a)) / (2.0 * b * b);
            case Family::Exponential:
                if (!(a > 0.0) || min_ <= 0.0) return kInf;
                return -std::log(a) + a * mean_;
            case Family::Gamma:
                if (!(a > 0.0 && b > 0.0) || min_ <= 0.0) return kInf;
                return std::lgamma(a) + a * std::log(b) - (a - 1.0) * mean_log_ + mean_ / b;
            case Family::Weibull: {
                if (!(a > 0.0 && b > 0.0) || min_ <= 0.0) return kInf;
                const double log_scale = std::log(b);
                CompensatedSum s;
                for (double lx : log_x_) s.add(std::exp(a * (lx - log_scale)));
                return -std::log(a) + a * log_scale - (a - 1.0) * mean_log_ + s.value() / n_;
            }
        }
        return kInf;
    }

    double mean() const { return mean_; }
    double sd() const { return std::sqrt(var_); }
    double min() const { return min_; }
    double max() const { return max_; }

private:
    double n_ = 0.0, min_ = 0.0, max_ = 0.0, mean_ = 0.0, var_ = 0.0, mean_log_ = 0.0;
    std::vector<double> log_x_;
};

// Unconstrained coordinates the annealer walks in.
std::array<double, 2> to_internal(const Distribution& d) {
    const double a = d.params[0], b = d.params[1];
    switch (d.family) {
        case Family::Uniform: return {a, std::log(b - a)};
        case Family::Gaussian: return {a, std::log(b)};
        case Family::Exponential: return {std::log(a), 0.0};
        case Family::Gamma:
        case Family::Weibull: return {std::log(a), std::log(b)};
    }
    return {};
}

Distribution from_internal(Family f, const std::array<double, 2>& v) {
    switch (f) {
        case Family::Uniform: return Distribution::uniform(v[0], v[0] + std::exp(v[1]));
        case Family::Gaussian: return Distribution::gaussian(v[0], std::exp(v[1]));
        case Family::Exponential: return Distribution::exponential(std::exp(v[0]));
        case Family::Gamma: return Distribution::gamma(std::exp(v[0]), std::exp(v[1]));
        case Family::Weibull: return Distribution::weibull(std::exp(v[0]), std::exp(v[1]));
    }
    return {};
}

int free_parameters(Family f) { return f == Family::Exponential ? 1 : 2; }

// Location coordinates move in units of the current spread.
double coordinate_scale(Family f, int coord, const std::array<double, 2>& v) {
    if (coord == 0 && (f == Family::Uniform || f == Family::Gaussian)) return std::exp(v[1]);
    return 1.0;
}

double weibull_shape_for_cv(double cv) {
    // CV^2 + 1 = Gamma(1 + 2/k) / Gamma(1 + 1/k)^2 is decreasing in k.
    auto excess = [cv](double k) {
        return std::exp(std::lgamma(1.0 + 2.0 / k) - 2.0 * std::lgamma(1.0 + 1.0 / k)) - 1.0 - cv * cv;
    };
    double lo = std::log(0.05), hi = std::log(100.0);
    if (excess(std::exp(lo)) < 0.0) return std::exp(lo);
    if (excess(std::exp(hi)) > 0.0) return std::exp(hi);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(std::exp(mid)) > 0.0 ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

Distribution moment_matched(Family family, const Likelihood& lik) {
    const double m = lik.mean();
    const double sd = std::max(lik.sd(), sigma_floor(m));
    switch (family) {
        case Family::Uniform: {
            const double half = std::sqrt(3.0) * sd;
            return Distribution::uniform(std::min(m - half, lik.min()), std::max(m + half, lik.max()));
        }
        case Family::Gaussian: return Distribution::gaussian(m, sd);
        case Family::Exponential: return Distribution::exponential(1.0 / m);
        case Family::Gamma: return Distribution::gamma(m * m / (sd * sd), sd * sd / m);
        case Family::Weibull: {
            const double k = weibull_shape_for_cv(sd / m);
            return Distribution::weibull(k, m / std::exp(std::lgamma(1.0 + 1.0 / k)));
        }
    }
    return {};
}

bool positive_support(Family f) {
    return f == Family::Exponential || f == Family::Gamma || f == Family::Weibull;
}

}  // namespace

std::string_view to_string(Family f) {
    switch (f) {
        case Family::Uniform: return "uniform";
        case Family::Gaussian: return "gaussian";
        case Family::Exponential: return "exponential";
        case Family::Gamma: return "gamma";
        case Family::Weibull: return "weibull";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    for (auto f : kAllFamilies)
        if (name == to_string(f)) return f;
    throw std::invalid_argument("unknown distribution family '" + std::string(name) + "'");
}

double Distribution::scale() const {
    switch (family) {
        case Family::Exponential: return 1.0 / params[0];
        case Family::Gamma:
        case Family::Weibull: return params[1];
        case Family::Uniform: return params[1] - params[0];
        case Family::Gaussian: return params[1];
    }
    return 0.0;
}

void validate(const Distribution& d) {
    const double a = d.params[0], b = d.params[1];
    bool ok = std::isfinite(a) && std::isfinite(b);
    switch (d.family) {
        case Family::Uniform: ok = ok && b > a; break;
        case Family::Gaussian: ok = ok && b > 0.0; break;
        case Family::Exponential: ok = ok && a > 0.0; break;
        case Family::Gamma:
        case Family::Weibull: ok = ok && a > 0.0 && b > 0.0; break;
    }
    if (!ok) throw std::invalid_argument("invalid parameters for " + std::string(to_string(d.family)));
}

double log_pdf(const Distribution& d, double x) {
    validate(d);
    const double a = d.params[0], b = d.params[1];
    switch (d.family) {
        case Family::Uniform: return (x >= a && x <= b) ? -std::log(b - a) : -kInf;
        case Family::Gaussian: {
            const double z = (x - a) / b;
            return -0.5 * z * z - std::log(b) - 0.5 * std::log(2.0 * std::numbers::pi);
        }
        case Family::Exponential: return x < 0.0 ? -kInf : std::log(a) - a * x;
        case Family::Gamma:
            if (x < 0.0) return -kInf;
            if (x == 0.0) return a < 1.0 ? kInf : (a == 1.0 ? -std::log(b) : -kInf);
            return (a - 1.0) * std::log(x) - x / b - std::lgamma(a) - a * std::log(b);
        case Family::Weibull:
            if (x < 0.0) return -kInf;
            if (x == 0.0) return a < 1.0 ? kInf : (a == 1.0 ? -std::log(b) : -kInf);
            return std::log(a / b) + (a - 1.0) * std::log(x / b) - std::pow(x / b, a);
    }
    return -kInf;
}

double pdf(const Distribution& d, double x) { return std::exp(log_pdf(d, x)); }

double cdf(const Distribution& d, double x) {
    validate(d);
    const double a = d.params[0], b = d.params[1];
    switch (d.family) {
        case Family::Uniform: return std::clamp((x - a) / (b - a), 0.0, 1.0);
        case Family::Gaussian: return 0.5 * std::erfc(-(x - a) / (b * std::numbers::sqrt2));
        case Family::Exponential: return x <= 0.0 ? 0.0 : -std::expm1(-a * x);
        case Family::Gamma: return x <= 0.0 ? 0.0 : boost::math::gamma_p(a, x / b);
        case Family::Weibull: return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / b, a));
    }
    return 0.0;
}

ZeroSplit zero_split(const FeatureSample& x) {
    if (x.values.empty()) throw std::invalid_argument("zero split of an empty sample");
    ZeroSplit out;
    out.positives.filter = x.filter;
    out.positives.layer = x.layer;
    std::size_t zeros = 0;
    for (double v : x.values) {
        if (v < 0.0 || std::isnan(v)) throw std::domain_error("negative feature value (expected post-ReLU data)");
        if (v == 0.0)
            ++zeros;
        else
            out.positives.values.push_back(v);
    }
    out.p_zero = static_cast<double>(zeros) / static_cast<double>(x.values.size());
    return out;
}

double mean_nll(const Distribution& d, std::span<const double> data) {
    validate(d);
    return Likelihood(data)(d);
}

Distribution moment_matched(Family family, std::span<const double> positives) {
    return moment_matched(family, Likelihood(positives));
}

FitResult fit_sa(Family family, std::span<const double> positives, std::uint64_t seed,
                 const AnnealSchedule& schedule) {
    if (positives.empty()) throw std::invalid_argument("cannot fit an empty sample");
    if (schedule.temperature_steps < 1 || schedule.proposals_per_step < 1 || !(schedule.cooling > 0.0) ||
        !(schedule.cooling < 1.0) || !(schedule.initial_temperature > 0.0))
        throw std::invalid_argument("invalid annealing schedule");
    const Likelihood lik(positives);
    if (positive_support(family) && lik.min() <= 0.0)
        throw std::domain_error(std::string(to_string(family)) + " needs strictly positive data");

    FitResult result;
    result.train_n = positives.size();

    if (lik.max() == lik.min()) {
        if (positive_support(family))
            throw std::invalid_argument("degenerate sample: all " + std::to_string(positives.size()) +
                                        " values equal " + std::to_string(lik.min()) + "; cannot fit " +
                                        std::string(to_string(family)));
        result.dist = moment_matched(family, lik);
        result.objective = result.initial_objective = lik(result.dist);
        result.evaluations = 1;
        return result;
    }

    const Distribution start = moment_matched(family, lik);
    std::array<double, 2> cur = to_internal(start);
    double cur_obj = lik(start);
    auto best = cur;
    double best_obj = cur_obj;
    result.initial_objective = cur_obj;
    int evaluations = 1;

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int dims = free_parameters(family);
    double temperature = schedule.initial_temperature;
    for (int step = 0; step < schedule.temperature_steps; ++step) {
        const double width = schedule.step_scale * std::sqrt(temperature / schedule.initial_temperature);
        for (int p = 0; p < schedule.proposals_per_step; ++p) {
            auto next = cur;
            const int coord = p % dims;
            next[coord] += width * coordinate_scale(family, coord, cur) * normal(rng);
            const double obj = lik(from_internal(family, next));
            ++evaluations;
            const double delta = obj - cur_obj;
            if (std::isfinite(obj) && (delta <= 0.0 || uniform_open(rng) < std::exp(-delta / temperature))) {
                cur = next;
                cur_obj = obj;
                if (cur_obj < best_obj) {
                    best = cur;
                    best_obj = cur_obj;
                }
            }
        }
        temperature *= schedule.cooling;
    }

    result.dist = from_internal(family, best);
    result.objective = best_obj;
    result.evaluations = evaluations;
    return result;
}

double kl_binned(std::span<const double> test, const std::function<double(double)>& model_cdf, int bins) {
    if (test.empty()) throw std::invalid_argument("KL against an empty test sample");
    if (bins < 10) throw std::invalid_argument("KL needs at least 10 bins");
    std::vector<double> sorted(test.begin(), test.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const auto b = static_cast<std::size_t>(bins);

    std::vector<double> edges(b + 1);
    edges[0] = sorted.front();
    edges[b] = sorted.back();
    for (std::size_t k = 1; k < b; ++k) edges[k] = sorted[k * n / b];

    std::vector<double> cdf_at(b + 1);
    for (std::size_t k = 0; k <= b; ++k) cdf_at[k] = model_cdf(edges[k]);

    double raw_mass = 0.0;
    for (std::size_t k = 0; k < b; ++k) raw_mass += std::max(cdf_at[k + 1] - cdf_at[k], 0.0);
    if (!(raw_mass > 0.0)) throw std::domain_error("model assigns no mass to the test support");

    CompensatedSum kl;
    for (std::size_t k = 0; k < b; ++k) {
        const auto first = std::lower_bound(sorted.begin(), sorted.end(), edges[k]);
        const auto last = k + 1 == b ? sorted.end() : std::lower_bound(sorted.begin(), sorted.end(), edges[k + 1]);
        const auto count = static_cast<double>(last - first);
        if (count == 0.0) continue;
        const double p = count / static_cast<double>(n);
        const double q = std::max(cdf_at[k + 1] - cdf_at[k], kKlMassFloor);
        kl.add(p * std::log(p / q));
    }
    return kl.value();
}

double kl_fit(const Distribution& d, std::span<const double> test_positives, int bins) {
    validate(d);
    return kl_binned(test_positives, [&d](double x) { return cdf(d, x); }, bins);
}

const FamilyFit& FitReport::at(Family f) const {
    for (const auto& fam : families)
        if (fam.family == f) return fam;
    throw std::out_of_range("family not in report");
}

FamilyFit summarize(Family family, std::vector<double> per_round) {
    FamilyFit out;
    out.family = family;
    out.mean_kl = mean(per_round);
    out.sd_kl = sample_sd(per_round);
    out.lo = out.mean_kl - out.sd_kl;
    out.hi = out.mean_kl + out.sd_kl;
    out.per_round = std::move(per_round);
    return out;
}

namespace {

std::vector<double> draw_subset(const std::vector<double>& values, std::size_t size, Rng& rng) {
    if (size == 0 || size >= values.size()) return values;
    // Partial Fisher-Yates over an index permutation.
    std::vector<std::size_t> idx(values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<double> out(size);
    for (std::size_t i = 0; i < size; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
        out[i] = values[idx[i]];
    }
    return out;
}

}  // namespace

FitReport fit_report(const FeatureSample& train, const FeatureSample& test, int rounds, std::uint64_t seed,
                     const FitOptions& options) {
    if (rounds < 2) throw std::invalid_argument("fit report needs at least 2 rounds");
    const auto train_split = zero_split(train);
    const auto test_split = zero_split(test);
    if (train_split.positives.values.empty() || test_split.positives.values.empty())
        throw std::invalid_argument("fit report needs positive values in both train and test samples");

    const auto nfam = kAllFamilies.size();
    const auto nr = static_cast<std::size_t>(rounds);
    std::vector<std::vector<double>> kl(nfam, std::vector<double>(nr));
    std::vector<Distribution> last(nfam);

    detail::parallel_for(
        nr,
        [&](std::size_t r) {
            Rng rng(derive_seed(seed, r));
            const auto tr = draw_subset(train_split.positives.values, options.subset_size, rng);
            const auto te = draw_subset(test_split.positives.values, options.subset_size, rng);
            for (std::size_t f = 0; f < nfam; ++f) {
                const auto fit = fit_sa(kAllFamilies[f], tr, derive_seed(seed, 1000 + f), options.schedule);
                kl[f][r] = kl_fit(fit.dist, te, options.bins);
                if (r + 1 == nr) last[f] = fit.dist;
            }
        },
        options.workers);

    FitReport report;
    report.train_p_zero = train_split.p_zero;
    for (std::size_t f = 0; f < nfam; ++f) {
        report.families.push_back(summarize(kAllFamilies[f], std::move(kl[f])));
        report.families.back().last_fit = last[f];
    }
    report.winner = std::min_element(report.families.begin(), report.families.end(),
                                     [](const auto& a, const auto& b) { return a.mean_kl < b.mean_kl; })
                        ->family;
    return report;
}

}  // namespace featcop
