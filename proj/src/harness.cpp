#include "featcop/harness.hpp"

#include "featcop/copula.hpp"
#include "featcop/detail/parallel.hpp"
#include "featcop/histogram.hpp"
#include "featcop/numeric.hpp"
#include "featcop/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace featcop {

namespace {

bool is_dead(const FeatureSample& s) {
    return std::all_of(s.values.begin(), s.values.end(), [](double v) { return v == 0.0; });
}

std::vector<int> draw_group(const std::vector<int>& live, int g, Rng& rng) {
    auto pool = live;
    for (int i = 0; i < g; ++i) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), pool.size() - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
    }
    pool.resize(static_cast<std::size_t>(g));
    std::sort(pool.begin(), pool.end());
    return pool;
}

MethodSummary summarize_method(std::string name, std::vector<double> per_round) {
    MethodSummary m;
    m.method = std::move(name);
    m.mean = mean(per_round);
    m.sd = sample_sd(per_round);
    m.lo = m.mean - m.sd;
    m.hi = m.mean + m.sd;
    m.per_round = std::move(per_round);
    return m;
}

}  // namespace

int GroupExperimentConfig::effective_max_degree() const {
    if (max_degree) return *max_degree;
    return group_size <= 2 ? 8 : 4;
}

int GroupExperimentConfig::effective_bins() const {
    if (bins) return *bins;
    return group_size <= 2 ? 16 : 6;
}

Truncation GroupExperimentConfig::effective_truncation() const {
    if (truncation) return *truncation;
    return group_size <= 2 ? Truncation::TensorProduct : Truncation::TotalDegree;
}

void GroupExperimentConfig::validate() const {
    if (group_size < 2) throw std::invalid_argument("group size must be >= 2");
    if (rounds < 2) throw std::invalid_argument("rounds must be >= 2");
    const int k = effective_max_degree();
    if (k < 0 || k > kMaxBasisDegree) throw std::invalid_argument("max degree out of range");
    if (effective_bins() < 2) throw std::invalid_argument("histogram bins must be >= 2");
    if (bases.empty() && !histogram) throw std::invalid_argument("no methods selected");
    for (auto b : bases)
        if (!is_estimation_family(b)) throw std::invalid_argument("plot-only basis cannot estimate densities");
}

const MethodSummary& ComparisonReport::method(const std::string& name) const {
    for (const auto& m : methods)
        if (m.method == name) return m;
    throw std::out_of_range("method '" + name + "' not in report");
}

void mark_significance(std::vector<MethodSummary>& methods) {
    for (auto& m : methods) {
        m.significantly_best = methods.size() > 1;
        for (const auto& o : methods)
            if (&o != &m && !(m.hi < o.lo)) m.significantly_best = false;
    }
}

ComparisonReport run_group_experiment(const GroupExperimentConfig& cfg, const FeatureTensor& train,
                                      const FeatureTensor& test) {
    cfg.validate();
    if (train.shape().filters != test.shape().filters)
        throw std::invalid_argument("train and test tensors have different filter counts");

    const auto filters = static_cast<int>(train.shape().filters);
    std::vector<FeatureSample> train_samples, test_samples;
    std::vector<int> live;
    for (int f = 0; f < filters; ++f) {
        train_samples.push_back(flatten_filter(train, static_cast<std::uint64_t>(f), cfg.layer));
        test_samples.push_back(flatten_filter(test, static_cast<std::uint64_t>(f), cfg.layer));
        if (!is_dead(train_samples.back())) live.push_back(f);
    }
    if (static_cast<int>(live.size()) < cfg.group_size)
        throw std::invalid_argument("layer has " + std::to_string(live.size()) + " live features, group needs " +
                                    std::to_string(cfg.group_size));

    ComparisonReport report;
    report.config = cfg;
    report.live_features = live.size();
    report.dead_features = static_cast<std::size_t>(filters) - live.size();

    const auto rounds = static_cast<std::size_t>(cfg.rounds);
    // Groups are drawn up front so they do not depend on scheduling.
    Rng group_rng(derive_seed(cfg.seed, 0xC0FFEE));
    for (std::size_t r = 0; r < rounds; ++r) report.groups.push_back(draw_group(live, cfg.group_size, group_rng));

    const int degree = cfg.effective_max_degree();
    const int bins = cfg.effective_bins();
    const auto indices = enumerate_indices(cfg.group_size, degree, cfg.effective_truncation());
    const std::size_t nmethods = cfg.bases.size() + (cfg.histogram ? 1 : 0);
    std::vector<std::vector<double>> ce(nmethods, std::vector<double>(rounds));

    detail::parallel_for(
        rounds,
        [&](std::size_t r) {
            const auto& group = report.groups[r];
            std::vector<EmpiricalCdf> cdfs;
            std::vector<FeatureSample> tr, te;
            std::vector<std::uint64_t> train_seeds, test_seeds;
            for (std::size_t d = 0; d < group.size(); ++d) {
                const auto f = static_cast<std::size_t>(group[d]);
                const auto s = derive_seed(cfg.seed, (r << 20) + (d << 1));
                train_seeds.push_back(s);
                test_seeds.push_back(derive_seed(cfg.seed, (r << 20) + (d << 1) + 1));
                cdfs.push_back(fit_cdf(train_samples[f], s));
                tr.push_back(train_samples[f]);
                te.push_back(test_samples[f]);
            }
            const auto train_cop = build_copula(cdfs, tr, train_seeds);
            const auto test_cop = build_copula(cdfs, te, test_seeds);

            std::size_t m = 0;
            for (auto family : cfg.bases) {
                const BasisSpec basis(family, degree);
                auto est = DensityEstimate::from_moments(accumulate(train_cop, basis, indices), cfg.density_floor);
                ce[m++][r] = cross_entropy(est, test_cop);
            }
            if (cfg.histogram) {
                auto est = DensityEstimate::from_histogram(fit_hist(train_cop, bins), cfg.density_floor);
                ce[m++][r] = cross_entropy(est, test_cop);
            }
        },
        cfg.workers);

    std::size_t m = 0;
    for (auto family : cfg.bases) report.methods.push_back(summarize_method(std::string(to_string(family)), ce[m++]));
    if (cfg.histogram) report.methods.push_back(summarize_method("histogram", ce[m++]));
    mark_significance(report.methods);
    return report;
}

ComparisonReport run_group_experiment(const GroupExperimentConfig& cfg) {
    const auto train = read_tensor(cfg.train_file);
    const auto test = read_tensor(cfg.test_file);
    return run_group_experiment(cfg, train, test);
}

NonzeroRow nonzero_row(const FeatureTensor& t, int layer, std::string source) {
    NonzeroRow row;
    row.layer = layer;
    row.source = std::move(source);
    row.filters = static_cast<std::size_t>(t.shape().filters);
    const auto& p = t.payload();
    const auto nonzero = std::count_if(p.begin(), p.end(), [](float v) { return v != 0.0f; });
    row.nonzero_percent = p.empty() ? 0.0 : 100.0 * static_cast<double>(nonzero) / static_cast<double>(p.size());
    for (std::uint64_t f = 0; f < t.shape().filters; ++f)
        if (is_dead(flatten_filter(t, f))) ++row.dead_features;
    return row;
}

std::pair<FeatureTensor, FeatureTensor> split_images(const FeatureTensor& t) {
    const auto& s = t.shape();
    if (s.images < 2) throw std::invalid_argument("need at least 2 images to split");
    const std::uint64_t first = s.images / 2;
    const std::uint64_t per_image = s.filters * s.rows * s.cols;
    const auto mid = t.payload().begin() + static_cast<std::ptrdiff_t>(first * per_image);
    TensorShape a = s, b = s;
    a.images = first;
    b.images = s.images - first;
    return {FeatureTensor(a, std::vector<float>(t.payload().begin(), mid)),
            FeatureTensor(b, std::vector<float>(mid, t.payload().end()))};
}

MarginalExperimentReport run_marginal_experiment(const MarginalExperimentConfig& cfg,
                                                 const std::vector<FeatureTensor>& train,
                                                 const std::vector<FeatureTensor>& test) {
    if (cfg.rounds < 2) throw std::invalid_argument("rounds must be >= 2");
    if (cfg.features_per_round < 1) throw std::invalid_argument("features per round must be >= 1");
    if (train.size() != test.size() || train.empty())
        throw std::invalid_argument("one test tensor per training tensor required");

    MarginalExperimentReport report;
    for (std::size_t layer = 0; layer < train.size(); ++layer) {
        const auto& tr = train[layer];
        const auto& te = test[layer];
        if (tr.shape().filters != te.shape().filters)
            throw std::invalid_argument("train/test filter counts differ in layer " + std::to_string(layer));

        LayerMarginalReport lr;
        lr.nonzero = nonzero_row(tr, static_cast<int>(layer),
                                 layer < cfg.train_files.size() ? cfg.train_files[layer].string() : std::string{});

        // Live filters need positives on both sides to be fitted and scored.
        std::vector<std::vector<double>> train_pos, test_pos;
        for (std::uint64_t f = 0; f < tr.shape().filters; ++f) {
            auto a = zero_split(flatten_filter(tr, f, static_cast<int>(layer))).positives.values;
            auto b = zero_split(flatten_filter(te, f, static_cast<int>(layer))).positives.values;
            if (a.size() < 2 || b.size() < 2) continue;
            train_pos.push_back(std::move(a));
            test_pos.push_back(std::move(b));
        }
        if (train_pos.empty()) throw std::invalid_argument("layer " + std::to_string(layer) + " has no live features");

        const auto rounds = static_cast<std::size_t>(cfg.rounds);
        const auto nfam = kAllFamilies.size();
        const int per_round = std::min<int>(cfg.features_per_round, static_cast<int>(train_pos.size()));
        std::vector<std::vector<double>> kl(nfam, std::vector<double>(rounds));
        const auto layer_seed = derive_seed(cfg.seed, layer);

        detail::parallel_for(
            rounds,
            [&](std::size_t r) {
                Rng rng(derive_seed(layer_seed, r));
                std::vector<int> all(train_pos.size());
                std::iota(all.begin(), all.end(), 0);
                const auto chosen = draw_group(all, per_round, rng);
                std::vector<CompensatedSum> sums(nfam);
                for (int f : chosen) {
                    FeatureSample a{f, static_cast<int>(layer), train_pos[static_cast<std::size_t>(f)]};
                    FeatureSample b{f, static_cast<int>(layer), test_pos[static_cast<std::size_t>(f)]};
                    auto thin = [&](std::vector<double>& v) {
                        if (cfg.max_values == 0 || v.size() <= cfg.max_values) return;
                        std::shuffle(v.begin(), v.end(), rng);
                        v.resize(cfg.max_values);
                    };
                    thin(a.values);
                    thin(b.values);
                    for (std::size_t k = 0; k < nfam; ++k) {
                        const auto fit = fit_sa(kAllFamilies[k], a.values, derive_seed(layer_seed, 1000 + k),
                                                cfg.schedule);
                        sums[k].add(kl_fit(fit.dist, b.values, cfg.bins));
                    }
                }
                for (std::size_t k = 0; k < nfam; ++k) kl[k][r] = sums[k].value() / per_round;
            },
            cfg.workers);

        for (std::size_t k = 0; k < nfam; ++k) lr.families.push_back(summarize(kAllFamilies[k], std::move(kl[k])));
        lr.winner = std::min_element(lr.families.begin(), lr.families.end(),
                                     [](const auto& a, const auto& b) { return a.mean_kl < b.mean_kl; })
                        ->family;
        report.layers.push_back(std::move(lr));
    }
    return report;
}

MarginalExperimentReport run_marginal_experiment(const MarginalExperimentConfig& cfg) {
    if (cfg.train_files.empty()) throw std::invalid_argument("no layer files");
    if (!cfg.test_files.empty() && cfg.test_files.size() != cfg.train_files.size())
        throw std::invalid_argument("one test file per layer file required");
    std::vector<FeatureTensor> train, test;
    for (std::size_t i = 0; i < cfg.train_files.size(); ++i) {
        auto t = read_tensor(cfg.train_files[i]);
        if (cfg.test_files.empty()) {
            auto [a, b] = split_images(t);
            train.push_back(std::move(a));
            test.push_back(std::move(b));
        } else {
            train.push_back(std::move(t));
            test.push_back(read_tensor(cfg.test_files[i]));
        }
    }
    return run_marginal_experiment(cfg, train, test);
}

std::string_view to_string(CopulaKind k) {
    switch (k) {
        case CopulaKind::Independent: return "independent";
        case CopulaKind::Gaussian: return "gaussian";
        case CopulaKind::Comonotone: return "comonotone";
        case CopulaKind::TailDependent: return "tail-dependent";
    }
    return "unknown";
}

CopulaKind parse_copula_kind(std::string_view name) {
    for (auto k : {CopulaKind::Independent, CopulaKind::Gaussian, CopulaKind::Comonotone, CopulaKind::TailDependent})
        if (name == to_string(k)) return k;
    throw std::invalid_argument("unknown copula kind '" + std::string(name) + "'");
}

std::vector<double> synth_copula_sample(const CopulaDatasetSpec& spec, std::uint64_t seed) {
    if (spec.dims < 1) throw std::invalid_argument("dimension must be >= 1");
    if (spec.n == 0) throw std::invalid_argument("sample size must be positive");
    const auto n = spec.n;
    const auto D = static_cast<std::size_t>(spec.dims);
    Rng rng(seed);
    std::vector<double> u(n * D);

    switch (spec.kind) {
        case CopulaKind::Independent:
            for (auto& v : u) v = uniform_open(rng);
            break;
        case CopulaKind::Comonotone:
            for (std::size_t i = 0; i < n; ++i) {
                const double v = uniform_open(rng);
                for (std::size_t d = 0; d < D; ++d) u[i * D + d] = v;
            }
            break;
        case CopulaKind::Gaussian: {
            if (!(spec.rho >= 0.0 && spec.rho < 1.0))
                throw std::invalid_argument("gaussian copula needs 0 <= rho < 1");
            std::normal_distribution<double> normal(0.0, 1.0);
            const double a = std::sqrt(spec.rho), b = std::sqrt(1.0 - spec.rho);
            for (std::size_t i = 0; i < n; ++i) {
                const double common = normal(rng);
                for (std::size_t d = 0; d < D; ++d) {
                    const double z = a * common + b * normal(rng);
                    u[i * D + d] = 0.5 * std::erfc(-z / std::sqrt(2.0));
                }
            }
            break;
        }
        case CopulaKind::TailDependent: {
            if (D < 2) throw std::invalid_argument("tail-dependent copula needs D >= 2");
            if (!(spec.tail_quantile > 0.0 && spec.tail_quantile < 1.0) ||
                !(spec.tail_probability >= 0.0 && spec.tail_probability <= 1.0) ||
                !(spec.tail_target > 0.0 && spec.tail_target < 1.0))
                throw std::invalid_argument("tail parameters must be fractions");
            for (auto& v : u) v = uniform_open(rng);
            // Rows by rank of column 0 and column 1.
            std::vector<std::size_t> by0(n), by1(n);
            std::iota(by0.begin(), by0.end(), 0);
            std::iota(by1.begin(), by1.end(), 0);
            std::sort(by0.begin(), by0.end(), [&](auto a, auto b) { return u[a * D] > u[b * D]; });
            std::sort(by1.begin(), by1.end(), [&](auto a, auto b) { return u[a * D + 1] > u[b * D + 1]; });
            const auto n_tail = static_cast<std::size_t>(std::floor(spec.tail_quantile * static_cast<double>(n)));
            const auto n_target = static_cast<std::size_t>(std::floor(spec.tail_target * static_cast<double>(n)));

            std::vector<char> in_target(n, 0), in_tail(n, 0);
            for (std::size_t k = 0; k < n_target; ++k) in_target[by1[k]] = 1;
            for (std::size_t k = 0; k < n_tail; ++k) in_tail[by0[k]] = 1;
            std::vector<std::size_t> donors;
            for (std::size_t k = 0; k < n_target; ++k)
                if (!in_tail[by1[k]]) donors.push_back(by1[k]);
            std::shuffle(donors.begin(), donors.end(), rng);

            // Swapping column-1 values keeps that column's marginal exactly uniform.
            std::size_t next_donor = 0;
            for (std::size_t k = 0; k < n_tail; ++k) {
                const std::size_t row = by0[k];
                if (uniform_open(rng) >= spec.tail_probability || in_target[row]) continue;
                if (next_donor == donors.size()) break;
                std::swap(u[row * D + 1], u[donors[next_donor++] * D + 1]);
            }
            break;
        }
    }
    return u;
}

std::pair<FeatureTensor, FeatureTensor> synth_copula_dataset(const CopulaDatasetSpec& spec, std::uint64_t seed) {
    auto to_tensor = [&](const std::vector<double>& u) {
        return FeatureTensor(TensorShape{spec.n, static_cast<std::uint64_t>(spec.dims), 1, 1},
                             std::vector<float>(u.begin(), u.end()));
    };
    return {to_tensor(synth_copula_sample(spec, derive_seed(seed, 0))),
            to_tensor(synth_copula_sample(spec, derive_seed(seed, 1)))};
}

CopulaMatrix self_copula(const FeatureTensor& train, std::uint64_t seed) {
    std::vector<EmpiricalCdf> cdfs;
    std::vector<FeatureSample> samples;
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t f = 0; f < train.shape().filters; ++f) {
        samples.push_back(flatten_filter(train, f));
        seeds.push_back(derive_seed(seed, f));
        cdfs.push_back(fit_cdf(samples.back(), seeds.back()));
    }
    return build_copula(cdfs, samples, seeds);
}

}  // namespace featcop
