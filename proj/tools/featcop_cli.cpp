// featcop: command line front end for the copula feature analysis library.

#include "featcop/basis.hpp"
#include "featcop/copula.hpp"
#include "featcop/gcf.hpp"
#include "featcop/harness.hpp"
#include "featcop/histogram.hpp"
#include "featcop/marginal.hpp"
#include "featcop/moments.hpp"
#include "featcop/random.hpp"
#include "featcop/report.hpp"
#include "featcop/tensor_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace featcop;

namespace {

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    std::string config;
};

void add_common(CLI::App* app, Common& c, bool csv = true) {
    app->add_option("--seed", c.seed, "base seed");
    app->add_option("--out", c.out, "output file (default stdout)");
    if (csv)
        app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    else
        app->add_option("--format", c.format, "json")->check(CLI::IsMember({"json"}));
    app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + c.out + " for writing");
    f << text;
    if (!f) throw std::runtime_error("write failed: " + c.out);
}

Json load_config(const std::string& path) {
    if (path.empty()) return Json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    return Json::parse(in);
}

// Copula of selected filters, CDFs fitted on the same tensor.
CopulaMatrix select_copula(const FeatureTensor& t, const std::vector<int>& filters, int layer,
                           std::uint64_t seed) {
    if (filters.empty()) throw std::invalid_argument("no filters selected");
    std::vector<EmpiricalCdf> cdfs;
    std::vector<FeatureSample> samples;
    std::vector<std::uint64_t> seeds;
    for (int f : filters) {
        if (f < 0) throw std::out_of_range("negative filter index");
        samples.push_back(flatten_filter(t, static_cast<std::uint64_t>(f), layer));
        seeds.push_back(derive_seed(seed, static_cast<std::uint64_t>(f)));
        cdfs.push_back(fit_cdf(samples.back(), seeds.back()));
    }
    return build_copula(cdfs, samples, seeds);
}

std::vector<int> all_filters(const FeatureTensor& t) {
    std::vector<int> v(t.shape().filters);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"featcop: marginal and copula statistics of deep feature tensors"};
    app.require_subcommand(1);

    // inspect
    Common ic;
    std::string inspect_file;
    auto* inspect = app.add_subcommand("inspect", "print tensor header and summary");
    inspect->add_option("file", inspect_file)->required()->check(CLI::ExistingFile);
    add_common(inspect, ic, false);
    inspect->callback([&] {
        const auto t = read_tensor(inspect_file);
        const auto& s = t.shape();
        Json j{{"file", inspect_file},
               {"dtype", "f32"},
               {"dims", {s.images, s.filters, s.rows, s.cols}},
               {"elements", s.element_count()},
               {"per_filter", s.per_filter_count()},
               {"nonzero_percent", nonzero_row(t, 0).nonzero_percent}};
        emit(ic, dump(j));
    });

    // basis-plot
    Common bc;
    std::string bp_basis = "legendre";
    int bp_degree = 8, bp_points = 512;
    auto* bplot = app.add_subcommand("basis-plot", "tabulate basis functions on a uniform grid (CSV)");
    bplot->add_option("--basis", bp_basis, "legendre|fourier|legendre-raw|chebyshev");
    bplot->add_option("--degree", bp_degree)->check(CLI::Range(0, kMaxBasisDegree));
    bplot->add_option("--points", bp_points)->check(CLI::Range(2, 1 << 20));
    add_common(bplot, bc);
    bplot->callback([&] {
        std::ostringstream os;
        write_basis_csv(os, BasisSpec(parse_basis_family(bp_basis), bp_degree), bp_points);
        emit(bc, os.str());
    });

    // moments / gci
    Common mc;
    std::string m_file, m_basis = "legendre", m_trunc;
    std::vector<int> m_filters;
    int m_degree = 4, m_layer = 0;
    std::string m_binary;
    auto* moments = app.add_subcommand("moments", "sample moment tensor of selected filters");
    auto* gcicmd = app.add_subcommand("gci", "copula independence metric of selected filters");
    for (auto* sub : {moments, gcicmd}) {
        sub->add_option("file", m_file)->required()->check(CLI::ExistingFile);
        sub->add_option("--filters", m_filters, "filter ids (default all)")->delimiter(',');
        sub->add_option("--layer", m_layer);
        sub->add_option("--basis", m_basis);
        sub->add_option("--degree", m_degree)->check(CLI::Range(0, kMaxBasisDegree));
        sub->add_option("--truncation", m_trunc, "tensor-product|total-degree");
        add_common(sub, mc);
    }
    moments->add_option("--save", m_binary, "also write the binary moment record here");
    auto run_moments = [&](bool report_gci) {
        const auto t = read_tensor(m_file);
        if (m_filters.empty()) m_filters = all_filters(t);
        const auto cop = select_copula(t, m_filters, m_layer, mc.seed);
        const int D = static_cast<int>(m_filters.size());
        const Truncation trunc = m_trunc.empty() ? (D <= 2 ? Truncation::TensorProduct : Truncation::TotalDegree)
                                                 : parse_truncation(m_trunc);
        const auto mu = accumulate_blocked(cop, BasisSpec(parse_basis_family(m_basis), m_degree),
                                           enumerate_indices(D, m_degree, trunc), 4096, 0);
        if (!m_binary.empty()) write_moments(m_binary, mu);
        if (report_gci) {
            auto j = to_json(gci_report(mu));
            j["filters"] = m_filters;
            if (mc.format == "csv") {
                std::ostringstream os;
                os << "gci\n" << j["value"].get<double>() << '\n';
                emit(mc, os.str());
            } else {
                emit(mc, dump(j));
            }
            return;
        }
        if (mc.format == "csv") {
            std::ostringstream os;
            os.precision(17);
            os << "index,value\n";
            for (std::size_t i = 0; i < mu.indices().size(); ++i) {
                const auto& idx = mu.indices()[i];
                for (std::size_t d = 0; d < idx.size(); ++d) os << (d ? "-" : "") << idx[d];
                os << ',' << mu.values()[i] << '\n';
            }
            emit(mc, os.str());
        } else {
            emit(mc, dump(to_json(mu)));
        }
    };
    moments->callback([&] { run_moments(false); });
    gcicmd->callback([&] { run_moments(true); });

    // gcd
    Common gc;
    std::string gcd_a, gcd_b, gcd_basis = "legendre";
    std::vector<int> gcd_filters;
    int gcd_degree = 8, gcd_top = 10;
    auto* gcdcmd = app.add_subcommand("gcd", "copula distance between the same filters of two tensors");
    gcdcmd->add_option("first", gcd_a)->required()->check(CLI::ExistingFile);
    gcdcmd->add_option("second", gcd_b)->required()->check(CLI::ExistingFile);
    gcdcmd->add_option("--filters", gcd_filters)->delimiter(',')->required();
    gcdcmd->add_option("--basis", gcd_basis);
    gcdcmd->add_option("--degree", gcd_degree)->check(CLI::Range(0, kMaxBasisDegree));
    gcdcmd->add_option("--top", gcd_top)->check(CLI::PositiveNumber);
    add_common(gcdcmd, gc, false);
    gcdcmd->callback([&] {
        const int D = static_cast<int>(gcd_filters.size());
        const BasisSpec basis(parse_basis_family(gcd_basis), gcd_degree);
        const auto idx = enumerate_indices(D, gcd_degree, D <= 2 ? Truncation::TensorProduct : Truncation::TotalDegree);
        const auto a = accumulate(select_copula(read_tensor(gcd_a), gcd_filters, 0, gc.seed), basis, idx);
        const auto b = accumulate(select_copula(read_tensor(gcd_b), gcd_filters, 0, gc.seed), basis, idx);
        emit(gc, dump(to_json(gcd(a, b), static_cast<std::size_t>(gcd_top))));
    });

    // density-grid
    Common dc;
    std::string dg_file;
    std::vector<int> dg_filters{0, 1};
    int dg_degree = 8, dg_resolution = 16, dg_bins = 16, dg_layer = 0;
    bool dg_raw = false;
    auto* dgrid = app.add_subcommand("density-grid", "pairwise copula density on a grid (CSV)");
    dgrid->add_option("file", dg_file)->required()->check(CLI::ExistingFile);
    dgrid->add_option("--filters", dg_filters)->delimiter(',')->expected(2);
    dgrid->add_option("--layer", dg_layer);
    dgrid->add_option("--degree", dg_degree)->check(CLI::Range(0, kMaxBasisDegree));
    dgrid->add_option("--resolution", dg_resolution)->check(CLI::Range(1, 4096));
    dgrid->add_option("--bins", dg_bins, "histogram bins per axis")->check(CLI::Range(1, 4096));
    dgrid->add_flag("--raw", dg_raw, "report unclamped series values");
    add_common(dgrid, dc);
    dgrid->callback([&] {
        const auto cop = select_copula(read_tensor(dg_file), dg_filters, dg_layer, dc.seed);
        const auto idx = enumerate_indices(2, dg_degree, Truncation::TensorProduct);
        std::vector<NamedGrid> grids;
        for (auto f : {BasisFamily::LegendreNormalized, BasisFamily::FourierReal}) {
            auto est = DensityEstimate::from_moments(accumulate(cop, BasisSpec(f, dg_degree), idx));
            grids.push_back({std::string(to_string(f)), density_grid(est, dg_resolution, !dg_raw)});
        }
        auto hist = DensityEstimate::from_histogram(fit_hist(cop, dg_bins));
        grids.push_back({"histogram", density_grid(hist, dg_resolution, !dg_raw)});
        if (dc.format == "csv") {
            std::ostringstream os;
            write_grid_csv(os, grids);
            emit(dc, os.str());
        } else {
            Json j{{"resolution", dg_resolution}, {"centers", grids.front().grid.centers}};
            for (const auto& g : grids) j[g.name] = g.grid.values;
            emit(dc, dump(j));
        }
    });

    // marginals
    Common fc;
    std::string mf_train, mf_test;
    int mf_filter = 0, mf_layer = 0, mf_rounds = 30, mf_bins = 50;
    std::size_t mf_subset = 0;
    auto* marg = app.add_subcommand("marginals", "fit the five marginal families to one filter");
    marg->add_option("train", mf_train)->required()->check(CLI::ExistingFile);
    marg->add_option("test", mf_test)->required()->check(CLI::ExistingFile);
    marg->add_option("--filter", mf_filter);
    marg->add_option("--layer", mf_layer);
    marg->add_option("--rounds", mf_rounds)->check(CLI::Range(2, 100000));
    marg->add_option("--bins", mf_bins)->check(CLI::Range(10, 100000));
    marg->add_option("--subset", mf_subset, "values drawn per round (0 = all)");
    add_common(marg, fc, false);
    marg->callback([&] {
        const auto tr = flatten_filter(read_tensor(mf_train), static_cast<std::uint64_t>(mf_filter), mf_layer);
        const auto te = flatten_filter(read_tensor(mf_test), static_cast<std::uint64_t>(mf_filter), mf_layer);
        FitOptions opt;
        opt.bins = mf_bins;
        opt.subset_size = mf_subset;
        emit(fc, dump(to_json(fit_report(tr, te, mf_rounds, fc.seed, opt))));
    });

    // nonzero-table
    Common nc;
    std::vector<std::string> nz_files;
    auto* nz = app.add_subcommand("nonzero-table", "percent of nonzero activations per layer file");
    nz->add_option("files", nz_files, "one file per layer, in layer order")->required()->check(CLI::ExistingFile);
    add_common(nz, nc);
    nz->callback([&] {
        std::vector<NonzeroRow> rows;
        for (std::size_t i = 0; i < nz_files.size(); ++i)
            rows.push_back(nonzero_row(read_tensor(nz_files[i]), static_cast<int>(i), nz_files[i]));
        if (nc.format == "csv") {
            std::ostringstream os;
            write_nonzero_csv(os, rows);
            emit(nc, os.str());
        } else {
            Json j = Json::array();
            for (const auto& r : rows) j.push_back(to_json(r));
            emit(nc, dump(j));
        }
    });

    // group-experiment
    Common ec;
    std::string ge_train, ge_test;
    int ge_group = 0, ge_rounds = 0, ge_degree = -1, ge_bins = 0;
    std::string ge_trunc;
    auto* ge = app.add_subcommand("group-experiment", "cross-entropy of Legendre, Fourier and histogram fits");
    ge->add_option("--train", ge_train)->check(CLI::ExistingFile);
    ge->add_option("--test", ge_test)->check(CLI::ExistingFile);
    ge->add_option("--group-size", ge_group);
    ge->add_option("--rounds", ge_rounds);
    ge->add_option("--degree", ge_degree);
    ge->add_option("--bins", ge_bins);
    ge->add_option("--truncation", ge_trunc);
    add_common(ge, ec);
    ge->callback([&] {
        auto cfg = group_config_from_json(load_config(ec.config));
        // Command-line flags override the config file.
        if (!ge_train.empty()) cfg.train_file = ge_train;
        if (!ge_test.empty()) cfg.test_file = ge_test;
        if (ge_group) cfg.group_size = ge_group;
        if (ge_rounds) cfg.rounds = ge_rounds;
        if (ge_degree >= 0) cfg.max_degree = ge_degree;
        if (ge_bins) cfg.bins = ge_bins;
        if (!ge_trunc.empty()) cfg.truncation = parse_truncation(ge_trunc);
        if (ge->count("--seed")) cfg.seed = ec.seed;
        if (cfg.train_file.empty() || cfg.test_file.empty()) throw std::invalid_argument("train and test files required");
        for (const auto& p : {cfg.train_file, cfg.test_file})
            if (!std::filesystem::exists(p)) throw std::invalid_argument("no such file: " + p.string());
        const auto report = run_group_experiment(cfg);
        if (ec.format == "csv") {
            std::ostringstream os;
            write_comparison_csv(os, report);
            emit(ec, os.str());
        } else {
            emit(ec, dump(to_json(report)));
        }
    });

    // marginal-experiment
    Common xc;
    std::vector<std::string> me_train, me_test;
    int me_rounds = 0;
    auto* me = app.add_subcommand("marginal-experiment", "per-layer marginal fits and nonzero table");
    me->add_option("--train", me_train, "one file per layer")->check(CLI::ExistingFile);
    me->add_option("--test", me_test, "one file per layer (default: split train images)")->check(CLI::ExistingFile);
    me->add_option("--rounds", me_rounds);
    add_common(me, xc);
    me->callback([&] {
        auto cfg = marginal_config_from_json(load_config(xc.config));
        if (!me_train.empty()) cfg.train_files.assign(me_train.begin(), me_train.end());
        if (!me_test.empty()) cfg.test_files.assign(me_test.begin(), me_test.end());
        if (me_rounds) cfg.rounds = me_rounds;
        if (me->count("--seed")) cfg.seed = xc.seed;
        for (const auto& list : {cfg.train_files, cfg.test_files})
            for (const auto& p : list)
                if (!std::filesystem::exists(p)) throw std::invalid_argument("no such file: " + p.string());
        const auto report = run_marginal_experiment(cfg);
        if (xc.format == "csv") {
            std::ostringstream os;
            std::vector<NonzeroRow> rows;
            for (const auto& l : report.layers) rows.push_back(l.nonzero);
            write_nonzero_csv(os, rows);
            os << '\n';
            write_kl_csv(os, report);
            emit(xc, os.str());
        } else {
            emit(xc, dump(to_json(report)));
        }
    });

    // synth
    Common sc;
    std::string s_kind = "independent", s_prefix;
    CopulaDatasetSpec spec;
    auto* synth = app.add_subcommand("synth", "write a synthetic copula train/test pair");
    synth->add_option("--kind", s_kind, "independent|gaussian|comonotone|tail-dependent");
    synth->add_option("--dims", spec.dims)->check(CLI::Range(1, 1 << 16));
    synth->add_option("--n", spec.n)->check(CLI::PositiveNumber);
    synth->add_option("--rho", spec.rho);
    synth->add_option("--prefix", s_prefix, "writes <prefix>_train.fcpg and <prefix>_test.fcpg")->required();
    add_common(synth, sc, false);
    synth->callback([&] {
        spec.kind = parse_copula_kind(s_kind);
        const auto [train, test] = synth_copula_dataset(spec, sc.seed);
        const std::string a = s_prefix + "_train.fcpg", b = s_prefix + "_test.fcpg";
        write_tensor(a, train);
        write_tensor(b, test);
        emit(sc, dump(Json{{"kind", s_kind}, {"dims", spec.dims}, {"n", spec.n}, {"train", a}, {"test", b}}));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "featcop: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
