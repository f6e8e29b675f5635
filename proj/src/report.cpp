#include "featcop/report.hpp"

#include <cstdio>
#include <set>
#include <stdexcept>

namespace featcop {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const char* what) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + " config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument(std::string("unknown ") + what + " config key '" + it.key() + "'");
}

}  // namespace

Json to_json(const Distribution& d) {
    Json j;
    j["family"] = to_string(d.family);
    switch (d.family) {
        case Family::Uniform: j["lo"] = d.params[0]; j["hi"] = d.params[1]; break;
        case Family::Gaussian: j["mean"] = d.params[0]; j["sd"] = d.params[1]; break;
        case Family::Exponential: j["rate"] = d.params[0]; break;
        case Family::Gamma:
        case Family::Weibull: j["shape"] = d.params[0]; j["scale"] = d.params[1]; break;
    }
    return j;
}

Json to_json(const FamilyFit& f) {
    return Json{{"family", to_string(f.family)}, {"mean_kl", f.mean_kl}, {"sd_kl", f.sd_kl},
                {"lo", f.lo},                    {"hi", f.hi},           {"per_round", f.per_round},
                {"last_fit", to_json(f.last_fit)}};
}

Json to_json(const FitReport& r) {
    Json fams = Json::array();
    for (const auto& f : r.families) fams.push_back(to_json(f));
    return Json{{"winner", to_string(r.winner)}, {"train_p_zero", r.train_p_zero}, {"families", fams}};
}

Json to_json(const GcdReport& r, std::size_t top_k) {
    Json top = Json::array();
    for (const auto& [index, v] : r.top(top_k)) top.push_back(Json{{"index", index}, {"contribution", v}});
    return Json{{"value", r.value}, {"terms", r.contributions.size()}, {"top", top}};
}

Json to_json(const MomentTensor& m) {
    Json values = Json::array();
    for (std::size_t i = 0; i < m.indices().size(); ++i)
        values.push_back(Json{{"index", m.indices()[i]}, {"value", m.values()[i]}});
    return Json{{"basis", to_string(m.basis().family)},
                {"max_degree", m.basis().max_degree},
                {"truncation", to_string(m.indices().truncation())},
                {"dims", m.dims()},
                {"n", m.sample_count()},
                {"moments", values}};
}

Json to_json(const GroupExperimentConfig& c) {
    Json bases = Json::array();
    for (auto b : c.bases) bases.push_back(to_string(b));
    return Json{{"train", c.train_file.string()},
                {"test", c.test_file.string()},
                {"layer", c.layer},
                {"group_size", c.group_size},
                {"rounds", c.rounds},
                {"max_degree", c.effective_max_degree()},
                {"truncation", to_string(c.effective_truncation())},
                {"bins", c.effective_bins()},
                {"bases", bases},
                {"histogram", c.histogram},
                {"density_floor", c.density_floor},
                {"seed", c.seed}};
}

Json to_json(const ComparisonReport& r) {
    Json methods = Json::array();
    for (const auto& m : r.methods)
        methods.push_back(Json{{"method", m.method},
                               {"mean", m.mean},
                               {"sd", m.sd},
                               {"lo", m.lo},
                               {"hi", m.hi},
                               {"significantly_best", m.significantly_best},
                               {"per_round", m.per_round}});
    return Json{{"config", to_json(r.config)},   {"live_features", r.live_features},
                {"dead_features", r.dead_features}, {"protocol", r.protocol},
                {"methods", methods},             {"groups", r.groups}};
}

Json to_json(const NonzeroRow& r) {
    return Json{{"layer", r.layer},
                {"source", r.source},
                {"filters", r.filters},
                {"dead_features", r.dead_features},
                {"nonzero_percent", r.nonzero_percent}};
}

Json to_json(const MarginalExperimentReport& r) {
    Json layers = Json::array();
    for (const auto& l : r.layers) {
        Json fams = Json::array();
        for (const auto& f : l.families) {
            auto jf = to_json(f);
            jf.erase("last_fit");
            fams.push_back(std::move(jf));
        }
        layers.push_back(Json{{"nonzero", to_json(l.nonzero)}, {"winner", to_string(l.winner)}, {"families", fams}});
    }
    return Json{{"layers", layers}};
}

GroupExperimentConfig group_config_from_json(const Json& j, GroupExperimentConfig c) {
    reject_unknown(j,
                   {"train", "test", "layer", "group_size", "rounds", "max_degree", "truncation", "bins", "bases",
                    "histogram", "density_floor", "seed", "workers"},
                   "group experiment");
    if (j.contains("train")) c.train_file = j["train"].get<std::string>();
    if (j.contains("test")) c.test_file = j["test"].get<std::string>();
    if (j.contains("layer")) c.layer = j["layer"].get<int>();
    if (j.contains("group_size")) c.group_size = j["group_size"].get<int>();
    if (j.contains("rounds")) c.rounds = j["rounds"].get<int>();
    if (j.contains("max_degree")) c.max_degree = j["max_degree"].get<int>();
    if (j.contains("truncation")) c.truncation = parse_truncation(j["truncation"].get<std::string>());
    if (j.contains("bins")) c.bins = j["bins"].get<int>();
    if (j.contains("bases")) {
        c.bases.clear();
        for (const auto& b : j["bases"]) c.bases.push_back(parse_basis_family(b.get<std::string>()));
    }
    if (j.contains("histogram")) c.histogram = j["histogram"].get<bool>();
    if (j.contains("density_floor")) c.density_floor = j["density_floor"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<unsigned>();
    return c;
}

MarginalExperimentConfig marginal_config_from_json(const Json& j, MarginalExperimentConfig c) {
    reject_unknown(j,
                   {"train", "test", "rounds", "bins", "features_per_round", "max_values", "seed", "workers",
                    "schedule"},
                   "marginal experiment");
    auto paths = [](const Json& a) {
        std::vector<std::filesystem::path> out;
        for (const auto& p : a) out.emplace_back(p.get<std::string>());
        return out;
    };
    if (j.contains("train")) c.train_files = paths(j["train"]);
    if (j.contains("test")) c.test_files = paths(j["test"]);
    if (j.contains("rounds")) c.rounds = j["rounds"].get<int>();
    if (j.contains("bins")) c.bins = j["bins"].get<int>();
    if (j.contains("features_per_round")) c.features_per_round = j["features_per_round"].get<int>();
    if (j.contains("max_values")) c.max_values = j["max_values"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<unsigned>();
    if (j.contains("schedule")) {
        const auto& s = j["schedule"];
        reject_unknown(s, {"initial_temperature", "cooling", "temperature_steps", "proposals_per_step", "step_scale"},
                       "schedule");
        auto& a = c.schedule;
        if (s.contains("initial_temperature")) a.initial_temperature = s["initial_temperature"].get<double>();
        if (s.contains("cooling")) a.cooling = s["cooling"].get<double>();
        if (s.contains("temperature_steps")) a.temperature_steps = s["temperature_steps"].get<int>();
        if (s.contains("proposals_per_step")) a.proposals_per_step = s["proposals_per_step"].get<int>();
        if (s.contains("step_scale")) a.step_scale = s["step_scale"].get<double>();
    }
    return c;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_grid_csv(std::ostream& out, const std::vector<NamedGrid>& grids) {
    if (grids.empty()) throw std::invalid_argument("no grids to write");
    const int res = grids.front().grid.resolution;
    for (const auto& g : grids)
        if (g.grid.resolution != res) throw std::invalid_argument("grid resolutions differ");
    out << "y1,y2";
    for (const auto& g : grids) out << ',' << g.name;
    out << '\n';
    const auto& c = grids.front().grid.centers;
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
            out << num(c[static_cast<std::size_t>(i)]) << ',' << num(c[static_cast<std::size_t>(j)]);
            for (const auto& g : grids) out << ',' << num(g.grid.at(i, j));
            out << '\n';
        }
}

void write_basis_csv(std::ostream& out, const BasisSpec& spec, int points) {
    if (points < 2) throw std::invalid_argument("need at least 2 points");
    std::vector<double> row(static_cast<std::size_t>(spec.max_degree) + 1);
    out << "y,t,phi\n";
    for (int i = 0; i < points; ++i) {
        const double y = -1.0 + 2.0 * i / (points - 1);
        eval_basis_row(spec, y, row);
        for (int t = 0; t <= spec.max_degree; ++t)
            out << num(y) << ',' << t << ',' << num(row[static_cast<std::size_t>(t)]) << '\n';
    }
}

void write_nonzero_csv(std::ostream& out, const std::vector<NonzeroRow>& rows) {
    out << "layer,source,filters,dead_features,nonzero_percent\n";
    for (const auto& r : rows)
        out << r.layer << ',' << r.source << ',' << r.filters << ',' << r.dead_features << ','
            << num(r.nonzero_percent) << '\n';
}

void write_kl_csv(std::ostream& out, const MarginalExperimentReport& r) {
    out << "layer,family,mean_kl,sd_kl,lo,hi\n";
    for (const auto& l : r.layers)
        for (const auto& f : l.families)
            out << l.nonzero.layer << ',' << to_string(f.family) << ',' << num(f.mean_kl) << ',' << num(f.sd_kl)
                << ',' << num(f.lo) << ',' << num(f.hi) << '\n';
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& r) {
    out << "method,mean,sd,lo,hi,significantly_best\n";
    for (const auto& m : r.methods)
        out << m.method << ',' << num(m.mean) << ',' << num(m.sd) << ',' << num(m.lo) << ',' << num(m.hi) << ','
            << (m.significantly_best ? 1 : 0) << '\n';
}

}  // namespace featcop
