#include "featcop/report.hpp"

#include <doctest.h>

#include <sstream>

using namespace featcop;

namespace {

FeatureTensor small_layer(std::uint64_t seed) {
    CopulaDatasetSpec s;
    s.kind = CopulaKind::Gaussian;
    s.rho = 0.4;
    s.dims = 5;
    s.n = 3000;
    return synth_copula_dataset(s, seed).first;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("group experiment reports are byte-identical across runs and worker counts") {
    const auto train = small_layer(1), test = small_layer(2);
    GroupExperimentConfig cfg;
    cfg.rounds = 5;
    cfg.seed = 77;
    cfg.workers = 1;
    const auto a = dump(to_json(run_group_experiment(cfg, train, test)));
    cfg.workers = 4;
    const auto b = dump(to_json(run_group_experiment(cfg, train, test)));
    CHECK(a == b);
    cfg.seed = 78;
    CHECK(a != dump(to_json(run_group_experiment(cfg, train, test))));
}

TEST_CASE("report contents") {
    const auto train = small_layer(1), test = small_layer(2);
    GroupExperimentConfig cfg;
    cfg.rounds = 3;
    const auto r = run_group_experiment(cfg, train, test);
    const auto j = to_json(r);
    CHECK(j["protocol"] == kProtocolNote);
    CHECK(j["config"]["truncation"] == "total-degree");
    CHECK(j["methods"].size() == 3);
    CHECK(j["methods"][2]["method"] == "histogram");
    CHECK(j["groups"].size() == 3);
    // Flags recomputed from the stored per-round values agree.
    auto methods = r.methods;
    for (auto& m : methods) m.significantly_best = false;
    mark_significance(methods);
    for (std::size_t i = 0; i < methods.size(); ++i) CHECK(methods[i].significantly_best == r.methods[i].significantly_best);
}

TEST_CASE("config parsing") {
    const auto j = Json::parse(R"({"train": "a.fcpg", "test": "b.fcpg", "group_size": 3, "rounds": 7,
                                   "truncation": "tensor-product", "bases": ["fourier"], "seed": 12})");
    const auto c = group_config_from_json(j);
    CHECK(c.train_file == "a.fcpg");
    CHECK(c.group_size == 3);
    CHECK(c.rounds == 7);
    CHECK(c.effective_truncation() == Truncation::TensorProduct);
    CHECK(c.bases == std::vector<BasisFamily>{BasisFamily::FourierReal});
    CHECK(c.seed == 12);
    CHECK_THROWS_AS(group_config_from_json(Json::parse(R"({"rounds": 7, "roundz": 8})")), std::invalid_argument);

    const auto m = marginal_config_from_json(
        Json::parse(R"({"train": ["l0.fcpg", "l1.fcpg"], "rounds": 5, "schedule": {"cooling": 0.9}})"));
    CHECK(m.train_files.size() == 2);
    CHECK(m.schedule.cooling == 0.9);
    CHECK_THROWS_AS(marginal_config_from_json(Json::parse(R"({"schedule": {"colling": 0.9}})")),
                    std::invalid_argument);
}

TEST_CASE("csv writers") {
    std::ostringstream basis;
    write_basis_csv(basis, BasisSpec(BasisFamily::LegendreNormalized, 2), 3);
    CHECK(basis.str() ==
          "y,t,phi\n"
          "-1,0,0.70710678118654757\n-1,1,-1.2247448713915889\n-1,2,1.5811388300841898\n"
          "0,0,0.70710678118654757\n0,1,0\n0,2,-0.79056941504209488\n"
          "1,0,0.70710678118654757\n1,1,1.2247448713915889\n1,2,1.5811388300841898\n");

    DensityGrid g;
    g.resolution = 2;
    g.centers = {-0.5, 0.5};
    g.values = {1, 2, 3, 4};
    std::ostringstream grid;
    write_grid_csv(grid, {{"a", g}, {"b", g}});
    CHECK(grid.str() == "y1,y2,a,b\n-0.5,-0.5,1,1\n-0.5,0.5,2,2\n0.5,-0.5,3,3\n0.5,0.5,4,4\n");

    std::ostringstream nz;
    write_nonzero_csv(nz, {NonzeroRow{0, "l0", 4, 1, 87.5}});
    CHECK(nz.str() == "layer,source,filters,dead_features,nonzero_percent\n0,l0,4,1,87.5\n");
}

TEST_CASE("fit report json") {
    FitReport r;
    r.families.push_back(summarize(Family::Exponential, {0.1, 0.3}));
    r.families.back().last_fit = Distribution::exponential(2.0);
    r.winner = Family::Exponential;
    const auto j = to_json(r);
    CHECK(j["winner"] == "exponential");
    CHECK(j["families"][0]["last_fit"]["rate"] == 2.0);
    CHECK(j["families"][0]["mean_kl"].get<double>() == doctest::Approx(0.2));
}

}
