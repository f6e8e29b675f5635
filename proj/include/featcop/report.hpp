#pragma once

#include "featcop/gcf.hpp"
#include "featcop/harness.hpp"
#include "featcop/marginal.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace featcop {

using Json = nlohmann::ordered_json;

Json to_json(const Distribution& d);
Json to_json(const FamilyFit& f);
Json to_json(const FitReport& r);
Json to_json(const GcdReport& r, std::size_t top_k = 10);
Json to_json(const MomentTensor& m);
Json to_json(const GroupExperimentConfig& c);
Json to_json(const ComparisonReport& r);
Json to_json(const NonzeroRow& r);
Json to_json(const MarginalExperimentReport& r);

/// Unknown keys are rejected so that typos do not silently fall back to defaults.
GroupExperimentConfig group_config_from_json(const Json& j, GroupExperimentConfig base = {});
MarginalExperimentConfig marginal_config_from_json(const Json& j, MarginalExperimentConfig base = {});

/// Stable textual form: two-space indent, trailing newline.
std::string dump(const Json& j);

struct NamedGrid {
    std::string name;
    DensityGrid grid;
};

// CSV writers. Doubles are printed with 17 significant digits.
void write_grid_csv(std::ostream& out, const std::vector<NamedGrid>& grids);
void write_basis_csv(std::ostream& out, const BasisSpec& spec, int points);
void write_nonzero_csv(std::ostream& out, const std::vector<NonzeroRow>& rows);
void write_kl_csv(std::ostream& out, const MarginalExperimentReport& r);
void write_comparison_csv(std::ostream& out, const ComparisonReport& r);

}  // namespace featcop
