#pragma once

#include <json.hpp>

#include "prbfn/cascade_synth.hpp"
#include "prbfn/cell_optimizer.hpp"
#include "prbfn/current_optimizer.hpp"
#include "prbfn/pixel_network.hpp"

namespace prbfn {

// JSON contracts of the pipeline artifacts. Matrix payloads are row-major
// plain arrays so downstream tooling can consume them without Eigen.

nlohmann::json solve_report_to_json(const SolveReport& rep);
SolveReport solve_report_from_json(const nlohmann::json& j);

nlohmann::json cascade_plan_to_json(const CascadePlan& plan);
CascadePlan cascade_plan_from_json(const nlohmann::json& j);

nlohmann::json state_set_to_json(const StateSet& set);
StateSet state_set_from_json(const nlohmann::json& j);

nlohmann::json prune_report_to_json(const PruneReport& rep);

// Debug dump of a multiport network (frequencies plus full Z matrices).
nlohmann::json pixel_network_to_json(const PixelNetwork& net);

}  // namespace prbfn
