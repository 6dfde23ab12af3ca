#pragma once

#include <string>
#include <string_view>

#include "wpc/fusion.hpp"
#include "wpc/metrics.hpp"
#include "wpc/sim.hpp"

namespace wpc {

// Single-line JSON:
// {"workload":..,"level":"IR|ISA|UARCH","metric":..,"value":..,
//  "defined":..,"samples":..,"config":..}
// Undefined observations carry "value": null.
std::string to_json(const MetricObservation& obs);
MetricObservation observation_from_json(std::string_view text);

// {"levels":[{"level":..,"relative":..,"impact":..}, ...]}
std::string to_json(const ImpactVector& impacts);
ImpactVector impact_vector_from_json(std::string_view text);

// Nested {"name":..,"impact":..,"method":..|null,"children":[...]}.
std::string to_json(const BreakdownNode& node);
BreakdownNode breakdown_from_json(std::string_view text);

// Observation-style fields plus the raw counts.
std::string to_json(const SimResult& result);
SimResult sim_result_from_json(std::string_view text);

}  // namespace wpc
