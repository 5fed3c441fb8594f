#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tmkit/dsl.hpp"
#include "tmkit/sim.hpp"

namespace tmkit {

/// Names accepted by builtin_bundle: "anti_theft", "fleet_tracking".
std::vector<std::string> builtin_bundle_names();
/// Names accepted by builtin_scenario: "anti_theft_session", "fleet_alerts", "fleet_day".
std::vector<std::string> builtin_scenario_names();

/// Raw text of an embedded data file such as "fleet_tracking.tm".
/// Throws Error{UnknownFixture}.
std::string_view fixture_text(std::string_view file_name);

/// Throws Error{UnknownFixture}.
ParsedBundle builtin_bundle(std::string_view name);
/// Loaded against the bundle it was written for. Throws Error{UnknownFixture}.
Scenario builtin_scenario(std::string_view name);

/// Bundle a builtin scenario runs on.
std::string scenario_bundle(std::string_view scenario_name);
/// Scenario shipped as the default for a builtin bundle.
std::string default_scenario(std::string_view bundle_name);

}  // namespace tmkit
