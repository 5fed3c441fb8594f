#include "tmkit/fixtures.hpp"

#include <algorithm>

namespace tmkit {

namespace detail {
struct EmbeddedFile {
  const char* name;
  const char* text;
};
extern const EmbeddedFile kEmbeddedFiles[];
extern const std::size_t kEmbeddedFileCount;
}  // namespace detail

namespace {

struct ScenarioInfo {
  std::string_view scenario;
  std::string_view bundle;
};

constexpr ScenarioInfo kScenarios[] = {
    {"anti_theft_session", "anti_theft"},
    {"fleet_alerts", "fleet_tracking"},
    {"fleet_day", "fleet_tracking"},
};

constexpr ScenarioInfo kDefaults[] = {
    {"anti_theft_session", "anti_theft"},
    {"fleet_day", "fleet_tracking"},
};

}  // namespace

std::vector<std::string> builtin_bundle_names() { return {"anti_theft", "fleet_tracking"}; }

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> out;
  for (const auto& s : kScenarios) out.emplace_back(s.scenario);
  return out;
}

std::string_view fixture_text(std::string_view file_name) {
  for (std::size_t i = 0; i < detail::kEmbeddedFileCount; ++i) {
    if (file_name == detail::kEmbeddedFiles[i].name) return detail::kEmbeddedFiles[i].text;
  }
  throw Error(Errc::UnknownFixture, "no embedded file '" + std::string(file_name) + "'");
}

ParsedBundle builtin_bundle(std::string_view name) {
  const auto names = builtin_bundle_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw Error(Errc::UnknownFixture, "no builtin bundle '" + std::string(name) + "'");
  }
  ParseResult result = parse(fixture_text(std::string(name) + ".tm"));
  if (!result.ok()) {
    throw Error(Errc::Syntax, "builtin bundle '" + std::string(name) + "' does not parse: " +
                                  format_diagnostic(result.diagnostics.front()));
  }
  return std::move(*result.bundle);
}

std::string scenario_bundle(std::string_view scenario_name) {
  for (const auto& s : kScenarios) {
    if (s.scenario == scenario_name) return std::string(s.bundle);
  }
  throw Error(Errc::UnknownFixture, "no builtin scenario '" + std::string(scenario_name) + "'");
}

std::string default_scenario(std::string_view bundle_name) {
  for (const auto& d : kDefaults) {
    if (d.bundle == bundle_name) return std::string(d.scenario);
  }
  throw Error(Errc::UnknownFixture, "no builtin bundle '" + std::string(bundle_name) + "'");
}

Scenario builtin_scenario(std::string_view name) {
  const ParsedBundle bundle = builtin_bundle(scenario_bundle(name));
  auto loaded = load_scenario(fixture_text(std::string(name) + ".scn"), bundle.model);
  if (auto* err = std::get_if<ScenarioError>(&loaded)) {
    throw Error(err->code, "builtin scenario '" + std::string(name) + "': " + err->what());
  }
  return std::get<Scenario>(std::move(loaded));
}

}  // namespace tmkit
