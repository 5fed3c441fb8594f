#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "tmkit/dsl.hpp"
#include "tmkit/fixtures.hpp"

using namespace tmkit;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::set<int> anchors_of(const Model& m) {
  std::set<int> out;
  for (const auto& a : m.flow_arcs) {
    if (a.paper_anchor) CHECK(out.insert(*a.paper_anchor).second);
  }
  for (const auto& a : m.trigger_arcs) {
    if (a.paper_anchor) CHECK(out.insert(*a.paper_anchor).second);
  }
  return out;
}

std::set<int> numbered_in_notes(std::string_view notes) {
  std::set<int> out;
  const std::regex re(R"(\((\d+)\))");
  const std::string text(notes);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
    out.insert(std::stoi((*it)[1]));
  }
  return out;
}

std::set<int> range(int lo, int hi) {
  std::set<int> out;
  for (int i = lo; i <= hi; ++i) out.insert(i);
  return out;
}

}  // namespace

TEST_CASE("builtin names") {
  CHECK(builtin_bundle_names() == std::vector<std::string>{"anti_theft", "fleet_tracking"});
  CHECK(builtin_scenario_names() == std::vector<std::string>{"anti_theft_session", "fleet_alerts", "fleet_day"});
  CHECK(scenario_bundle("fleet_alerts") == "fleet_tracking");
  CHECK(scenario_bundle("anti_theft_session") == "anti_theft");
  CHECK(default_scenario("fleet_tracking") == "fleet_day");
  CHECK(default_scenario("anti_theft") == "anti_theft_session");
}

TEST_CASE("unknown fixtures") {
  for (auto fn : {+[] { builtin_bundle("nope"); }, +[] { builtin_scenario("nope"); }, +[] { fixture_text("nope.tm"); },
                  +[] { scenario_bundle("nope"); }, +[] { default_scenario("nope"); }}) {
    try {
      fn();
      FAIL("expected UnknownFixture");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownFixture);
    }
  }
}

TEST_CASE("embedded fixtures match the data directory") {
  for (const char* file : {"anti_theft.tm", "fleet_tracking.tm", "fleet_day.scn", "fleet_alerts.scn",
                           "anti_theft_session.scn", "anti_theft.notes.txt", "fleet_tracking.notes.txt"}) {
    CAPTURE(file);
    CHECK(fixture_text(file) == read_file(std::string(TMKIT_DATA_DIR) + "/" + file));
  }
}

TEST_CASE("fixture checksums are pinned") {
  CHECK(tmtest::fnv1a(fixture_text("anti_theft.tm")) == 16327524002702284405ULL);
  CHECK(tmtest::fnv1a(fixture_text("fleet_tracking.tm")) == 16937596298260223910ULL);
}

TEST_CASE("anti-theft fixture") {
  const ParsedBundle b = builtin_bundle("anti_theft");
  CHECK(b.diagnostics.empty());
  REQUIRE(b.events.size() == 12);
  CHECK(b.events.front().label == "Logging in with username and password");
  CHECK(b.events[1].label == "Opening a session");
  std::set<int> anchors = anchors_of(b.model);
  CHECK_FALSE(anchors.contains(19));
  CHECK(numbered_in_notes(fixture_text("anti_theft.notes.txt")).contains(19));
  anchors.insert(19);
  CHECK(anchors == range(1, 23));
}

TEST_CASE("fleet tracking fixture") {
  const ParsedBundle b = builtin_bundle("fleet_tracking");
  CHECK(b.diagnostics.empty());
  REQUIRE(b.events.size() == 18);
  CHECK(all_stages(b.model).size() == 138);
  CHECK(b.model.flow_arcs.size() == 119);
  CHECK(b.model.trigger_arcs.size() == 23);
  CHECK(b.chronology.edges.size() == 15);
  const auto e3 = std::find_if(b.events.begin(), b.events.end(), [](const EventDef& e) { return e.id == "E3"; });
  REQUIRE(e3 != b.events.end());
  CHECK(e3->label == "Satellites send data");
  const std::set<int> noted = numbered_in_notes(fixture_text("fleet_tracking.notes.txt"));
  CHECK(noted.contains(1));
  CHECK(noted.contains(2));
  const std::set<int> anchors = anchors_of(b.model);
  CHECK(anchors == range(3, 49));
}

TEST_CASE("scenarios load against their bundles") {
  CHECK(builtin_scenario("fleet_day").injections.size() == 10);
  CHECK(builtin_scenario("fleet_day").guards.size() == 3);
  CHECK(builtin_scenario("fleet_alerts").injections.size() == 13);
  CHECK(builtin_scenario("anti_theft_session").injections.size() == 1);
}
