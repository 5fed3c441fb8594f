#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "dot_check.hpp"
#include "tmkit/dsl.hpp"
#include "tmkit/export.hpp"
#include "tmkit/fixtures.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  const int code = tmcli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, std::string_view needle) { return haystack.find(needle) != std::string::npos; }

const char* kBroken = "model \"B\" {\n  machine A { flow X { create, transfer } }\n  arc A.X.create -> A.X.transfer\n}\n";

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(invoke({"--help"}).code == tmcli::kOk);
  CHECK(invoke({}).code == tmcli::kInputError);
  CHECK(invoke({"frobnicate"}).code == tmcli::kInputError);
  CHECK(invoke({"export", "builtin:anti_theft", "--format", "xml"}).code == tmcli::kInputError);
  CHECK(invoke({"validate", "/no/such/file.tm"}).code == tmcli::kInputError);
  CHECK(invoke({"validate", "builtin:nope"}).code == tmcli::kInputError);
}

TEST_CASE("parse prints canonical text") {
  const Result r = invoke({"parse", "builtin:fleet_tracking"});
  CHECK(r.code == tmcli::kOk);
  CHECK(r.out == tmkit::fixture_text("fleet_tracking.tm"));
  const Result s = invoke({"parse", "-", "--format", "structured"}, std::string(tmkit::fixture_text("anti_theft.tm")));
  CHECK(s.code == tmcli::kOk);
  CHECK(tmkit::bundle_from_structured(s.out).same_structure(tmkit::builtin_bundle("anti_theft")));
  const Result back = invoke({"parse", "-"}, s.out);
  CHECK(back.out == tmkit::fixture_text("anti_theft.tm"));
}

TEST_CASE("parse errors point at the source") {
  const Result r = invoke({"parse", "-"}, "model \"M\" {\n  machine A { flow X { arrive } }\n}\n");
  CHECK(r.code == tmcli::kInputError);
  CHECK(contains(r.err, "<stdin>:2:24: error[UnknownStageKind]"));
}

TEST_CASE("validate") {
  const Result ok = invoke({"validate", "builtin:fleet_tracking"});
  CHECK(ok.code == tmcli::kOk);
  CHECK(contains(ok.out, "structure: ok"));
  const Result bad = invoke({"validate", "-"}, kBroken);
  CHECK(bad.code == tmcli::kValidationFailed);
  CHECK(contains(bad.out, "R1-ILLEGAL-SUCCESSOR"));
}

TEST_CASE("simplify") {
  const Result r = invoke({"simplify", "builtin:fleet_tracking"});
  CHECK(r.code == tmcli::kOk);
  CHECK(contains(r.out, "full diagram: 280"));
  CHECK(contains(r.out, "component view: 21"));
  const Result dot = invoke({"simplify", "builtin:fleet_tracking", "--format", "dot"});
  CHECK(dot.code == tmcli::kOk);
  CHECK(tmtest::check_dot(dot.out).ok);
  CHECK(invoke({"simplify", "-"}, kBroken).code == tmcli::kValidationFailed);
}

TEST_CASE("events") {
  const Result r = invoke({"events", "builtin:anti_theft"});
  CHECK(r.code == tmcli::kOk);
  CHECK(contains(r.out, "id\tlabel\tpredecessors\tfiring_step"));
  CHECK(contains(r.out, "declared chronology: consistent"));
  std::string reversed(tmkit::fixture_text("anti_theft.tm"));
  const auto at = reversed.find("E1 -> E2;");
  REQUIRE(at != std::string::npos);
  reversed.replace(at, 9, "E2 -> E1;");
  CHECK(invoke({"events", "-"}, reversed).code == tmcli::kValidationFailed);
}

TEST_CASE("simulate") {
  const Result r = invoke({"simulate", "builtin:fleet_tracking", "builtin:fleet_day", "--check-chronology"});
  CHECK(r.code == tmcli::kOk);
  CHECK(contains(r.out, "0\t1\tCREATE\tVehicle.IgnitionStatus.create"));
  CHECK(contains(r.err, "chronology: ok (18 of 18 events fired)"));

  const Result zero = invoke({"simulate", "builtin:fleet_tracking", "builtin:fleet_day", "--max-steps", "0", "-q"});
  CHECK(zero.code == tmcli::kOk);

  const Result unresolved = invoke({"simulate", "builtin:fleet_tracking", "-"},
                               "guard TrackingSystem.Speed.process when speed > 1 fire nope\n");
  CHECK(unresolved.code == tmcli::kSimulationError);
  const Result syntax = invoke({"simulate", "builtin:fleet_tracking", "-"}, "inject Vehicle.Speed.create\n");
  CHECK(syntax.code == tmcli::kInputError);
  CHECK(invoke({"simulate", "-", "builtin:fleet_day"}, kBroken).code == tmcli::kSimulationError);
}

TEST_CASE("export") {
  const Result dot = invoke({"export", "builtin:anti_theft", "--format", "dot"});
  CHECK(dot.code == tmcli::kOk);
  CHECK(tmtest::check_dot(dot.out).ok);
  const Result table = invoke({"export", "builtin:anti_theft", "--format", "table"});
  CHECK(table.code == tmcli::kOk);
  CHECK(contains(table.out, "E12\t"));
  const Result json = invoke({"export", "builtin:anti_theft", "--format", "structured"});
  CHECK(json.code == tmcli::kOk);
  CHECK(contains(json.out, "\"tmkit/1\""));
}
