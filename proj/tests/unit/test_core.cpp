#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "tmkit/core.hpp"
#include "tmkit/dsl.hpp"
#include "tmkit/event.hpp"
#include "tmkit/fixtures.hpp"

using namespace tmkit;

namespace {

Errc code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected tmkit::Error");
  return Errc::Syntax;
}

Model small_model() {
  Model m;
  m.name = "small";
  Machine a{"A", {}, {Flow{"X", {StageKind::Create, StageKind::Release, StageKind::Transfer}}}};
  a.submachines.push_back(Machine{"B", {}, {Flow{"X", {StageKind::Transfer, StageKind::Receive}}}});
  m.root_machines.push_back(a);
  m.flow_arcs.push_back(FlowArc{StageRef{{"A"}, "X", StageKind::Create}, StageRef{{"A"}, "X", StageKind::Release}, 1});
  return m;
}

}  // namespace

TEST_CASE("stage kind keywords round-trip") {
  for (StageKind kind : kAllStageKinds) {
    CHECK(stage_kind_from_keyword(keyword(kind)) == kind);
    CHECK(display_name(kind).size() == keyword(kind).size());
  }
  CHECK_FALSE(stage_kind_from_keyword("arrive").has_value());
  CHECK_FALSE(stage_kind_from_keyword("Create").has_value());
}

TEST_CASE("stage refs print dotted and order lexicographically") {
  const StageRef a{{"A", "B"}, "X", StageKind::Receive};
  CHECK(to_string(a) == "A.B.X.receive");
  CHECK(parse_stage_ref("A.B.X.receive") == a);
  CHECK_FALSE(parse_stage_ref("A.X").has_value());
  CHECK_FALSE(parse_stage_ref("A.X.arrive").has_value());
  CHECK_FALSE(parse_stage_ref("A..X.create").has_value());
  CHECK(StageRef{{"A"}, "X", StageKind::Create} < StageRef{{"A"}, "X", StageKind::Process});
  CHECK(to_string(RegionElement{ArcRef{a, a}}) == "(A.B.X.receive -> A.B.X.receive)");
}

TEST_CASE("resolve reports the first missing level") {
  const Model m = small_model();
  CHECK(resolve(m, StageRef{{"A", "B"}, "X", StageKind::Receive}).machine->name == "B");
  CHECK(code_of([&] { resolve(m, StageRef{{"Z"}, "X", StageKind::Create}); }) == Errc::UnknownMachinePath);
  CHECK(code_of([&] { resolve(m, StageRef{{"A", "Z"}, "X", StageKind::Create}); }) == Errc::UnknownMachinePath);
  CHECK(code_of([&] { resolve(m, StageRef{{"A"}, "Y", StageKind::Create}); }) == Errc::UnknownThing);
  CHECK(code_of([&] { resolve(m, StageRef{{"A"}, "X", StageKind::Process}); }) == Errc::StageNotDeclared);
  CHECK(code_of([&] { resolve(m, StageRef{{}, "X", StageKind::Create}); }) == Errc::UnknownMachinePath);
}

TEST_CASE("resolve is a bijection onto declared stages") {
  auto check_model = [](const Model& m) {
    const auto stages = all_stages(m);
    const std::set<StageRef> declared(stages.begin(), stages.end());
    REQUIRE(declared.size() == stages.size());

    std::set<MachinePath> paths;
    for (const auto& p : all_machine_paths(m)) paths.insert(p);
    paths.insert(MachinePath{"Nowhere"});
    std::set<ThingKind> things{"Unknown"};
    for (const auto& s : stages) things.insert(s.thing);

    for (const auto& path : paths) {
      for (const auto& thing : things) {
        for (StageKind kind : kAllStageKinds) {
          const StageRef ref{path, thing, kind};
          const bool expected = declared.contains(ref);
          REQUIRE(resolves(m, ref) == expected);
          if (!expected) continue;
          const StageHandle h = resolve(m, ref);
          CHECK(h.ref == ref);
          CHECK(h.flow->thing == thing);
          CHECK(h.flow->stages.contains(kind));
        }
      }
    }
  };
  check_model(builtin_bundle("fleet_tracking").model);
  check_model(builtin_bundle("anti_theft").model);
  tmtest::Rng rng(11);
  for (int i = 0; i < 100; ++i) check_model(tmtest::random_valid_bundle(rng).model);
}

TEST_CASE("machine paths form a tree") {
  tmtest::Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const Model m = tmtest::random_valid_bundle(rng).model;
    const auto paths = all_machine_paths(m);
    const std::set<MachinePath> unique(paths.begin(), paths.end());
    REQUIRE(unique.size() == paths.size());
    for (const auto& p : paths) {
      REQUIRE_FALSE(p.empty());
      if (p.size() > 1) CHECK(unique.contains(MachinePath(p.begin(), p.end() - 1)));
      CHECK(find_machine(m, p) != nullptr);
      CHECK(find_machine(m, p)->name == p.back());
    }
  }
}

TEST_CASE("region_subgraph is a union homomorphism") {
  tmtest::Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const ParsedBundle b = tmtest::random_valid_bundle(rng);
    std::vector<RegionElement> pool;
    for (const auto& s : all_stages(b.model)) pool.emplace_back(s);
    for (const auto& a : b.model.flow_arcs) pool.emplace_back(ArcRef{a.from, a.to});
    for (const auto& a : b.model.trigger_arcs) pool.emplace_back(ArcRef{a.from, a.to});
    if (pool.empty()) continue;
    std::vector<RegionElement> x;
    std::vector<RegionElement> y;
    for (const auto& el : pool) {
      if (tmtest::chance(rng, 0.3)) x.push_back(el);
      if (tmtest::chance(rng, 0.3)) y.push_back(el);
    }
    std::vector<RegionElement> xy = x;
    xy.insert(xy.end(), y.begin(), y.end());
    CHECK(region_subgraph(b.model, xy) == unite(region_subgraph(b.model, x), region_subgraph(b.model, y)));
    CHECK(region_subgraph(b.model, std::vector<RegionElement>{}).empty());
  }
}

TEST_CASE("region_subgraph rejects foreign elements") {
  const Model m = small_model();
  const StageRef ghost{{"A"}, "X", StageKind::Process};
  const std::vector<RegionElement> stage_only{ghost};
  CHECK(code_of([&] { region_subgraph(m, stage_only); }) == Errc::ElementNotInModel);
  const StageRef a{{"A"}, "X", StageKind::Release};
  const StageRef b{{"A"}, "X", StageKind::Transfer};
  const std::vector<RegionElement> missing_arc{ArcRef{a, b}};
  CHECK(code_of([&] { region_subgraph(m, missing_arc); }) == Errc::ElementNotInModel);
}

TEST_CASE("natural ordering of event ids") {
  CHECK(natural_less("E2", "E10"));
  CHECK_FALSE(natural_less("E10", "E2"));
  CHECK(natural_less("E9", "E10"));
  CHECK(natural_less("A1", "B0"));
  CHECK(natural_less("E1", "E1a"));
  CHECK_FALSE(natural_less("E1", "E1"));
  std::vector<std::string> ids{"E12", "E3", "E1", "E20", "E2"};
  std::sort(ids.begin(), ids.end(), natural_less);
  CHECK(ids == std::vector<std::string>{"E1", "E2", "E3", "E12", "E20"});
}

TEST_CASE("transitive closure agrees with Floyd-Warshall") {
  tmtest::Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    std::vector<PrecedenceEdge> edges;
    const int n = tmtest::uniform(rng, 1, 7);
    const int m = tmtest::uniform(rng, 0, 12);
    for (int k = 0; k < m; ++k) {
      edges.push_back({"N" + std::to_string(tmtest::uniform(rng, 0, n)), "N" + std::to_string(tmtest::uniform(rng, 0, n))});
    }
    CHECK(transitive_closure(edges) == tmtest::oracle_closure({}, edges));
  }
}

TEST_CASE("errors carry their code in the message") {
  const Error e(Errc::AmbiguousFlow, "two ways out");
  CHECK(e.code() == Errc::AmbiguousFlow);
  CHECK(std::string(e.what()) == "AmbiguousFlow: two ways out");
  CHECK(to_string(Errc::UnknownFixture) == "UnknownFixture");
}
