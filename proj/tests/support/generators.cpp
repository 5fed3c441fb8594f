#include "generators.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace tmtest {

using namespace tmkit;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string random_label(Rng& rng) {
  static const char* pieces[] = {"a",  "b",     "Z",  " ",   "x1", "\"", "\\", "\t", "\n",
                                 "é", "→", "#",  "//", "{",  "}",  ",",  "@",  "event"};
  std::string out;
  const int n = uniform(rng, 0, 12);
  for (int i = 0; i < n; ++i) out += pieces[uniform(rng, 0, static_cast<int>(std::size(pieces)) - 1)];
  return out;
}

namespace {

Machine random_machine(Rng& rng, const BundleShape& shape, const std::string& name, int depth,
                       const std::vector<std::string>& things) {
  Machine m;
  m.name = name;
  for (const auto& thing : things) {
    if (!chance(rng, 0.5)) continue;
    Flow flow{thing, {}};
    for (StageKind kind : kAllStageKinds) {
      if (chance(rng, 0.55)) flow.stages.insert(kind);
    }
    if (flow.stages.empty()) flow.stages.insert(StageKind::Transfer);
    m.flows.push_back(std::move(flow));
  }
  if (depth < shape.max_depth) {
    const int children = uniform(rng, 0, shape.max_children);
    for (int i = 0; i < children; ++i) {
      m.submachines.push_back(random_machine(rng, shape, "S" + std::to_string(i), depth + 1, things));
    }
  }
  return m;
}

struct FlowSite {
  MachinePath path;
  const Flow* flow;
};

void collect_sites(const Machine& m, MachinePath path, std::vector<FlowSite>& out) {
  path.push_back(m.name);
  for (const auto& f : m.flows) out.push_back(FlowSite{path, &f});
  for (const auto& sub : m.submachines) collect_sites(sub, path, out);
}

std::vector<std::string> thing_pool(Rng& rng, const BundleShape& shape) {
  std::vector<std::string> things;
  const int n = uniform(rng, 1, shape.max_things);
  for (int i = 0; i < n; ++i) things.push_back("T" + std::to_string(i));
  return things;
}

Model random_machines(Rng& rng, const BundleShape& shape) {
  Model model;
  model.name = chance(rng, 0.5) ? "Model" : random_label(rng);
  const auto things = thing_pool(rng, shape);
  const int roots = uniform(rng, 0, shape.max_roots);
  for (int i = 0; i < roots; ++i) {
    model.root_machines.push_back(random_machine(rng, shape, "M" + std::to_string(i), 1, things));
  }
  return model;
}

std::vector<int> anchor_pool(Rng& rng) {
  std::vector<int> pool(200);
  std::iota(pool.begin(), pool.end(), 1);
  std::shuffle(pool.begin(), pool.end(), rng);
  return pool;
}

}  // namespace

ParsedBundle random_valid_bundle(Rng& rng, const BundleShape& shape) {
  ParsedBundle bundle;
  Model& model = bundle.model;
  model = random_machines(rng, shape);

  std::vector<FlowSite> sites;
  for (const auto& m : model.root_machines) collect_sites(m, {}, sites);

  std::set<std::pair<StageRef, StageRef>> used;
  std::set<StageRef> has_successor;
  std::set<StageRef> has_inward;
  auto add_flow = [&](const StageRef& from, const StageRef& to) {
    if (!used.insert({from, to}).second) return;
    model.flow_arcs.push_back(FlowArc{from, to, std::nullopt});
  };

  for (const auto& site : sites) {
    std::vector<StageKind> kinds(site.flow->stages.begin(), site.flow->stages.end());
    for (StageKind a : kinds) {
      for (StageKind b : kinds) {
        if (a == b || !legal_intra_successor(a, b) || !chance(rng, 0.6)) continue;
        const StageRef from{site.path, site.flow->thing, a};
        const StageRef to{site.path, site.flow->thing, b};
        if (shape.simulation_safe) {
          if (a == StageKind::Transfer) {
            if (has_inward.contains(from)) continue;
            has_inward.insert(from);
          } else {
            if (has_successor.contains(from)) continue;
            has_successor.insert(from);
          }
        }
        add_flow(from, to);
      }
    }
  }
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (i == j || sites[i].path == sites[j].path || sites[i].flow->thing != sites[j].flow->thing) continue;
      if (!sites[i].flow->stages.contains(StageKind::Transfer) || !sites[j].flow->stages.contains(StageKind::Transfer)) {
        continue;
      }
      if (shape.simulation_safe && j < i) continue;
      if (!chance(rng, j > i ? 0.35 : 0.15)) continue;
      add_flow(StageRef{sites[i].path, sites[i].flow->thing, StageKind::Transfer},
               StageRef{sites[j].path, sites[j].flow->thing, StageKind::Transfer});
    }
  }

  struct Endpoint {
    StageRef ref;
    std::size_t site;
  };
  std::vector<Endpoint> sources;
  std::vector<Endpoint> targets;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (StageKind kind : sites[i].flow->stages) {
      const StageRef ref{sites[i].path, sites[i].flow->thing, kind};
      if (legal_trigger_source(kind)) sources.push_back({ref, i});
      if (legal_trigger_target(kind)) targets.push_back({ref, i});
    }
  }
  if (!sources.empty() && !targets.empty()) {
    const int n = uniform(rng, 0, 6);
    std::set<std::pair<StageRef, StageRef>> trig_used;
    for (int k = 0; k < n; ++k) {
      const auto& s = sources[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(sources.size()) - 1))];
      const auto& t = targets[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(targets.size()) - 1))];
      if (s.ref == t.ref) continue;
      if (shape.simulation_safe && t.site <= s.site) continue;
      if (!trig_used.insert({s.ref, t.ref}).second) continue;
      model.trigger_arcs.push_back(TriggerArc{s.ref, t.ref, std::nullopt, ""});
    }
  }

  auto anchors = anchor_pool(rng);
  for (auto& arc : model.flow_arcs) {
    if (chance(rng, 0.4)) {
      arc.paper_anchor = anchors.back();
      anchors.pop_back();
    }
  }
  anchors = anchor_pool(rng);
  for (std::size_t i = 0; i < model.trigger_arcs.size(); ++i) {
    auto& arc = model.trigger_arcs[i];
    if (chance(rng, 0.4)) {
      arc.paper_anchor = anchors.back();
      anchors.pop_back();
    }
    if (chance(rng, 0.6)) arc.name = "t" + std::to_string(i);
  }

  std::vector<RegionElement> elements;
  for (const auto& ref : all_stages(model)) elements.emplace_back(ref);
  for (const auto& arc : model.flow_arcs) elements.emplace_back(ArcRef{arc.from, arc.to});
  for (const auto& arc : model.trigger_arcs) elements.emplace_back(ArcRef{arc.from, arc.to});

  if (!elements.empty()) {
    const int n = uniform(rng, 0, shape.max_events);
    std::set<std::string> ids;
    for (int i = 0; i < n; ++i) {
      EventDef ev;
      ev.id = chance(rng, 0.8) ? "E" + std::to_string(i + 1) : "Ev_" + std::string(1, static_cast<char>('a' + i));
      if (!ids.insert(ev.id).second) continue;
      ev.label = random_label(rng);
      std::vector<RegionElement> pool = elements;
      std::shuffle(pool.begin(), pool.end(), rng);
      const int size = uniform(rng, 1, std::min(4, static_cast<int>(pool.size())));
      ev.region.assign(pool.begin(), pool.begin() + size);
      if (chance(rng, 0.3)) ev.time_slot = uniform(rng, 0, 20);
      bundle.events.push_back(std::move(ev));
    }
    for (std::size_t i = 0; i < bundle.events.size(); ++i) {
      for (std::size_t j = i + 1; j < bundle.events.size(); ++j) {
        if (chance(rng, 0.3)) bundle.chronology.edges.push_back({bundle.events[i].id, bundle.events[j].id});
      }
    }
  }
  canonicalize(bundle);
  return bundle;
}

Model random_arbitrary_model(Rng& rng) {
  BundleShape shape;
  shape.max_roots = 3;
  Model model = random_machines(rng, shape);
  const auto stages = all_stages(model);
  if (stages.empty()) return model;
  auto pick = [&]() -> const StageRef& {
    return stages[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(stages.size()) - 1))];
  };
  const int flows = uniform(rng, 0, 10);
  for (int i = 0; i < flows; ++i) model.flow_arcs.push_back(FlowArc{pick(), pick(), std::nullopt});
  const int triggers = uniform(rng, 0, 5);
  for (int i = 0; i < triggers; ++i) model.trigger_arcs.push_back(TriggerArc{pick(), pick(), std::nullopt, ""});
  return model;
}

Scenario random_scenario(Rng& rng, const Model& model, Step max_steps) {
  Scenario scenario;
  scenario.max_steps = max_steps;
  std::vector<StageRef> entry;
  std::vector<StageRef> process;
  for (const auto& ref : all_stages(model)) {
    if (ref.kind == StageKind::Create || ref.kind == StageKind::Transfer) entry.push_back(ref);
    if (ref.kind == StageKind::Process) process.push_back(ref);
  }
  if (!entry.empty()) {
    const int n = uniform(rng, 0, 8);
    for (int i = 0; i < n; ++i) {
      Injection inj;
      inj.step = uniform(rng, 0, 6);
      inj.at = entry[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(entry.size()) - 1))];
      inj.attributes["level"] = static_cast<double>(uniform(rng, 0, 100));
      if (chance(rng, 0.5)) inj.attributes["tag"] = std::string(chance(rng, 0.5) ? "red" : "blue");
      if (chance(rng, 0.3)) inj.attributes["flag"] = chance(rng, 0.5);
      scenario.injections.push_back(std::move(inj));
    }
  }
  auto condition = [&]() {
    const std::string text = "level > " + std::to_string(uniform(rng, 0, 100)) +
                             (chance(rng, 0.3) ? " or tag == \"red\"" : "");
    return std::get<Expr>(parse_expr(text));
  };
  for (const auto& trig : model.trigger_arcs) {
    if (trig.name.empty() || !chance(rng, 0.5)) continue;
    scenario.guards.push_back(GuardRule{trig.from, condition(), GuardMode::Fire, trig.name, 0});
  }
  for (const auto& ref : process) {
    if (chance(rng, 0.15)) scenario.guards.push_back(GuardRule{ref, condition(), GuardMode::Gate, "", 0});
  }
  return scenario;
}

}  // namespace tmtest
