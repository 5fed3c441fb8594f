#include "tmkit/transform.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "tmkit/validate.hpp"

namespace tmkit {

std::size_t diagram_size(const Model& model) {
  return all_stages(model).size() + model.flow_arcs.size() + model.trigger_arcs.size();
}

namespace {

MachinePath truncate(const MachinePath& path, std::optional<std::size_t> depth) {
  if (!depth || path.size() <= *depth) return path;
  return MachinePath(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(*depth));
}

Machine& ensure_machine(std::vector<Machine>& machines, const MachinePath& path, std::size_t level = 0) {
  auto it = std::find_if(machines.begin(), machines.end(), [&](const Machine& m) { return m.name == path[level]; });
  if (it == machines.end()) {
    machines.push_back(Machine{path[level], {}, {}});
    it = std::prev(machines.end());
  }
  if (level + 1 == path.size()) return *it;
  return ensure_machine(it->submachines, path, level + 1);
}

void ensure_transfer(Machine& machine, const ThingKind& thing) {
  for (auto& flow : machine.flows) {
    if (flow.thing == thing) {
      flow.stages.insert(StageKind::Transfer);
      return;
    }
  }
  machine.flows.push_back(Flow{thing, {StageKind::Transfer}});
}

std::vector<EventId> find_cycle(const std::map<EventId, std::set<EventId>>& succ) {
  enum class Mark { White, Grey, Black };
  std::map<EventId, Mark> mark;
  std::vector<EventId> stack;
  std::vector<EventId> cycle;

  auto dfs = [&](auto& self, const EventId& node) -> bool {
    mark[node] = Mark::Grey;
    stack.push_back(node);
    if (auto it = succ.find(node); it != succ.end()) {
      for (const auto& next : it->second) {
        if (mark[next] == Mark::Grey) {
          auto start = std::find(stack.begin(), stack.end(), next);
          cycle.assign(start, stack.end());
          return true;
        }
        if (mark[next] == Mark::White && self(self, next)) return true;
      }
    }
    stack.pop_back();
    mark[node] = Mark::Black;
    return false;
  };
  for (const auto& [node, _] : succ) {
    if (mark[node] == Mark::White && dfs(dfs, node)) return cycle;
  }
  return {};
}

bool edge_less(const PrecedenceEdge& a, const PrecedenceEdge& b) {
  if (a.before != b.before) return natural_less(a.before, b.before);
  return natural_less(a.after, b.after);
}

}  // namespace

ComponentGraph simplify(const Model& model, std::optional<std::size_t> depth) {
  if (depth && *depth == 0) throw Error(Errc::InvalidModel, "component depth must be at least 1");
  const ValidationReport report = validate_structure(model);
  if (!report.passed()) {
    throw Error(Errc::InvalidModel, std::to_string(report.violations.size()) + " structure violation(s), first: " +
                                        report.violations.front().code + " " + report.violations.front().message);
  }

  ComponentGraph graph;
  graph.name = model.name;
  std::set<MachinePath> seen_nodes;
  for (const auto& path : all_machine_paths(model)) {
    MachinePath node = truncate(path, depth);
    if (seen_nodes.insert(node).second) graph.nodes.push_back(std::move(node));
  }

  std::map<std::tuple<MachinePath, MachinePath, ThingKind>, std::vector<ArcRef>> edges;
  for (const auto& arc : model.flow_arcs) {
    if (arc.from.machine_path == arc.to.machine_path) continue;
    MachinePath from = truncate(arc.from.machine_path, depth);
    MachinePath to = truncate(arc.to.machine_path, depth);
    if (from == to) continue;
    edges[{std::move(from), std::move(to), arc.from.thing}].push_back(ArcRef{arc.from, arc.to});
  }
  for (auto& [key, witnesses] : edges) {
    auto& [from, to, thing] = key;
    std::sort(witnesses.begin(), witnesses.end());
    graph.edges.push_back(ComponentEdge{from, to, thing, std::move(witnesses)});
  }
  return graph;
}

Model model_from_components(const ComponentGraph& graph) {
  Model model;
  model.name = graph.name;
  for (const auto& node : graph.nodes) {
    if (!node.empty()) ensure_machine(model.root_machines, node);
  }
  for (const auto& edge : graph.edges) {
    ensure_transfer(ensure_machine(model.root_machines, edge.from), edge.thing);
    ensure_transfer(ensure_machine(model.root_machines, edge.to), edge.thing);
    model.flow_arcs.push_back(FlowArc{StageRef{edge.from, edge.thing, StageKind::Transfer},
                                      StageRef{edge.to, edge.thing, StageKind::Transfer}, std::nullopt});
  }
  return model;
}

std::vector<PrecedenceEdge> transitive_reduction(const std::vector<PrecedenceEdge>& edges) {
  std::map<EventId, std::set<EventId>> succ;
  for (const auto& e : edges) succ[e.before].insert(e.after);

  auto reachable_avoiding_direct = [&](const EventId& from, const EventId& target) {
    std::vector<EventId> stack;
    for (const auto& n : succ[from]) {
      if (n != target) stack.push_back(n);
    }
    std::set<EventId> seen;
    while (!stack.empty()) {
      EventId node = stack.back();
      stack.pop_back();
      if (node == target) return true;
      if (!seen.insert(node).second) continue;
      for (const auto& n : succ[node]) stack.push_back(n);
    }
    return false;
  };

  std::vector<PrecedenceEdge> out;
  std::set<PrecedenceEdge> emitted;
  for (const auto& e : edges) {
    if (emitted.contains(e)) continue;
    if (!reachable_avoiding_direct(e.before, e.after)) {
      out.push_back(e);
      emitted.insert(e);
    }
  }
  std::sort(out.begin(), out.end(), edge_less);
  return out;
}

PrecedenceDag induced_precedence(const Model& model, std::span<const EventDef> events) {
  std::map<StageRef, std::vector<ArcRef>> outgoing;
  for (const auto& arc : model.flow_arcs) outgoing[arc.from].push_back(ArcRef{arc.from, arc.to});
  for (const auto& arc : model.trigger_arcs) outgoing[arc.from].push_back(ArcRef{arc.from, arc.to});
  for (auto& [_, arcs] : outgoing) std::sort(arcs.begin(), arcs.end());

  const std::size_t n = events.size();
  std::vector<std::set<StageRef>> footprint(n);
  std::vector<std::set<ArcRef>> region_arcs(n);
  std::map<StageRef, std::vector<std::size_t>> owners;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& element : events[i].region) {
      if (const auto* stage = std::get_if<StageRef>(&element)) {
        footprint[i].insert(*stage);
      } else {
        const auto& arc = std::get<ArcRef>(element);
        region_arcs[i].insert(arc);
        footprint[i].insert(arc.from);
        footprint[i].insert(arc.to);
      }
    }
    for (const auto& stage : footprint[i]) owners[stage].push_back(i);
  }

  PrecedenceDag dag;
  for (const auto& ev : events) dag.nodes.push_back(ev.id);

  std::map<PrecedenceEdge, PrecedenceDerivation> raw;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<StageRef> visited;
    for (const auto& start : footprint[i]) {
      auto out_it = outgoing.find(start);
      if (out_it == outgoing.end()) continue;
      for (const auto& leaving : out_it->second) {
        if (region_arcs[i].contains(leaving) || footprint[i].contains(leaving.to)) continue;
        std::deque<StageRef> queue{leaving.to};
        while (!queue.empty()) {
          StageRef stage = std::move(queue.front());
          queue.pop_front();
          if (footprint[i].contains(stage) || !visited.insert(stage).second) continue;
          if (auto own = owners.find(stage); own != owners.end()) {
            for (std::size_t j : own->second) {
              PrecedenceEdge edge{events[i].id, events[j].id};
              raw.try_emplace(edge, PrecedenceDerivation{edge.before, edge.after, leaving, stage});
            }
            continue;  // another region blocks the path
          }
          if (auto next = outgoing.find(stage); next != outgoing.end()) {
            for (const auto& arc : next->second) queue.push_back(arc.to);
          }
        }
      }
    }
  }

  std::map<EventId, std::set<EventId>> succ;
  std::vector<PrecedenceEdge> raw_edges;
  for (const auto& [edge, _] : raw) {
    succ[edge.before].insert(edge.after);
    raw_edges.push_back(edge);
  }
  if (auto cycle = find_cycle(succ); !cycle.empty()) {
    std::string text;
    for (const auto& id : cycle) text += id + " -> ";
    text += cycle.front();
    throw Error(Errc::CyclicInduction, "event regions feed each other: " + text);
  }

  dag.edges = transitive_reduction(raw_edges);
  for (const auto& edge : dag.edges) dag.derivations.push_back(raw.at(edge));
  return dag;
}

ConsistencyReport compare_chronology(const Chronology& declared, const PrecedenceDag& induced) {
  const std::set<EventId> ids(induced.nodes.begin(), induced.nodes.end());
  for (const auto& e : declared.edges) {
    for (const auto* id : {&e.before, &e.after}) {
      if (!ids.contains(*id)) throw Error(Errc::IdSetMismatch, "declared chronology names unknown event '" + *id + "'");
    }
  }
  const auto induced_closure = transitive_closure(induced.edges);
  const auto declared_closure = transitive_closure(declared.edges);

  ConsistencyReport report;
  for (const auto& e : declared.edges) {
    if (!induced_closure.contains({e.before, e.after})) report.unsupported.push_back(e);
  }
  for (const auto& [a, b] : induced_closure) {
    if (declared_closure.contains({b, a})) report.contradictions.push_back(PrecedenceEdge{a, b});
  }
  std::sort(report.unsupported.begin(), report.unsupported.end(), edge_less);
  std::sort(report.contradictions.begin(), report.contradictions.end(), edge_less);
  return report;
}

}  // namespace tmkit
