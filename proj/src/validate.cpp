#include "tmkit/validate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tmkit {

void ValidationReport::append(const ValidationReport& other) {
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
}

bool legal_intra_successor(StageKind from, StageKind to) {
  using K = StageKind;
  switch (from) {
    case K::Transfer: return to == K::Receive;
    case K::Receive: return to == K::Process || to == K::Release;
    case K::Process: return to == K::Release;
    case K::Create: return to == K::Process || to == K::Release;
    case K::Release: return to == K::Transfer;
  }
  return false;
}

bool legal_trigger_source(StageKind kind) { return kind == StageKind::Process || kind == StageKind::Create; }
bool legal_trigger_target(StageKind kind) { return kind == StageKind::Create || kind == StageKind::Process; }

namespace {

void duplicate_names(const std::vector<Machine>& machines, const std::string& parent, ValidationReport& report) {
  std::set<std::string> seen;
  for (const auto& m : machines) {
    const std::string path = parent.empty() ? m.name : parent + "." + m.name;
    if (!seen.insert(m.name).second) {
      report.violations.push_back({rule::kDuplicateName, {path}, "sibling machines share the name '" + m.name + "'"});
    }
    std::set<std::string> things;
    for (const auto& f : m.flows) {
      if (!things.insert(f.thing).second) {
        report.violations.push_back(
            {rule::kDuplicateName, {path}, "machine declares two flows for '" + f.thing + "'"});
      }
    }
    duplicate_names(m.submachines, path, report);
  }
}

template <typename Arc>
void duplicate_anchors(const std::vector<Arc>& arcs, const char* what, ValidationReport& report) {
  std::map<int, std::string> seen;
  for (const auto& arc : arcs) {
    if (!arc.paper_anchor) continue;
    const std::string where = to_string(ArcRef{arc.from, arc.to});
    auto [it, inserted] = seen.emplace(*arc.paper_anchor, where);
    if (!inserted) {
      report.violations.push_back({rule::kDuplicateAnchor,
                                   {it->second, where},
                                   std::string(what) + " anchor @" + std::to_string(*arc.paper_anchor) +
                                       " used twice"});
    }
  }
}

bool endpoints_resolve(const Model& model, const StageRef& from, const StageRef& to, const std::string& where,
                       ValidationReport& report) {
  bool ok = true;
  for (const auto* ref : {&from, &to}) {
    if (!resolves(model, *ref)) {
      report.violations.push_back({rule::kUnresolved, {where}, "endpoint " + to_string(*ref) + " does not resolve"});
      ok = false;
    }
  }
  return ok;
}

}  // namespace

ValidationReport validate_structure(const Model& model) {
  ValidationReport report;
  duplicate_names(model.root_machines, "", report);
  duplicate_anchors(model.flow_arcs, "arc", report);
  duplicate_anchors(model.trigger_arcs, "trigger", report);

  for (const auto& arc : model.flow_arcs) {
    const std::string where = to_string(ArcRef{arc.from, arc.to});
    if (!endpoints_resolve(model, arc.from, arc.to, where, report)) continue;
    if (arc.from.thing != arc.to.thing) {
      report.violations.push_back({rule::kArcIdentity, {where}, "flow arc changes the thing; only triggers may"});
      continue;
    }
    if (arc.from.machine_path == arc.to.machine_path) {
      if (!legal_intra_successor(arc.from.kind, arc.to.kind)) {
        report.violations.push_back({rule::kIllegalSuccessor,
                                     {where},
                                     std::string(display_name(arc.from.kind)) + " cannot flow to " +
                                         std::string(display_name(arc.to.kind)) + " inside a machine"});
      }
    } else if (arc.from.kind != StageKind::Transfer || arc.to.kind != StageKind::Transfer) {
      report.violations.push_back({rule::kBoundary,
                                   {where},
                                   "an arc between machines must run Transfer -> Transfer, not " +
                                       std::string(display_name(arc.from.kind)) + " -> " +
                                       std::string(display_name(arc.to.kind))});
    }
  }

  for (const auto& arc : model.trigger_arcs) {
    const std::string where = to_string(ArcRef{arc.from, arc.to});
    if (!endpoints_resolve(model, arc.from, arc.to, where, report)) continue;
    if (!legal_trigger_source(arc.from.kind) || !legal_trigger_target(arc.to.kind)) {
      report.violations.push_back({rule::kTriggerEndpoint,
                                   {where},
                                   "triggers run from Process/Create to Create/Process, not " +
                                       std::string(display_name(arc.from.kind)) + " -> " +
                                       std::string(display_name(arc.to.kind))});
    }
  }
  return report;
}

ValidationReport validate_events(const Model& model, std::span<const EventDef> events) {
  ValidationReport report;
  std::set<EventId> ids;
  for (const auto& ev : events) {
    if (!ids.insert(ev.id).second) {
      report.violations.push_back({rule::kDuplicateEvent, {ev.id}, "event id declared more than once"});
    }
    if (ev.region.empty()) {
      report.violations.push_back({rule::kEmptyRegion, {ev.id}, "event has an empty region"});
      continue;
    }
    for (const auto& element : ev.region) {
      bool present = false;
      if (const auto* stage = std::get_if<StageRef>(&element)) {
        present = resolves(model, *stage);
      } else {
        const auto& arc = std::get<ArcRef>(element);
        present = has_flow_arc(model, arc.from, arc.to) || has_trigger_arc(model, arc.from, arc.to);
      }
      if (!present) {
        report.violations.push_back(
            {rule::kForeignElement, {ev.id, to_string(element)}, "region element is not part of the model"});
      }
    }
  }
  return report;
}

ValidationReport validate_chronology(std::span<const EventDef> events, const Chronology& chronology) {
  ValidationReport report;
  std::set<EventId> known;
  for (const auto& ev : events) known.insert(ev.id);

  std::map<EventId, std::set<EventId>> succ;
  std::map<EventId, int> indegree;
  for (const auto& e : chronology.edges) {
    for (const auto* id : {&e.before, &e.after}) {
      if (!known.contains(*id)) {
        report.violations.push_back(
            {rule::kUnknownEvent, {e.before + " -> " + e.after}, "undeclared event '" + *id + "'"});
      }
      indegree.try_emplace(*id, 0);
    }
    if (succ[e.before].insert(e.after).second) ++indegree[e.after];
  }

  // Kahn's algorithm; whatever cannot be scheduled sits on or behind a cycle.
  std::vector<EventId> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.push_back(id);
  }
  std::size_t scheduled = 0;
  while (!ready.empty()) {
    EventId id = ready.back();
    ready.pop_back();
    ++scheduled;
    for (const auto& next : succ[id]) {
      if (--indegree[next] == 0) ready.push_back(next);
    }
  }
  if (scheduled == indegree.size()) return report;

  // Every unscheduled node keeps an unscheduled predecessor, so walking
  // backwards from any of them must revisit a node.
  std::map<EventId, EventId> pred_in_rest;
  for (const auto& [from, tos] : succ) {
    if (indegree[from] == 0) continue;
    for (const auto& to : tos) {
      if (indegree[to] > 0) pred_in_rest.try_emplace(to, from);
    }
  }
  EventId node;
  for (const auto& [id, deg] : indegree) {
    if (deg > 0) {
      node = id;
      break;
    }
  }
  std::map<EventId, std::size_t> seen_at;
  std::vector<EventId> walk;
  while (!seen_at.contains(node)) {
    seen_at[node] = walk.size();
    walk.push_back(node);
    node = pred_in_rest.at(node);
  }
  std::vector<EventId> cycle(walk.begin() + static_cast<std::ptrdiff_t>(seen_at[node]), walk.end());
  std::reverse(cycle.begin(), cycle.end());
  std::string text;
  for (const auto& id : cycle) text += id + " -> ";
  text += cycle.front();
  report.violations.push_back({rule::kCycle, cycle, "chronology has a cycle: " + text});
  return report;
}

std::string render(const ValidationReport& report) {
  std::ostringstream os;
  for (const auto& v : report.violations) {
    os << v.code << "  " << v.message;
    if (!v.locations.empty()) {
      os << "  [";
      for (std::size_t i = 0; i < v.locations.size(); ++i) os << (i ? ", " : "") << v.locations[i];
      os << ']';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace tmkit
