#include <algorithm>
#include <sstream>

#include "tmkit/dsl.hpp"

namespace tmkit {

namespace {

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

void write_machine(std::ostream& os, const Machine& machine, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  if (machine.flows.empty() && machine.submachines.empty()) {
    os << indent << "machine " << machine.name << " { }\n";
    return;
  }
  os << indent << "machine " << machine.name << " {\n";
  for (const auto& flow : machine.flows) {
    os << indent << "  flow " << flow.thing << " { ";
    bool first = true;
    for (StageKind kind : flow.stages) {
      if (!first) os << ", ";
      os << keyword(kind);
      first = false;
    }
    os << " }\n";
  }
  for (const auto& sub : machine.submachines) write_machine(os, sub, depth + 1);
  os << indent << "}\n";
}

void write_anchor(std::ostream& os, const std::optional<int>& anchor) {
  if (anchor) os << " @" << *anchor;
}

bool arc_less(const StageRef& af, const StageRef& at, const StageRef& bf, const StageRef& bt) {
  if (af != bf) return af < bf;
  return at < bt;
}

}  // namespace

void canonicalize(ParsedBundle& bundle) {
  auto& model = bundle.model;
  std::stable_sort(model.flow_arcs.begin(), model.flow_arcs.end(), [](const FlowArc& a, const FlowArc& b) {
    return arc_less(a.from, a.to, b.from, b.to);
  });
  std::stable_sort(model.trigger_arcs.begin(), model.trigger_arcs.end(),
                   [](const TriggerArc& a, const TriggerArc& b) { return arc_less(a.from, a.to, b.from, b.to); });
  std::stable_sort(bundle.events.begin(), bundle.events.end(),
                   [](const EventDef& a, const EventDef& b) { return natural_less(a.id, b.id); });
  auto& edges = bundle.chronology.edges;
  auto edge_less = [](const PrecedenceEdge& a, const PrecedenceEdge& b) {
    if (a.before != b.before) return natural_less(a.before, b.before);
    return natural_less(a.after, b.after);
  };
  std::stable_sort(edges.begin(), edges.end(), edge_less);
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

std::string serialize(const ParsedBundle& input) {
  for (const auto& arc : input.model.flow_arcs) {
    for (const auto* ref : {&arc.from, &arc.to}) {
      if (!resolves(input.model, *ref)) throw Error(Errc::DanglingReference, "arc endpoint " + to_string(*ref));
    }
  }
  for (const auto& arc : input.model.trigger_arcs) {
    for (const auto* ref : {&arc.from, &arc.to}) {
      if (!resolves(input.model, *ref)) {
        throw Error(Errc::DanglingReference, "trigger endpoint " + to_string(*ref));
      }
    }
  }

  ParsedBundle bundle = input;
  canonicalize(bundle);

  std::ostringstream os;
  os << "model " << quote(bundle.model.name) << " {\n";
  for (const auto& machine : bundle.model.root_machines) write_machine(os, machine, 1);
  for (const auto& arc : bundle.model.flow_arcs) {
    os << "  arc " << to_string(arc.from) << " -> " << to_string(arc.to);
    write_anchor(os, arc.paper_anchor);
    os << '\n';
  }
  for (const auto& arc : bundle.model.trigger_arcs) {
    os << "  trigger " << to_string(arc.from) << " -> " << to_string(arc.to);
    write_anchor(os, arc.paper_anchor);
    if (!arc.name.empty()) os << " as " << arc.name;
    os << '\n';
  }
  for (const auto& ev : bundle.events) {
    os << "  event " << ev.id << ' ' << quote(ev.label) << " region {\n";
    for (std::size_t i = 0; i < ev.region.size(); ++i) {
      os << "    " << to_string(ev.region[i]) << (i + 1 < ev.region.size() ? ",\n" : "\n");
    }
    os << "  }";
    if (ev.time_slot) os << " at " << *ev.time_slot;
    os << '\n';
  }
  if (!bundle.chronology.edges.empty()) {
    os << "  chronology {\n";
    for (const auto& e : bundle.chronology.edges) os << "    " << e.before << " -> " << e.after << ";\n";
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace tmkit
