#include "tmkit/core.hpp"

#include <algorithm>
#include <functional>

namespace tmkit {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::UnknownMachinePath: return "UnknownMachinePath";
    case Errc::UnknownThing: return "UnknownThing";
    case Errc::StageNotDeclared: return "StageNotDeclared";
    case Errc::ElementNotInModel: return "ElementNotInModel";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::CyclicInduction: return "CyclicInduction";
    case Errc::IdSetMismatch: return "IdSetMismatch";
    case Errc::AmbiguousFlow: return "AmbiguousFlow";
    case Errc::UnresolvedRef: return "UnresolvedRef";
    case Errc::UnknownFixture: return "UnknownFixture";
    case Errc::Syntax: return "Syntax";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

std::string_view keyword(StageKind kind) {
  switch (kind) {
    case StageKind::Create: return "create";
    case StageKind::Process: return "process";
    case StageKind::Release: return "release";
    case StageKind::Receive: return "receive";
    case StageKind::Transfer: return "transfer";
  }
  return "?";
}

std::string_view display_name(StageKind kind) {
  switch (kind) {
    case StageKind::Create: return "Create";
    case StageKind::Process: return "Process";
    case StageKind::Release: return "Release";
    case StageKind::Receive: return "Receive";
    case StageKind::Transfer: return "Transfer";
  }
  return "?";
}

std::optional<StageKind> stage_kind_from_keyword(std::string_view word) {
  for (StageKind kind : kAllStageKinds) {
    if (keyword(kind) == word) return kind;
  }
  return std::nullopt;
}

std::string join_path(const MachinePath& path) {
  std::string out;
  for (const auto& part : path) {
    if (!out.empty()) out += '.';
    out += part;
  }
  return out;
}

std::string to_string(const StageRef& ref) {
  std::string out = join_path(ref.machine_path);
  out += '.';
  out += ref.thing;
  out += '.';
  out += keyword(ref.kind);
  return out;
}

std::string to_string(const ArcRef& arc) { return to_string(arc.from) + " -> " + to_string(arc.to); }

std::string to_string(const RegionElement& element) {
  return std::visit(
      [](const auto& e) -> std::string {
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, ArcRef>) {
          return "(" + to_string(e) + ")";
        } else {
          return to_string(e);
        }
      },
      element);
}

const Flow* Machine::find_flow(std::string_view thing) const {
  auto it = std::find_if(flows.begin(), flows.end(), [&](const Flow& f) { return f.thing == thing; });
  return it == flows.end() ? nullptr : &*it;
}

const Machine* Machine::find_submachine(std::string_view sub) const {
  auto it = std::find_if(submachines.begin(), submachines.end(),
                         [&](const Machine& m) { return m.name == sub; });
  return it == submachines.end() ? nullptr : &*it;
}

const Machine* find_machine(const Model& model, std::span<const std::string> path) {
  if (path.empty()) return nullptr;
  const Machine* current = nullptr;
  for (const auto& root : model.root_machines) {
    if (root.name == path.front()) {
      current = &root;
      break;
    }
  }
  for (std::size_t i = 1; current != nullptr && i < path.size(); ++i) {
    current = current->find_submachine(path[i]);
  }
  return current;
}

StageHandle resolve(const Model& model, const StageRef& ref) {
  const Machine* machine = find_machine(model, ref.machine_path);
  if (machine == nullptr) {
    throw Error(Errc::UnknownMachinePath, "no machine '" + join_path(ref.machine_path) + "'");
  }
  const Flow* flow = machine->find_flow(ref.thing);
  if (flow == nullptr) {
    throw Error(Errc::UnknownThing,
                "machine '" + join_path(ref.machine_path) + "' has no flow for '" + ref.thing + "'");
  }
  if (!flow->stages.contains(ref.kind)) {
    throw Error(Errc::StageNotDeclared, "'" + to_string(ref) + "' is not declared");
  }
  return StageHandle{machine, flow, ref};
}

bool resolves(const Model& model, const StageRef& ref) noexcept {
  const Machine* machine = find_machine(model, ref.machine_path);
  if (machine == nullptr) return false;
  const Flow* flow = machine->find_flow(ref.thing);
  return flow != nullptr && flow->stages.contains(ref.kind);
}

namespace {

void walk(const Machine& machine, MachinePath& path,
          const std::function<void(const Machine&, const MachinePath&)>& visit) {
  path.push_back(machine.name);
  visit(machine, path);
  for (const auto& sub : machine.submachines) walk(sub, path, visit);
  path.pop_back();
}

void walk_model(const Model& model,
                const std::function<void(const Machine&, const MachinePath&)>& visit) {
  MachinePath path;
  for (const auto& root : model.root_machines) walk(root, path, visit);
}

}  // namespace

std::vector<StageRef> all_stages(const Model& model) {
  std::vector<StageRef> out;
  walk_model(model, [&](const Machine& machine, const MachinePath& path) {
    for (const auto& flow : machine.flows) {
      for (StageKind kind : flow.stages) out.push_back(StageRef{path, flow.thing, kind});
    }
  });
  return out;
}

std::vector<MachinePath> all_machine_paths(const Model& model) {
  std::vector<MachinePath> out;
  walk_model(model, [&](const Machine&, const MachinePath& path) { out.push_back(path); });
  return out;
}

bool has_flow_arc(const Model& model, const StageRef& from, const StageRef& to) {
  return std::any_of(model.flow_arcs.begin(), model.flow_arcs.end(),
                     [&](const FlowArc& a) { return a.from == from && a.to == to; });
}

bool has_trigger_arc(const Model& model, const StageRef& from, const StageRef& to) {
  return std::any_of(model.trigger_arcs.begin(), model.trigger_arcs.end(),
                     [&](const TriggerArc& a) { return a.from == from && a.to == to; });
}

Subgraph unite(const Subgraph& a, const Subgraph& b) {
  Subgraph out = a;
  out.stages.insert(b.stages.begin(), b.stages.end());
  out.arcs.insert(b.arcs.begin(), b.arcs.end());
  return out;
}

Subgraph region_subgraph(const Model& model, std::span<const RegionElement> elements) {
  Subgraph out;
  for (const auto& element : elements) {
    if (const auto* stage = std::get_if<StageRef>(&element)) {
      if (!resolves(model, *stage)) {
        throw Error(Errc::ElementNotInModel, "stage " + to_string(*stage));
      }
      out.stages.insert(*stage);
    } else {
      const auto& arc = std::get<ArcRef>(element);
      if (!has_flow_arc(model, arc.from, arc.to) && !has_trigger_arc(model, arc.from, arc.to)) {
        throw Error(Errc::ElementNotInModel, "arc " + to_string(arc));
      }
      out.arcs.insert(arc);
    }
  }
  return out;
}

}  // namespace tmkit
