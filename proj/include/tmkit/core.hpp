#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tmkit/error.hpp"

namespace tmkit {

// Arrive and Accept are folded into Receive; there is no separate member
// for either.
enum class StageKind : std::uint8_t { Create, Process, Release, Receive, Transfer };

inline constexpr StageKind kAllStageKinds[] = {StageKind::Create, StageKind::Process,
                                               StageKind::Release, StageKind::Receive,
                                               StageKind::Transfer};

/// Lower-case keyword used by the text format ("create", "process", ...).
std::string_view keyword(StageKind kind);
/// Capitalised display name ("Create", "Process", ...).
std::string_view display_name(StageKind kind);
std::optional<StageKind> stage_kind_from_keyword(std::string_view word);

using ThingKind = std::string;
using MachinePath = std::vector<std::string>;

/// Address of one stage: machines from the root, the thing, and the stage kind.
struct StageRef {
  MachinePath machine_path;
  ThingKind thing;
  StageKind kind = StageKind::Create;

  auto operator<=>(const StageRef&) const = default;
  bool operator==(const StageRef&) const = default;
};

/// Dotted form, e.g. "TrackingDevice.Antenna.NavData.receive".
std::string to_string(const StageRef& ref);
std::string join_path(const MachinePath& path);

struct Flow {
  ThingKind thing;
  std::set<StageKind> stages;

  bool operator==(const Flow&) const = default;
};

struct Machine {
  std::string name;
  std::vector<Machine> submachines;
  std::vector<Flow> flows;

  const Flow* find_flow(std::string_view thing) const;
  const Machine* find_submachine(std::string_view name) const;

  bool operator==(const Machine&) const = default;
};

/// Solid arrow: a thing moves between two stages and keeps its identity.
struct FlowArc {
  StageRef from;
  StageRef to;
  std::optional<int> paper_anchor;

  bool operator==(const FlowArc&) const = default;
};

/// Dashed arrow: completion at `from` starts a new flow at `to`.
struct TriggerArc {
  StageRef from;
  StageRef to;
  std::optional<int> paper_anchor;
  /// Optional handle used by scenario guards ("fire <name>").
  std::string name;

  bool operator==(const TriggerArc&) const = default;
};

/// The grand machine. Built once, then shared read-only.
struct Model {
  std::string name;
  std::vector<Machine> root_machines;
  std::vector<FlowArc> flow_arcs;
  std::vector<TriggerArc> trigger_arcs;

  bool operator==(const Model&) const = default;
};

/// Endpoint pair naming an arc (flow or trigger) inside a region.
struct ArcRef {
  StageRef from;
  StageRef to;

  auto operator<=>(const ArcRef&) const = default;
  bool operator==(const ArcRef&) const = default;
};

std::string to_string(const ArcRef& arc);

using RegionElement = std::variant<StageRef, ArcRef>;

std::string to_string(const RegionElement& element);

struct StageHandle {
  const Machine* machine = nullptr;
  const Flow* flow = nullptr;
  StageRef ref;
};

const Machine* find_machine(const Model& model, std::span<const std::string> path);

/// Throws Error{UnknownMachinePath | UnknownThing | StageNotDeclared}.
StageHandle resolve(const Model& model, const StageRef& ref);
bool resolves(const Model& model, const StageRef& ref) noexcept;

/// Every stage the model declares, machines in pre-order, flows in
/// declaration order, kinds in enum order.
std::vector<StageRef> all_stages(const Model& model);
/// Every machine path in pre-order.
std::vector<MachinePath> all_machine_paths(const Model& model);

bool has_flow_arc(const Model& model, const StageRef& from, const StageRef& to);
bool has_trigger_arc(const Model& model, const StageRef& from, const StageRef& to);

struct Subgraph {
  std::set<StageRef> stages;
  std::set<ArcRef> arcs;

  bool empty() const { return stages.empty() && arcs.empty(); }
  bool operator==(const Subgraph&) const = default;
};

Subgraph unite(const Subgraph& a, const Subgraph& b);

/// Throws Error{ElementNotInModel} naming the first element that is not a
/// declared stage or an existing arc.
Subgraph region_subgraph(const Model& model, std::span<const RegionElement> elements);

}  // namespace tmkit
