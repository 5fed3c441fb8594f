#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tmkit/core.hpp"
#include "tmkit/event.hpp"

namespace tmkit {

struct ComponentEdge {
  MachinePath from;
  MachinePath to;
  ThingKind thing;
  /// Cross-machine arcs collapsed into this edge (at least one).
  std::vector<ArcRef> witnesses;
};

/// Stage-free view of a model: machines become nodes, cross-machine
/// Transfer -> Transfer arcs become thing-labelled edges.
struct ComponentGraph {
  std::string name;
  std::vector<MachinePath> nodes;
  std::vector<ComponentEdge> edges;

  std::size_t size() const { return nodes.size() + edges.size(); }
};

/// Stage count plus flow and trigger arc count.
std::size_t diagram_size(const Model& model);

/// `depth` truncates machine paths (1 = root machines only); nullopt keeps
/// every machine. Arcs whose endpoints collapse onto one node are dropped.
/// Throws Error{InvalidModel} when validate_structure reports violations.
ComponentGraph simplify(const Model& model, std::optional<std::size_t> depth = 1);

/// Inverse construction used to check that simplification is stable: every
/// node becomes a machine, every edge a Transfer -> Transfer arc.
Model model_from_components(const ComponentGraph& graph);

struct PrecedenceDerivation {
  EventId before;
  EventId after;
  /// Arc that leaves the earlier event's region.
  ArcRef leaving;
  /// First stage reached inside the later event's region.
  StageRef reached;
};

struct PrecedenceDag {
  std::vector<EventId> nodes;
  std::vector<PrecedenceEdge> edges;  // transitively reduced
  std::vector<PrecedenceDerivation> derivations;
};

/// Region-to-region dataflow precedence. Eᵢ -> Eⱼ when an arc leaving Eᵢ's
/// region reaches Eⱼ's region along flow/trigger arcs without passing
/// through a third region. Throws Error{CyclicInduction} naming the cycle.
PrecedenceDag induced_precedence(const Model& model, std::span<const EventDef> events);

struct ConsistencyReport {
  /// Declared edges that the induced closure does not contain.
  std::vector<PrecedenceEdge> unsupported;
  /// Induced edges whose reverse is implied by the declared chronology.
  std::vector<PrecedenceEdge> contradictions;

  bool consistent() const { return unsupported.empty() && contradictions.empty(); }
};

/// Throws Error{IdSetMismatch} when the declared chronology names an event
/// the induced DAG does not know.
ConsistencyReport compare_chronology(const Chronology& declared, const PrecedenceDag& induced);

/// Removes every edge implied by a longer path. Input must be acyclic.
std::vector<PrecedenceEdge> transitive_reduction(const std::vector<PrecedenceEdge>& edges);

}  // namespace tmkit
