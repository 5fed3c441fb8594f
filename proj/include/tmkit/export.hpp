#pragma once

#include <span>
#include <string>
#include <string_view>

#include "tmkit/dsl.hpp"
#include "tmkit/sim.hpp"
#include "tmkit/transform.hpp"

namespace tmkit {

/// Graphviz digraph with one cluster per machine. Trigger arcs are dashed.
std::string to_dot(const Model& model);
std::string to_dot(const ComponentGraph& graph);

/// JSON documents tagged {"format": "tmkit/1", "kind": ...}.
std::string to_structured(const ParsedBundle& bundle);
std::string to_structured(const Trace& trace);

/// Inverse of to_structured. Throw Error{Syntax} on malformed documents.
ParsedBundle bundle_from_structured(std::string_view text);
Trace trace_from_structured(std::string_view text);

/// Tab-separated: id, label, direct predecessors, first firing step.
std::string to_event_table(std::span<const EventDef> events, const Chronology& chronology,
                           std::span<const EventFiring> firings);

}  // namespace tmkit
