#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmkit/core.hpp"

namespace tmkit {

using EventId = std::string;

/// An event: a labelled region of the static model, optionally pinned to a
/// time slot.
struct EventDef {
  EventId id;
  std::string label;
  std::vector<RegionElement> region;
  std::optional<int> time_slot;

  bool operator==(const EventDef&) const = default;
};

struct PrecedenceEdge {
  EventId before;
  EventId after;

  auto operator<=>(const PrecedenceEdge&) const = default;
  bool operator==(const PrecedenceEdge&) const = default;
};

/// Declared precedence relation over event ids.
struct Chronology {
  std::vector<PrecedenceEdge> edges;

  bool operator==(const Chronology&) const = default;
};

/// Orders ids so that digit runs compare numerically ("E2" < "E10").
bool natural_less(const std::string& a, const std::string& b);

/// All (a, b) pairs such that b is reachable from a over `edges`.
std::set<std::pair<EventId, EventId>> transitive_closure(const std::vector<PrecedenceEdge>& edges);

}  // namespace tmkit
