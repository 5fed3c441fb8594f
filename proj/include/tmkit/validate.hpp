#pragma once

#include <span>
#include <string>
#include <vector>

#include "tmkit/core.hpp"
#include "tmkit/event.hpp"

namespace tmkit {

// Stable rule codes.
namespace rule {
inline constexpr const char* kUnresolved = "R0-UNRESOLVED";
inline constexpr const char* kArcIdentity = "R0-ARC-IDENTITY";
inline constexpr const char* kDuplicateName = "R0-DUPLICATE-NAME";
inline constexpr const char* kDuplicateAnchor = "R0-DUPLICATE-ANCHOR";
inline constexpr const char* kIllegalSuccessor = "R1-ILLEGAL-SUCCESSOR";
inline constexpr const char* kTriggerEndpoint = "R2-TRIGGER-ENDPOINT";
inline constexpr const char* kBoundary = "R3-BOUNDARY";
// R4 (terminal stages) is reserved and never reported.
inline constexpr const char* kEmptyRegion = "EV-EMPTY-REGION";
inline constexpr const char* kForeignElement = "EV-FOREIGN-ELEMENT";
inline constexpr const char* kDuplicateEvent = "EV-DUPLICATE-ID";
inline constexpr const char* kUnknownEvent = "CH-UNKNOWN-EVENT";
inline constexpr const char* kCycle = "CH-CYCLE";
}  // namespace rule

struct Violation {
  std::string code;
  std::vector<std::string> locations;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }
  void append(const ValidationReport& other);
  bool has(std::string_view code) const;
};

/// Intra-machine successor table: true when `from -> to` may be a flow arc
/// inside one machine.
bool legal_intra_successor(StageKind from, StageKind to);
bool legal_trigger_source(StageKind kind);
bool legal_trigger_target(StageKind kind);

ValidationReport validate_structure(const Model& model);
ValidationReport validate_events(const Model& model, std::span<const EventDef> events);
ValidationReport validate_chronology(std::span<const EventDef> events, const Chronology& chronology);

/// Renders one violation per line: "CODE  message  [loc, loc]".
std::string render(const ValidationReport& report);

}  // namespace tmkit
