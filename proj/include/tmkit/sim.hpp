#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tmkit/core.hpp"
#include "tmkit/event.hpp"
#include "tmkit/expr.hpp"
#include "tmkit/validate.hpp"

namespace tmkit {

using ThingId = std::uint64_t;
using Step = std::int64_t;

struct Injection {
  Step step = 0;
  StageRef at;  // kind is Create or Transfer; the thing kind is at.thing
  Attributes attributes;
  int line = 0;
};

enum class GuardMode {
  /// The named trigger fires only when the condition holds.
  Fire,
  /// Things may enter the stage only when the condition holds.
  Gate,
};

struct GuardRule {
  StageRef at;  // a Process stage
  Expr condition;
  GuardMode mode = GuardMode::Fire;
  std::string trigger;  // trigger name, Fire mode only
  int line = 0;
};

struct Scenario {
  static constexpr Step kDefaultMaxSteps = 1000;

  std::vector<Injection> injections;
  std::vector<GuardRule> guards;
  Step max_steps = kDefaultMaxSteps;
};

struct ScenarioError {
  Errc code = Errc::Syntax;  // Syntax or UnresolvedRef
  int line = 0;
  int column = 0;
  std::string message;

  std::string what() const;
};

/// Parses the line-oriented scenario format and resolves every reference
/// against `model`.
std::variant<Scenario, ScenarioError> load_scenario(std::string_view text, const Model& model);

enum class Action { Enter, Exit, TriggerFire, Create, Drop };

std::string_view to_string(Action action);
std::optional<Action> action_from_string(std::string_view text);

using TraceElement = std::variant<StageRef, ArcRef>;

struct TraceRecord {
  Step step = 0;
  ThingId thing = 0;
  TraceElement element;
  Action action = Action::Enter;

  bool operator==(const TraceRecord&) const = default;
};

enum class Origin { Injected, Triggered, Copied };

struct Thing {
  ThingId id = 0;
  ThingKind kind;
  Attributes attributes;
  Step birth_step = 0;
  Origin origin = Origin::Injected;
  /// Source thing for Triggered, original for Copied.
  std::optional<ThingId> parent;

  bool operator==(const Thing&) const = default;
};

struct EventFiring {
  EventId event;
  Step step = 0;
  /// Number of times the whole region was activated again after the first firing.
  int refirings = 0;

  bool operator==(const EventFiring&) const = default;
};

struct Trace {
  std::vector<TraceRecord> records;
  std::vector<Thing> things;  // ordered by id
  std::vector<EventFiring> event_firings;
  Step steps_run = 0;

  const Thing* find_thing(ThingId id) const;
  bool operator==(const Trace&) const = default;
};

/// Runs the token-flow simulation. Throws Error{InvalidModel} when the model
/// fails structure validation, Error{AmbiguousFlow} when a thing has several
/// possible successors and neither fan-out nor a gate guard decides.
Trace run(const Model& model, const Scenario& scenario);

/// First firing step of every event whose region is fully activated, in
/// firing order.
std::vector<EventFiring> detect_events(const Trace& trace, std::span<const EventDef> events);

struct OrderViolation {
  EventId before;  // required to come first
  EventId after;
  Step before_step = 0;
  Step after_step = 0;
};

/// nullopt when the firings respect the chronology's transitive closure
/// restricted to events that fired.
std::optional<OrderViolation> check_order(std::span<const EventFiring> firings, const Chronology& chronology);

/// Replays a trace against the model: hop legality, conservation, FIFO per
/// stage, trigger causality and non-decreasing steps.
ValidationReport check_trace(const Model& model, const Trace& trace);

}  // namespace tmkit
