#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmkit/core.hpp"
#include "tmkit/event.hpp"

namespace tmkit {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  int line = 1;    // 1-based
  int column = 1;  // 1-based, counted in code points
  std::string message;
  std::string code;

  bool operator==(const Diagnostic&) const = default;
};

/// "file:line:col: error[Code]: message"
std::string format_diagnostic(const Diagnostic& d, std::string_view source_name = "");

struct ParsedBundle {
  Model model;
  std::vector<EventDef> events;
  Chronology chronology;
  std::vector<Diagnostic> diagnostics;  // warnings only

  /// Structural equality; diagnostics are not part of the structure.
  bool same_structure(const ParsedBundle& other) const {
    return model == other.model && events == other.events && chronology == other.chronology;
  }
};

/// A bundle, or the diagnostics explaining why there is none. When `bundle`
/// is empty, `diagnostics` holds at least one error.
struct ParseResult {
  std::optional<ParsedBundle> bundle;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return bundle.has_value(); }
};

ParseResult parse(std::string_view text);

/// Canonical text. Throws Error{DanglingReference} when an arc endpoint does
/// not resolve against the bundle's model.
std::string serialize(const ParsedBundle& bundle);

/// Sorts arcs by (from, to), events by id and chronology edges, and drops
/// duplicate chronology edges. The parser returns canonical bundles.
void canonicalize(ParsedBundle& bundle);

/// Parses a dotted stage reference such as "A.B.Thing.process".
std::optional<StageRef> parse_stage_ref(std::string_view text);

/// True for `[A-Za-z_][A-Za-z0-9_]*`.
bool is_identifier(std::string_view text);

}  // namespace tmkit
