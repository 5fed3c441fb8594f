// Recursive-descent parser for .tm bundles. Parsing runs in two passes: the
// syntax pass builds declarations with source positions, the resolution pass
// checks names and arc endpoints against the declared machines.

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "tmkit/dsl.hpp"

namespace tmkit {

namespace {

enum class Tok { Ident, String, Integer, LBrace, RBrace, LParen, RParen, Comma, Dot, Semi, Arrow, At, End };

struct Pos {
  int line = 1;
  int column = 1;
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Pos pos;
};

struct SyntaxError {
  Pos pos;
  std::string message;
  std::string code = "Syntax";
};

std::string describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string";
    case Tok::Integer: return "integer";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Semi: return "';'";
    case Tok::Arrow: return "'->'";
    case Tok::At: return "'@'";
    case Tok::End: return "end of input";
  }
  return "token";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token tok;
      tok.pos = pos_;
      if (at_end()) {
        tok.kind = Tok::End;
        out.push_back(std::move(tok));
        return out;
      }
      const char c = peek();
      if (is_ident_start(c)) {
        while (!at_end() && is_ident_char(peek())) tok.text += advance();
        tok.kind = Tok::Ident;
      } else if (is_digit(c)) {
        while (!at_end() && is_digit(peek())) tok.text += advance();
        tok.kind = Tok::Integer;
      } else if (c == '"') {
        tok.kind = Tok::String;
        tok.text = lex_string();
      } else if (c == '-' && offset_ + 1 < text_.size() && text_[offset_ + 1] == '>') {
        advance();
        advance();
        tok.kind = Tok::Arrow;
      } else {
        switch (c) {
          case '{': tok.kind = Tok::LBrace; break;
          case '}': tok.kind = Tok::RBrace; break;
          case '(': tok.kind = Tok::LParen; break;
          case ')': tok.kind = Tok::RParen; break;
          case ',': tok.kind = Tok::Comma; break;
          case '.': tok.kind = Tok::Dot; break;
          case ';': tok.kind = Tok::Semi; break;
          case '@': tok.kind = Tok::At; break;
          default:
            throw SyntaxError{pos_, "unexpected character '" + printable(c) + "'"};
        }
        advance();
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
  static std::string printable(char c) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x20 || u >= 0x7f) {
      static const char* hex = "0123456789abcdef";
      return std::string("\\x") + hex[u >> 4] + hex[u & 0xf];
    }
    return std::string(1, c);
  }

  bool at_end() const { return offset_ >= text_.size(); }
  char peek() const { return text_[offset_]; }

  char advance() {
    const char c = text_[offset_++];
    if (c == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else if (offset_ >= text_.size() || (static_cast<unsigned char>(text_[offset_]) & 0xC0) != 0x80) {
      // Only the last byte of a UTF-8 sequence advances the column.
      ++pos_.column;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && offset_ + 1 < text_.size() && text_[offset_ + 1] == '/') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        return;
      }
    }
  }

  std::string lex_string() {
    const Pos start = pos_;
    advance();  // opening quote
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') throw SyntaxError{start, "unterminated string"};
      const char c = advance();
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) throw SyntaxError{start, "unterminated string"};
      const Pos esc = pos_;
      switch (advance()) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: throw SyntaxError{esc, "unknown escape sequence in string"};
      }
    }
  }

  std::string_view text_;
  std::size_t offset_ = 0;
  Pos pos_;
};

// ---- syntax pass --------------------------------------------------------

struct RefDecl {
  std::vector<std::string> parts;
  StageRef ref;
  Pos pos;
};

struct FlowDecl {
  std::string thing;
  Pos pos;
  std::vector<std::pair<StageKind, Pos>> stages;
};

struct MachineDecl {
  std::string name;
  Pos pos;
  std::vector<MachineDecl> machines;
  std::vector<FlowDecl> flows;
};

struct ArcDecl {
  bool trigger = false;
  RefDecl from;
  RefDecl to;
  std::optional<int> anchor;
  Pos anchor_pos;
  std::string name;
  Pos pos;
};

struct ElemDecl {
  bool is_arc = false;
  RefDecl from;  // the stage, or the arc tail
  RefDecl to;
  Pos pos;
};

struct EventDecl {
  std::string id;
  std::string label;
  std::vector<ElemDecl> elements;
  std::optional<int> slot;
  Pos pos;
};

struct EdgeDecl {
  std::string before;
  std::string after;
  Pos pos;
};

struct BundleDecl {
  std::string name;
  std::vector<MachineDecl> machines;
  std::vector<ArcDecl> arcs;
  std::vector<EventDecl> events;
  std::vector<EdgeDecl> chronology;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  BundleDecl run() {
    BundleDecl bundle;
    expect_keyword("model");
    bundle.name = expect(Tok::String, "model name").text;
    expect(Tok::LBrace, "'{'");
    while (!check(Tok::RBrace)) {
      const Token& tok = current();
      if (tok.kind != Tok::Ident) fail_expected("an item (machine, arc, trigger, event, chronology)");
      if (tok.text == "machine") {
        bundle.machines.push_back(machine());
      } else if (tok.text == "arc" || tok.text == "trigger") {
        bundle.arcs.push_back(arc());
      } else if (tok.text == "event") {
        bundle.events.push_back(event());
      } else if (tok.text == "chronology") {
        chronology(bundle.chronology);
      } else {
        fail_expected("an item (machine, arc, trigger, event, chronology)");
      }
    }
    expect(Tok::RBrace, "'}'");
    if (!check(Tok::End)) fail_expected("end of input after the model block");
    return bundle;
  }

 private:
  const Token& current() const { return tokens_[index_]; }
  bool check(Tok kind) const { return current().kind == kind; }
  bool check_keyword(std::string_view word) const {
    return current().kind == Tok::Ident && current().text == word;
  }

  const Token& take() {
    const Token& tok = tokens_[index_];
    if (tok.kind != Tok::End) ++index_;
    return tok;
  }

  [[noreturn]] void fail_expected(const std::string& what) const {
    const Token& tok = current();
    std::string found = describe(tok.kind);
    if (tok.kind == Tok::Ident) found = "'" + tok.text + "'";
    throw SyntaxError{tok.pos, "expected " + what + ", found " + found};
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (!check(kind)) fail_expected(what);
    return take();
  }

  void expect_keyword(std::string_view word) {
    if (!check_keyword(word)) fail_expected("'" + std::string(word) + "'");
    take();
  }

  int integer(const Token& tok) const {
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (ec != std::errc{}) throw SyntaxError{tok.pos, "integer out of range"};
    return value;
  }

  StageKind stage_kind() {
    const Token& tok = current();
    if (tok.kind != Tok::Ident) fail_expected("a stage kind");
    auto kind = stage_kind_from_keyword(tok.text);
    if (!kind) {
      throw SyntaxError{tok.pos,
                        "unknown stage kind '" + tok.text +
                            "' (expected create, process, release, receive or transfer)",
                        "UnknownStageKind"};
    }
    take();
    return *kind;
  }

  MachineDecl machine() {
    MachineDecl decl;
    decl.pos = take().pos;  // "machine"
    decl.name = expect(Tok::Ident, "machine name").text;
    expect(Tok::LBrace, "'{'");
    while (!check(Tok::RBrace)) {
      if (check_keyword("machine")) {
        decl.machines.push_back(machine());
      } else if (check_keyword("flow")) {
        decl.flows.push_back(flow());
      } else {
        fail_expected("'machine', 'flow' or '}'");
      }
    }
    take();
    return decl;
  }

  FlowDecl flow() {
    FlowDecl decl;
    take();  // "flow"
    decl.pos = current().pos;
    decl.thing = expect(Tok::Ident, "thing name").text;
    expect(Tok::LBrace, "'{'");
    for (;;) {
      const Pos at = current().pos;
      decl.stages.emplace_back(stage_kind(), at);
      if (check(Tok::Comma)) {
        take();
        continue;
      }
      break;
    }
    expect(Tok::RBrace, "',' or '}'");
    return decl;
  }

  RefDecl stage_ref() {
    RefDecl decl;
    decl.pos = current().pos;
    decl.parts.push_back(expect(Tok::Ident, "a stage reference").text);
    Pos last = decl.pos;
    while (check(Tok::Dot)) {
      take();
      last = current().pos;
      decl.parts.push_back(expect(Tok::Ident, "identifier after '.'").text);
    }
    if (decl.parts.size() < 3) {
      throw SyntaxError{decl.pos, "stage reference needs machine.thing.stage, got '" +
                                      join_path(decl.parts) + "'"};
    }
    auto kind = stage_kind_from_keyword(decl.parts.back());
    if (!kind) {
      throw SyntaxError{last, "unknown stage kind '" + decl.parts.back() + "'", "UnknownStageKind"};
    }
    decl.ref.kind = *kind;
    decl.ref.thing = decl.parts[decl.parts.size() - 2];
    decl.ref.machine_path.assign(decl.parts.begin(), decl.parts.end() - 2);
    return decl;
  }

  ArcDecl arc() {
    ArcDecl decl;
    const Token& head = take();
    decl.pos = head.pos;
    decl.trigger = head.text == "trigger";
    decl.from = stage_ref();
    expect(Tok::Arrow, "'->'");
    decl.to = stage_ref();
    if (check(Tok::At)) {
      take();
      const Token& num = expect(Tok::Integer, "anchor number after '@'");
      decl.anchor_pos = num.pos;
      if (int value = integer(num); value != 0) decl.anchor = value;  // @0 marks "no anchor"
    }
    if (decl.trigger && check_keyword("as")) {
      take();
      decl.name = expect(Tok::Ident, "trigger name after 'as'").text;
    }
    return decl;
  }

  ElemDecl element() {
    ElemDecl decl;
    decl.pos = current().pos;
    if (check(Tok::LParen)) {
      take();
      decl.is_arc = true;
      decl.from = stage_ref();
      expect(Tok::Arrow, "'->'");
      decl.to = stage_ref();
      expect(Tok::RParen, "')'");
    } else {
      decl.from = stage_ref();
    }
    return decl;
  }

  EventDecl event() {
    EventDecl decl;
    decl.pos = take().pos;
    decl.id = expect(Tok::Ident, "event id").text;
    decl.label = expect(Tok::String, "event label").text;
    expect_keyword("region");
    expect(Tok::LBrace, "'{'");
    for (;;) {
      decl.elements.push_back(element());
      if (check(Tok::Comma)) {
        take();
        continue;
      }
      break;
    }
    expect(Tok::RBrace, "',' or '}'");
    if (check_keyword("at")) {
      take();
      decl.slot = integer(expect(Tok::Integer, "time slot after 'at'"));
    }
    return decl;
  }

  void chronology(std::vector<EdgeDecl>& out) {
    take();
    expect(Tok::LBrace, "'{'");
    while (!check(Tok::RBrace)) {
      EdgeDecl edge;
      edge.pos = current().pos;
      edge.before = expect(Tok::Ident, "event id or '}'").text;
      expect(Tok::Arrow, "'->'");
      edge.after = expect(Tok::Ident, "event id").text;
      expect(Tok::Semi, "';'");
      out.push_back(std::move(edge));
    }
    take();
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

// ---- resolution pass ----------------------------------------------------

class Resolver {
 public:
  explicit Resolver(std::vector<Diagnostic>& diags) : diags_(diags) {}

  ParsedBundle run(const BundleDecl& decl) {
    ParsedBundle bundle;
    bundle.model.name = decl.name;
    bundle.model.root_machines = machines(decl.machines);
    arcs(decl, bundle.model);
    events(decl, bundle);
    chronology(decl, bundle);
    return bundle;
  }

 private:
  void error(Pos pos, std::string code, std::string message) {
    diags_.push_back(Diagnostic{Severity::Error, pos.line, pos.column, std::move(message), std::move(code)});
  }
  void warning(Pos pos, std::string code, std::string message) {
    diags_.push_back(Diagnostic{Severity::Warning, pos.line, pos.column, std::move(message), std::move(code)});
  }

  std::vector<Machine> machines(const std::vector<MachineDecl>& decls) {
    std::vector<Machine> out;
    std::set<std::string> seen;
    for (const auto& decl : decls) {
      if (!seen.insert(decl.name).second) {
        error(decl.pos, "DuplicateMachine", "machine '" + decl.name + "' is already declared here");
        continue;
      }
      Machine machine;
      machine.name = decl.name;
      std::set<std::string> things;
      for (const auto& flow_decl : decl.flows) {
        if (!things.insert(flow_decl.thing).second) {
          error(flow_decl.pos, "DuplicateThing",
                "machine '" + decl.name + "' already has a flow for '" + flow_decl.thing + "'");
          continue;
        }
        Flow flow{flow_decl.thing, {}};
        for (const auto& [kind, at] : flow_decl.stages) {
          if (!flow.stages.insert(kind).second) {
            error(at, "DuplicateStage",
                  "flow '" + flow_decl.thing + "' lists '" + std::string(keyword(kind)) + "' twice");
          }
        }
        machine.flows.push_back(std::move(flow));
      }
      machine.submachines = machines(decl.machines);
      out.push_back(std::move(machine));
    }
    return out;
  }

  bool check_ref(const Model& model, const RefDecl& ref) {
    try {
      resolve(model, ref.ref);
      return true;
    } catch (const Error& e) {
      std::string message = e.what();
      message.erase(0, message.find(": ") + 2);
      error(ref.pos, std::string(to_string(e.code())), message);
      return false;
    }
  }

  void arcs(const BundleDecl& decl, Model& model) {
    std::set<std::pair<StageRef, StageRef>> seen_flow;
    std::set<std::pair<StageRef, StageRef>> seen_trigger;
    std::set<int> flow_anchors;
    std::set<int> trigger_anchors;
    std::set<std::string> trigger_names;
    for (const auto& arc : decl.arcs) {
      const bool from_ok = check_ref(model, arc.from);
      const bool to_ok = check_ref(model, arc.to);
      if (!from_ok || !to_ok) continue;
      const std::string what = arc.trigger ? "trigger" : "arc";
      auto& seen = arc.trigger ? seen_trigger : seen_flow;
      if (!seen.emplace(arc.from.ref, arc.to.ref).second) {
        error(arc.pos, "DuplicateArc", "duplicate " + what + " " + to_string(arc.from.ref) + " -> " +
                                           to_string(arc.to.ref));
        continue;
      }
      if (!arc.trigger) {
        if (arc.from.ref == arc.to.ref) {
          error(arc.pos, "SelfArc", "arc starts and ends at " + to_string(arc.from.ref));
          continue;
        }
        if (arc.from.ref.thing != arc.to.ref.thing) {
          error(arc.to.pos, "ArcChangesThing",
                "a flow arc keeps its thing; use a trigger to go from '" + arc.from.ref.thing +
                    "' to '" + arc.to.ref.thing + "'");
          continue;
        }
      }
      if (arc.anchor) {
        auto& anchors = arc.trigger ? trigger_anchors : flow_anchors;
        if (!anchors.insert(*arc.anchor).second) {
          error(arc.anchor_pos, "DuplicateAnchor",
                "anchor @" + std::to_string(*arc.anchor) + " is already used by another " + what);
          continue;
        }
      }
      if (!arc.name.empty() && !trigger_names.insert(arc.name).second) {
        error(arc.pos, "DuplicateTrigger", "trigger name '" + arc.name + "' is already used");
        continue;
      }
      if (arc.trigger) {
        model.trigger_arcs.push_back(TriggerArc{arc.from.ref, arc.to.ref, arc.anchor, arc.name});
      } else {
        model.flow_arcs.push_back(FlowArc{arc.from.ref, arc.to.ref, arc.anchor});
      }
    }
  }

  void events(const BundleDecl& decl, ParsedBundle& bundle) {
    std::set<std::string> ids;
    for (const auto& ev : decl.events) {
      if (!ids.insert(ev.id).second) {
        error(ev.pos, "DuplicateEvent", "event '" + ev.id + "' is already declared");
        continue;
      }
      EventDef def{ev.id, ev.label, {}, ev.slot};
      for (const auto& el : ev.elements) {
        if (el.is_arc) {
          ArcRef arc{el.from.ref, el.to.ref};
          if (!has_flow_arc(bundle.model, arc.from, arc.to) &&
              !has_trigger_arc(bundle.model, arc.from, arc.to)) {
            warning(el.pos, "ForeignElement", "event " + ev.id + ": no arc " + to_string(arc));
          }
          def.region.emplace_back(std::move(arc));
        } else {
          if (!resolves(bundle.model, el.from.ref)) {
            warning(el.pos, "ForeignElement", "event " + ev.id + ": no stage " + to_string(el.from.ref));
          }
          def.region.emplace_back(el.from.ref);
        }
      }
      bundle.events.push_back(std::move(def));
    }
  }

  void chronology(const BundleDecl& decl, ParsedBundle& bundle) {
    std::set<std::string> ids;
    for (const auto& ev : bundle.events) ids.insert(ev.id);
    std::set<PrecedenceEdge> seen;
    for (const auto& edge : decl.chronology) {
      for (const auto* id : {&edge.before, &edge.after}) {
        if (!ids.contains(*id)) warning(edge.pos, "UnknownEvent", "chronology names undeclared event '" + *id + "'");
      }
      PrecedenceEdge e{edge.before, edge.after};
      if (!seen.insert(e).second) {
        warning(edge.pos, "DuplicateEdge", "chronology edge " + e.before + " -> " + e.after + " repeated");
        continue;
      }
      bundle.chronology.edges.push_back(std::move(e));
    }
  }

  std::vector<Diagnostic>& diags_;
};

}  // namespace

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!start(text.front())) return false;
  return std::all_of(text.begin(), text.end(), [&](char c) { return start(c) || (c >= '0' && c <= '9'); });
}

std::optional<StageRef> parse_stage_ref(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t dot = text.find('.', begin);
    parts.emplace_back(text.substr(begin, dot == std::string_view::npos ? std::string_view::npos : dot - begin));
    if (!is_identifier(parts.back())) return std::nullopt;
    if (dot == std::string_view::npos) break;
    begin = dot + 1;
  }
  if (parts.size() < 3) return std::nullopt;
  auto kind = stage_kind_from_keyword(parts.back());
  if (!kind) return std::nullopt;
  StageRef ref;
  ref.kind = *kind;
  ref.thing = parts[parts.size() - 2];
  ref.machine_path.assign(parts.begin(), parts.end() - 2);
  return ref;
}

ParseResult parse(std::string_view text) {
  ParseResult result;
  BundleDecl decl;
  try {
    decl = Parser(Lexer(text).run()).run();
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back(
        Diagnostic{Severity::Error, e.pos.line, e.pos.column, e.message, e.code});
    return result;
  }
  std::vector<Diagnostic> diags;
  ParsedBundle bundle = Resolver(diags).run(decl);
  const bool failed = std::any_of(diags.begin(), diags.end(),
                                  [](const Diagnostic& d) { return d.severity == Severity::Error; });
  result.diagnostics = diags;
  if (!failed) {
    bundle.diagnostics = std::move(diags);
    canonicalize(bundle);
    result.bundle = std::move(bundle);
  }
  return result;
}

std::string format_diagnostic(const Diagnostic& d, std::string_view source_name) {
  std::string out;
  if (!source_name.empty()) {
    out += source_name;
    out += ':';
  }
  out += std::to_string(d.line) + ":" + std::to_string(d.column) + ": ";
  out += d.severity == Severity::Error ? "error" : "warning";
  out += "[" + d.code + "]: " + d.message;
  return out;
}

}  // namespace tmkit
