#include <cctype>
#include <charconv>
#include <cstdlib>

#include "tmkit/dsl.hpp"
#include "tmkit/sim.hpp"

namespace tmkit {

std::string ScenarioError::what() const {
  return std::to_string(line) + ":" + std::to_string(column) + ": " + std::string(to_string(code)) + ": " + message;
}

namespace {

struct Fail {
  ScenarioError error;
};

[[noreturn]] void fail(Errc code, int line, std::size_t offset, std::string message) {
  throw Fail{ScenarioError{code, line, static_cast<int>(offset) + 1, std::move(message)}};
}

struct Word {
  std::string_view text;
  std::size_t offset;
};

class LineReader {
 public:
  LineReader(std::string_view line, int number) : line_(line), number_(number) {}

  bool done() {
    skip();
    return pos_ >= line_.size();
  }

  std::size_t offset() const { return pos_; }
  std::string_view rest() const { return line_.substr(pos_); }

  Word word(const char* what) {
    skip();
    if (pos_ >= line_.size()) fail(Errc::Syntax, number_, pos_, std::string("expected ") + what);
    const std::size_t start = pos_;
    if (line_[pos_] == '"') {
      ++pos_;
      while (pos_ < line_.size() && line_[pos_] != '"') {
        if (line_[pos_] == '\\') ++pos_;
        ++pos_;
      }
      if (pos_ >= line_.size()) fail(Errc::Syntax, number_, start, "unterminated string");
      ++pos_;
    }
    while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_]))) {
      if (line_[pos_] == '"') {
        ++pos_;
        while (pos_ < line_.size() && line_[pos_] != '"') {
          if (line_[pos_] == '\\') ++pos_;
          ++pos_;
        }
        if (pos_ >= line_.size()) fail(Errc::Syntax, number_, start, "unterminated string");
      }
      ++pos_;
    }
    return Word{line_.substr(start, pos_ - start), start};
  }

 private:
  void skip() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
  }

  std::string_view line_;
  int number_;
  std::size_t pos_ = 0;
};

Step parse_count(const Word& w, int line, const char* what) {
  Step value = 0;
  auto [ptr, ec] = std::from_chars(w.text.data(), w.text.data() + w.text.size(), value);
  if (ec != std::errc{} || ptr != w.text.data() + w.text.size() || value < 0) {
    fail(Errc::Syntax, line, w.offset, std::string("expected a non-negative integer ") + what + ", got '" +
                                           std::string(w.text) + "'");
  }
  return value;
}

Value parse_value(std::string_view text) {
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
      if (text[i] == '\\' && i + 2 < text.size()) ++i;
      out += text[i];
    }
    return out;
  }
  if (text == "true") return true;
  if (text == "false") return false;
  std::string buffer(text);
  char* end = nullptr;
  const double v = std::strtod(buffer.c_str(), &end);
  if (!buffer.empty() && end == buffer.c_str() + buffer.size() &&
      (std::isdigit(static_cast<unsigned char>(buffer[0])) || buffer[0] == '-' || buffer[0] == '+' ||
       buffer[0] == '.')) {
    return v;
  }
  return std::string(text);
}

StageRef stage_at(const Word& w, int line, const Model& model) {
  auto ref = parse_stage_ref(w.text);
  if (!ref) fail(Errc::Syntax, line, w.offset, "malformed stage reference '" + std::string(w.text) + "'");
  try {
    resolve(model, *ref);
  } catch (const Error& e) {
    fail(Errc::UnresolvedRef, line, w.offset, e.what());
  }
  return *ref;
}

bool is_comment(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  return i == line.size() || line[i] == '#' || line.substr(i, 2) == "//";
}

void parse_line(std::string_view text, int line, const Model& model, Scenario& scenario) {
  LineReader reader(text, line);
  const Word head = reader.word("a directive");
  if (head.text == "maxsteps") {
    scenario.max_steps = parse_count(reader.word("step limit"), line, "step limit");
  } else if (head.text == "inject") {
    Injection inj;
    inj.line = line;
    const Word at = reader.word("'@step'");
    if (at.text.empty() || at.text.front() != '@') fail(Errc::Syntax, line, at.offset, "expected '@step'");
    inj.step = parse_count(Word{at.text.substr(1), at.offset + 1}, line, "step");
    const Word ref = reader.word("a stage reference");
    inj.at = stage_at(ref, line, model);
    if (inj.at.kind != StageKind::Create && inj.at.kind != StageKind::Transfer) {
      fail(Errc::UnresolvedRef, line, ref.offset, "things can only be injected at a create or transfer stage");
    }
    while (!reader.done()) {
      const Word attr = reader.word("attribute");
      const std::size_t eq = attr.text.find('=');
      if (eq == std::string_view::npos || !is_identifier(attr.text.substr(0, eq))) {
        fail(Errc::Syntax, line, attr.offset, "expected name=value, got '" + std::string(attr.text) + "'");
      }
      inj.attributes[std::string(attr.text.substr(0, eq))] = parse_value(attr.text.substr(eq + 1));
    }
    scenario.injections.push_back(std::move(inj));
  } else if (head.text == "guard") {
    GuardRule guard;
    guard.line = line;
    const Word ref = reader.word("a stage reference");
    guard.at = stage_at(ref, line, model);
    if (guard.at.kind != StageKind::Process) {
      fail(Errc::UnresolvedRef, line, ref.offset, "guards sit on process stages");
    }
    const Word when = reader.word("'when'");
    if (when.text != "when") fail(Errc::Syntax, line, when.offset, "expected 'when'");
    reader.done();
    const std::size_t cond_offset = reader.offset();
    std::string_view rest = reader.rest();
    while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.remove_suffix(1);

    std::string_view condition;
    auto ends_with_word = [&](std::string_view w) {
      return rest.size() > w.size() && rest.substr(rest.size() - w.size()) == w &&
             std::isspace(static_cast<unsigned char>(rest[rest.size() - w.size() - 1]));
    };
    if (ends_with_word("gate")) {
      guard.mode = GuardMode::Gate;
      condition = rest.substr(0, rest.size() - 4);
    } else {
      const std::size_t fire = rest.rfind(" fire ");
      if (fire == std::string_view::npos) {
        fail(Errc::Syntax, line, cond_offset + rest.size(), "expected 'fire <trigger>' or 'gate'");
      }
      guard.mode = GuardMode::Fire;
      guard.trigger = std::string(rest.substr(fire + 6));
      while (!guard.trigger.empty() && std::isspace(static_cast<unsigned char>(guard.trigger.front()))) {
        guard.trigger.erase(guard.trigger.begin());
      }
      if (!is_identifier(guard.trigger)) {
        fail(Errc::Syntax, line, cond_offset + fire + 6, "expected a trigger name after 'fire'");
      }
      condition = rest.substr(0, fire);
    }
    auto parsed = parse_expr(condition);
    if (auto* err = std::get_if<ExprParseError>(&parsed)) {
      fail(Errc::Syntax, line, cond_offset + err->offset, "bad condition: " + err->message);
    }
    guard.condition = std::get<Expr>(std::move(parsed));
    if (guard.mode == GuardMode::Fire) {
      const TriggerArc* found = nullptr;
      for (const auto& trig : model.trigger_arcs) {
        if (trig.name == guard.trigger) found = &trig;
      }
      if (found == nullptr) {
        fail(Errc::UnresolvedRef, line, cond_offset, "no trigger named '" + guard.trigger + "'");
      }
      if (found->from != guard.at) {
        fail(Errc::UnresolvedRef, line, cond_offset,
             "trigger '" + guard.trigger + "' starts at " + to_string(found->from) + ", not at " + to_string(guard.at));
      }
    }
    scenario.guards.push_back(std::move(guard));
  } else {
    fail(Errc::Syntax, line, head.offset, "unknown directive '" + std::string(head.text) + "'");
  }
}

}  // namespace

std::variant<Scenario, ScenarioError> load_scenario(std::string_view text, const Model& model) {
  Scenario scenario;
  int line_no = 0;
  std::size_t begin = 0;
  try {
    while (begin <= text.size()) {
      std::size_t end = text.find('\n', begin);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(begin, end - begin);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no;
      if (!is_comment(line)) parse_line(line, line_no, model, scenario);
      begin = end + 1;
    }
  } catch (const Fail& f) {
    return f.error;
  }
  return scenario;
}

}  // namespace tmkit
