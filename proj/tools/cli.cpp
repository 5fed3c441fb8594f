#include "cli.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tmkit/dsl.hpp"
#include "tmkit/export.hpp"
#include "tmkit/fixtures.hpp"
#include "tmkit/sim.hpp"
#include "tmkit/transform.hpp"
#include "tmkit/validate.hpp"

namespace tmcli {

namespace {

using namespace tmkit;

/// Input problem; an empty message means the details were already printed.
struct InputFailure {
  std::string message;
};

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  bool color;

  void error(const std::string& message) const {
    err << (color ? "\033[1;31merror\033[0m" : "error") << ": " << message << '\n';
  }

  void diagnostic(const Diagnostic& d, const std::string& source) const {
    const std::string line = format_diagnostic(d, source);
    if (!color) {
      err << line << '\n';
      return;
    }
    err << (d.severity == Severity::Error ? "\033[31m" : "\033[33m") << line << "\033[0m\n";
  }
};

constexpr std::string_view kBuiltin = "builtin:";

std::string read_source(const std::string& path, const Io& io, const std::string& extension) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << io.in.rdbuf();
    return buffer.str();
  }
  if (path.rfind(kBuiltin, 0) == 0) {
    try {
      return std::string(fixture_text(path.substr(kBuiltin.size()) + extension));
    } catch (const Error& e) {
      throw InputFailure{e.what()};
    }
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw InputFailure{"cannot read '" + path + "'"};
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

std::string source_name(const std::string& path) { return path == "-" ? "<stdin>" : path; }

ParsedBundle load_bundle(const std::string& path, const Io& io) {
  const std::string text = read_source(path, io, ".tm");
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return bundle_from_structured(text);
    } catch (const Error& e) {
      throw InputFailure{source_name(path) + ": " + e.what()};
    }
  }
  ParseResult result = parse(text);
  for (const auto& d : result.diagnostics) io.diagnostic(d, source_name(path));
  if (!result.ok()) throw InputFailure{};
  return std::move(*result.bundle);
}

void emit(const std::string& data, const std::string& out_path, const Io& io) {
  if (out_path.empty() || out_path == "-") {
    io.out << data;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file || !(file << data)) throw InputFailure{"cannot write '" + out_path + "'"};
}

std::string fixed(double value, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << value;
  return os.str();
}

int cmd_parse(const std::string& path, const std::string& format, const std::string& out_path, const Io& io) {
  const ParsedBundle bundle = load_bundle(path, io);
  emit(format == "structured" ? to_structured(bundle) : serialize(bundle), out_path, io);
  return kOk;
}

int cmd_validate(const std::string& path, const Io& io) {
  const ParsedBundle bundle = load_bundle(path, io);
  const ValidationReport reports[] = {
      validate_structure(bundle.model),
      validate_events(bundle.model, bundle.events),
      validate_chronology(bundle.events, bundle.chronology),
  };
  const char* names[] = {"structure", "events", "chronology"};
  bool passed = true;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = reports[i];
    if (r.passed()) {
      io.out << names[i] << ": ok\n";
      continue;
    }
    passed = false;
    io.out << names[i] << ": " << r.violations.size() << " violation(s)\n" << render(r);
  }
  return passed ? kOk : kValidationFailed;
}

int cmd_simplify(const std::string& path, std::optional<std::size_t> depth, const std::string& format,
                 const std::string& out_path, const Io& io) {
  const ParsedBundle bundle = load_bundle(path, io);
  ComponentGraph graph;
  try {
    graph = simplify(bundle.model, depth);
  } catch (const Error& e) {
    io.error(e.what());
    return kValidationFailed;
  }
  const Model& m = bundle.model;
  const std::size_t full = diagram_size(m);
  std::ostringstream summary;
  summary << "model: " << m.name << '\n'
          << "full diagram: " << full << " (stages " << all_stages(m).size() << ", flow arcs " << m.flow_arcs.size()
          << ", trigger arcs " << m.trigger_arcs.size() << ")\n"
          << "component view: " << graph.size() << " (nodes " << graph.nodes.size() << ", edges "
          << graph.edges.size() << ")\n"
          << "reduction: "
          << fixed(full == 0 ? 0.0 : 1.0 - static_cast<double>(graph.size()) / static_cast<double>(full), 3)
          << '\n';
  if (format == "dot") {
    emit(to_dot(graph), out_path, io);
    if (out_path.empty() || out_path == "-") {
      io.err << summary.str();
    } else {
      io.out << summary.str();
    }
  } else {
    emit(summary.str(), out_path, io);
  }
  return kOk;
}

int cmd_events(const std::string& path, const Io& io) {
  const ParsedBundle bundle = load_bundle(path, io);
  io.out << to_event_table(bundle.events, bundle.chronology, {});
  PrecedenceDag dag;
  ConsistencyReport report;
  try {
    dag = induced_precedence(bundle.model, bundle.events);
    report = compare_chronology(bundle.chronology, dag);
  } catch (const Error& e) {
    io.error(e.what());
    return kValidationFailed;
  }
  io.out << "\ninduced precedence:\n";
  for (const auto& d : dag.derivations) {
    io.out << "  " << d.before << " -> " << d.after << "  via " << to_string(d.leaving) << " reaching "
           << to_string(d.reached) << '\n';
  }
  if (report.consistent()) {
    io.out << "declared chronology: consistent\n";
    return kOk;
  }
  for (const auto& e : report.unsupported) io.out << "unsupported: " << e.before << " -> " << e.after << '\n';
  for (const auto& e : report.contradictions) io.out << "contradiction: " << e.before << " -> " << e.after << '\n';
  return kValidationFailed;
}

struct SimulateFlags {
  bool check_chronology = false;
  bool quiet = false;
  std::string trace_path;
  std::optional<Step> max_steps;
};

std::string element_text(const TraceElement& element) {
  if (const auto* s = std::get_if<StageRef>(&element)) return to_string(*s);
  return to_string(std::get<ArcRef>(element));
}

int cmd_simulate(const std::string& model_path, const std::string& scenario_path, const SimulateFlags& flags,
                 const Io& io) {
  const ParsedBundle bundle = load_bundle(model_path, io);
  const std::string text = read_source(scenario_path, io, ".scn");
  auto loaded = load_scenario(text, bundle.model);
  if (auto* e = std::get_if<ScenarioError>(&loaded)) {
    io.error(source_name(scenario_path) + ":" + e->what());
    return e->code == Errc::Syntax ? kInputError : kSimulationError;
  }
  Scenario scenario = std::get<Scenario>(std::move(loaded));
  if (flags.max_steps) scenario.max_steps = *flags.max_steps;

  Trace trace;
  try {
    trace = tmkit::run(bundle.model, scenario);
  } catch (const Error& e) {
    io.error(e.what());
    if (e.code() != Errc::InvalidModel) return kSimulationError;
    io.err << render(validate_structure(bundle.model));
    return kValidationFailed;
  }
  trace.event_firings = detect_events(trace, bundle.events);

  const ValidationReport replay = check_trace(bundle.model, trace);
  if (!replay.passed()) {
    io.error("trace fails replay validation");
    io.err << render(replay);
    return kSimulationError;
  }
  if (!flags.trace_path.empty()) emit(to_structured(trace), flags.trace_path, io);

  if (!flags.quiet) {
    for (const auto& r : trace.records) {
      io.out << r.step << '\t' << r.thing << '\t' << to_string(r.action) << '\t' << element_text(r.element) << '\n';
    }
    io.out << '\n';
  }
  io.out << to_event_table(bundle.events, bundle.chronology, trace.event_firings);

  if (flags.check_chronology) {
    if (auto v = check_order(trace.event_firings, bundle.chronology)) {
      io.error("chronology violated: " + v->before + " (step " + std::to_string(v->before_step) + ") must precede " +
               v->after + " (step " + std::to_string(v->after_step) + ")");
      return kValidationFailed;
    }
    io.err << "chronology: ok (" << trace.event_firings.size() << " of " << bundle.events.size()
           << " events fired)\n";
  }
  return kOk;
}

int cmd_export(const std::string& path, const std::string& format, const std::string& out_path, const Io& io) {
  const ParsedBundle bundle = load_bundle(path, io);
  if (format == "dot") {
    emit(to_dot(bundle.model), out_path, io);
  } else if (format == "structured") {
    emit(to_structured(bundle), out_path, io);
  } else {
    emit(to_event_table(bundle.events, bundle.chronology, {}), out_path, io);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const Options& options) {
  const Io io{in, out, err, options.color};

  CLI::App app{"Thinging-machine models: parse, validate, simplify, simulate, export", "tm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tm 1.0.0");

  std::string path;
  std::string scenario_path;
  std::string format;
  std::string out_path;

  auto* parse_cmd = app.add_subcommand("parse", "Parse a model and print it in canonical form");
  parse_cmd->add_option("model", path, "Model file, '-' or builtin:<name>")->required();
  parse_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "structured"}));
  parse_cmd->add_option("-o,--out", out_path, "Write to a file instead of standard output");

  auto* validate_cmd = app.add_subcommand("validate", "Run structure, event and chronology validation");
  validate_cmd->add_option("model", path, "Model file, '-' or builtin:<name>")->required();

  std::size_t depth = 1;
  bool full_depth = false;
  auto* simplify_cmd = app.add_subcommand("simplify", "Collapse stages into a component view");
  simplify_cmd->add_option("model", path, "Model file, '-' or builtin:<name>")->required();
  simplify_cmd->add_option("--depth", depth, "Machine nesting depth kept as nodes")->check(CLI::PositiveNumber);
  simplify_cmd->add_flag("--full", full_depth, "Keep every machine as a node");
  simplify_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"summary", "dot"}));
  simplify_cmd->add_option("-o,--out", out_path, "Write to a file instead of standard output");

  auto* events_cmd = app.add_subcommand("events", "List events and check the chronology against the model");
  events_cmd->add_option("model", path, "Model file, '-' or builtin:<name>")->required();

  SimulateFlags sim;
  Step max_steps = 0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a scenario and report event firings");
  simulate_cmd->add_option("model", path, "Model file, '-' or builtin:<name>")->required();
  simulate_cmd->add_option("scenario", scenario_path, "Scenario file, '-' or builtin:<name>")->required();
  simulate_cmd->add_flag("--check-chronology", sim.check_chronology, "Fail when firings break the chronology");
  simulate_cmd->add_option("--trace", sim.trace_path, "Write the structured trace to a file");
  auto* max_opt = simulate_cmd->add_option("--max-steps", max_steps, "Override the scenario step limit")
                      ->check(CLI::NonNegativeNumber);
  simulate_cmd->add_flag("-q,--quiet", sim.quiet, "Print only the event table");

  auto* export_cmd = app.add_subcommand("export", "Write the model as DOT, structured JSON or an event table");
  export_cmd->add_option("model", path, "Model file, '-' or builtin:<name>")->required();
  export_cmd->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"dot", "structured", "table"}))
      ->required();
  export_cmd->add_option("-o,--out", out_path, "Write to a file instead of standard output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*parse_cmd) return cmd_parse(path, format, out_path, io);
    if (*validate_cmd) return cmd_validate(path, io);
    if (*simplify_cmd) {
      return cmd_simplify(path, full_depth ? std::nullopt : std::optional<std::size_t>(depth),
                          format.empty() ? "summary" : format, out_path, io);
    }
    if (*events_cmd) return cmd_events(path, io);
    if (*simulate_cmd) {
      if (max_opt->count() > 0) sim.max_steps = max_steps;
      return cmd_simulate(path, scenario_path, sim, io);
    }
    if (*export_cmd) return cmd_export(path, format, out_path, io);
  } catch (const InputFailure& f) {
    if (!f.message.empty()) io.error(f.message);
    return kInputError;
  } catch (const Error& e) {
    io.error(e.what());
    return kInputError;
  }
  return kInputError;
}

}  // namespace tmcli
