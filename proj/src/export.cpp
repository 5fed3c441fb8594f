#include "tmkit/export.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"

namespace tmkit {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "tmkit/1";

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

void write_cluster(std::ostream& os, const Machine& machine, MachinePath path, int depth) {
  path.push_back(machine.name);
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  os << pad << "subgraph " << quote("cluster_" + join_path(path)) << " {\n";
  os << pad << "  label=" << quote(machine.name) << ";\n";
  for (const auto& flow : machine.flows) {
    for (StageKind kind : flow.stages) {
      const StageRef ref{path, flow.thing, kind};
      os << pad << "  " << quote(to_string(ref)) << " [label="
         << quote(std::string(display_name(kind)) + "(" + flow.thing + ")") << "];\n";
    }
  }
  for (const auto& sub : machine.submachines) write_cluster(os, sub, path, depth + 1);
  os << pad << "}\n";
}

}  // namespace

std::string to_dot(const Model& model) {
  std::ostringstream os;
  os << "digraph " << quote(model.name) << " {\n";
  os << "  compound=true;\n";
  os << "  node [shape=box];\n";
  for (const auto& machine : model.root_machines) write_cluster(os, machine, {}, 1);
  for (const auto& arc : model.flow_arcs) {
    os << "  " << quote(to_string(arc.from)) << " -> " << quote(to_string(arc.to));
    if (arc.paper_anchor) os << " [label=" << quote(std::to_string(*arc.paper_anchor)) << "]";
    os << ";\n";
  }
  for (const auto& arc : model.trigger_arcs) {
    os << "  " << quote(to_string(arc.from)) << " -> " << quote(to_string(arc.to)) << " [style=dashed";
    if (arc.paper_anchor) os << ", label=" << quote(std::to_string(*arc.paper_anchor));
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string to_dot(const ComponentGraph& graph) {
  std::ostringstream os;
  os << "digraph " << quote(graph.name) << " {\n";
  os << "  node [shape=box];\n";
  for (const auto& node : graph.nodes) os << "  " << quote(join_path(node)) << ";\n";
  for (const auto& edge : graph.edges) {
    os << "  " << quote(join_path(edge.from)) << " -> " << quote(join_path(edge.to)) << " [label=" << quote(edge.thing)
       << "];\n";
  }
  os << "}\n";
  return os.str();
}

namespace {

json machine_json(const Machine& machine) {
  json flows = json::array();
  for (const auto& flow : machine.flows) {
    json stages = json::array();
    for (StageKind kind : flow.stages) stages.push_back(std::string(keyword(kind)));
    flows.push_back({{"thing", flow.thing}, {"stages", stages}});
  }
  json subs = json::array();
  for (const auto& sub : machine.submachines) subs.push_back(machine_json(sub));
  return {{"name", machine.name}, {"flows", flows}, {"submachines", subs}};
}

json arc_json(const StageRef& from, const StageRef& to) { return {{"from", to_string(from)}, {"to", to_string(to)}}; }

json value_json(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return std::get<bool>(v);
}

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::Syntax, "malformed document: " + what); }

json load(std::string_view text, const char* kind) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kFormat) malformed("expected format \"tmkit/1\"");
  if (doc.value("kind", "") != kind) malformed(std::string("expected kind \"") + kind + "\"");
  return doc;
}

StageRef stage_from(const json& j) {
  if (!j.is_string()) malformed("stage reference must be a string");
  auto ref = parse_stage_ref(j.get<std::string>());
  if (!ref) malformed("bad stage reference '" + j.get<std::string>() + "'");
  return *ref;
}

Machine machine_from(const json& j) {
  Machine m;
  m.name = j.at("name").get<std::string>();
  for (const auto& f : j.at("flows")) {
    Flow flow;
    flow.thing = f.at("thing").get<std::string>();
    for (const auto& s : f.at("stages")) {
      auto kind = stage_kind_from_keyword(s.get<std::string>());
      if (!kind) malformed("unknown stage kind '" + s.get<std::string>() + "'");
      flow.stages.insert(*kind);
    }
    m.flows.push_back(std::move(flow));
  }
  for (const auto& sub : j.at("submachines")) m.submachines.push_back(machine_from(sub));
  return m;
}

std::optional<int> anchor_from(const json& j) {
  if (!j.contains("anchor") || j.at("anchor").is_null()) return std::nullopt;
  return j.at("anchor").get<int>();
}

Value value_from(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  malformed("attribute values are numbers, strings or booleans");
}

const char* origin_name(Origin o) {
  switch (o) {
    case Origin::Injected: return "injected";
    case Origin::Triggered: return "triggered";
    case Origin::Copied: return "copied";
  }
  return "?";
}

Origin origin_from(const std::string& s) {
  if (s == "injected") return Origin::Injected;
  if (s == "triggered") return Origin::Triggered;
  if (s == "copied") return Origin::Copied;
  malformed("unknown origin '" + s + "'");
}

}  // namespace

std::string to_structured(const ParsedBundle& bundle) {
  const Model& model = bundle.model;
  json machines = json::array();
  for (const auto& m : model.root_machines) machines.push_back(machine_json(m));
  json flows = json::array();
  for (const auto& arc : model.flow_arcs) {
    json j = arc_json(arc.from, arc.to);
    if (arc.paper_anchor) j["anchor"] = *arc.paper_anchor;
    flows.push_back(std::move(j));
  }
  json triggers = json::array();
  for (const auto& arc : model.trigger_arcs) {
    json j = arc_json(arc.from, arc.to);
    if (arc.paper_anchor) j["anchor"] = *arc.paper_anchor;
    if (!arc.name.empty()) j["name"] = arc.name;
    triggers.push_back(std::move(j));
  }
  json events = json::array();
  for (const auto& ev : bundle.events) {
    json region = json::array();
    for (const auto& el : ev.region) {
      if (const auto* s = std::get_if<StageRef>(&el)) {
        region.push_back(to_string(*s));
      } else {
        const auto& a = std::get<ArcRef>(el);
        region.push_back(arc_json(a.from, a.to));
      }
    }
    json j = {{"id", ev.id}, {"label", ev.label}, {"region", region}};
    if (ev.time_slot) j["time_slot"] = *ev.time_slot;
    events.push_back(std::move(j));
  }
  json chronology = json::array();
  for (const auto& e : bundle.chronology.edges) chronology.push_back({e.before, e.after});

  json doc = {{"format", kFormat},     {"kind", "bundle"},         {"name", model.name},
              {"machines", machines},  {"flow_arcs", flows},       {"trigger_arcs", triggers},
              {"events", events},      {"chronology", chronology}};
  return doc.dump(2) + "\n";
}

ParsedBundle bundle_from_structured(std::string_view text) {
  const json doc = load(text, "bundle");
  ParsedBundle bundle;
  try {
    bundle.model.name = doc.at("name").get<std::string>();
    for (const auto& m : doc.at("machines")) bundle.model.root_machines.push_back(machine_from(m));
    for (const auto& a : doc.at("flow_arcs")) {
      bundle.model.flow_arcs.push_back(FlowArc{stage_from(a.at("from")), stage_from(a.at("to")), anchor_from(a)});
    }
    for (const auto& a : doc.at("trigger_arcs")) {
      bundle.model.trigger_arcs.push_back(
          TriggerArc{stage_from(a.at("from")), stage_from(a.at("to")), anchor_from(a), a.value("name", "")});
    }
    for (const auto& e : doc.at("events")) {
      EventDef ev;
      ev.id = e.at("id").get<std::string>();
      ev.label = e.at("label").get<std::string>();
      for (const auto& el : e.at("region")) {
        if (el.is_string()) {
          ev.region.emplace_back(stage_from(el));
        } else {
          ev.region.emplace_back(ArcRef{stage_from(el.at("from")), stage_from(el.at("to"))});
        }
      }
      if (e.contains("time_slot")) ev.time_slot = e.at("time_slot").get<int>();
      bundle.events.push_back(std::move(ev));
    }
    for (const auto& c : doc.at("chronology")) {
      bundle.chronology.edges.push_back(PrecedenceEdge{c.at(0).get<std::string>(), c.at(1).get<std::string>()});
    }
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  return bundle;
}

std::string to_structured(const Trace& trace) {
  json things = json::array();
  for (const auto& t : trace.things) {
    json attrs = json::object();
    for (const auto& [k, v] : t.attributes) attrs[k] = value_json(v);
    json j = {{"id", t.id}, {"kind", t.kind}, {"birth_step", t.birth_step}, {"origin", origin_name(t.origin)},
              {"attributes", attrs}};
    if (t.parent) j["parent"] = *t.parent;
    things.push_back(std::move(j));
  }
  json records = json::array();
  for (const auto& r : trace.records) {
    json j = {{"step", r.step}, {"thing", r.thing}, {"action", std::string(to_string(r.action))}};
    if (const auto* s = std::get_if<StageRef>(&r.element)) {
      j["stage"] = to_string(*s);
    } else {
      const auto& a = std::get<ArcRef>(r.element);
      j["arc"] = arc_json(a.from, a.to);
    }
    records.push_back(std::move(j));
  }
  json firings = json::array();
  for (const auto& f : trace.event_firings) {
    firings.push_back({{"event", f.event}, {"step", f.step}, {"refirings", f.refirings}});
  }
  json doc = {{"format", kFormat},     {"kind", "trace"},    {"steps_run", trace.steps_run},
              {"things", things},      {"records", records}, {"event_firings", firings}};
  return doc.dump(2) + "\n";
}

Trace trace_from_structured(std::string_view text) {
  const json doc = load(text, "trace");
  Trace trace;
  try {
    trace.steps_run = doc.at("steps_run").get<Step>();
    for (const auto& t : doc.at("things")) {
      Thing thing;
      thing.id = t.at("id").get<ThingId>();
      thing.kind = t.at("kind").get<std::string>();
      thing.birth_step = t.at("birth_step").get<Step>();
      thing.origin = origin_from(t.at("origin").get<std::string>());
      if (t.contains("parent")) thing.parent = t.at("parent").get<ThingId>();
      for (const auto& [k, v] : t.at("attributes").items()) thing.attributes[k] = value_from(v);
      trace.things.push_back(std::move(thing));
    }
    for (const auto& r : doc.at("records")) {
      TraceRecord rec;
      rec.step = r.at("step").get<Step>();
      rec.thing = r.at("thing").get<ThingId>();
      auto action = action_from_string(r.at("action").get<std::string>());
      if (!action) malformed("unknown action '" + r.at("action").get<std::string>() + "'");
      rec.action = *action;
      if (r.contains("stage")) {
        rec.element = stage_from(r.at("stage"));
      } else {
        rec.element = ArcRef{stage_from(r.at("arc").at("from")), stage_from(r.at("arc").at("to"))};
      }
      trace.records.push_back(std::move(rec));
    }
    for (const auto& f : doc.at("event_firings")) {
      trace.event_firings.push_back(
          EventFiring{f.at("event").get<std::string>(), f.at("step").get<Step>(), f.at("refirings").get<int>()});
    }
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  return trace;
}

std::string to_event_table(std::span<const EventDef> events, const Chronology& chronology,
                           std::span<const EventFiring> firings) {
  std::map<EventId, std::vector<EventId>> preds;
  for (const auto& e : chronology.edges) preds[e.after].push_back(e.before);
  std::map<EventId, Step> fired;
  for (const auto& f : firings) fired.emplace(f.event, f.step);

  auto clean = [](std::string s) {
    std::replace_if(s.begin(), s.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
    return s;
  };

  std::ostringstream os;
  os << "id\tlabel\tpredecessors\tfiring_step\n";
  for (const auto& ev : events) {
    std::vector<EventId> p = preds[ev.id];
    std::sort(p.begin(), p.end(), natural_less);
    p.erase(std::unique(p.begin(), p.end()), p.end());
    std::string pred_text;
    for (const auto& id : p) pred_text += (pred_text.empty() ? "" : ",") + id;
    auto f = fired.find(ev.id);
    os << clean(ev.id) << '\t' << clean(ev.label) << '\t' << (pred_text.empty() ? "-" : pred_text) << '\t'
       << (f == fired.end() ? std::string("-") : std::to_string(f->second)) << '\n';
  }
  return os.str();
}

}  // namespace tmkit
