#include "tmkit/sim.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace tmkit {

std::string_view to_string(Action action) {
  switch (action) {
    case Action::Enter: return "ENTER";
    case Action::Exit: return "EXIT";
    case Action::TriggerFire: return "TRIGGER-FIRE";
    case Action::Create: return "CREATE";
    case Action::Drop: return "DROP";
  }
  return "?";
}

std::optional<Action> action_from_string(std::string_view text) {
  for (Action a : {Action::Enter, Action::Exit, Action::TriggerFire, Action::Create, Action::Drop}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

const Thing* Trace::find_thing(ThingId id) const {
  if (id >= 1 && id <= things.size() && things[id - 1].id == id) return &things[id - 1];
  for (const auto& t : things) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

namespace {

struct StageInfo {
  StageRef ref;
  std::vector<std::size_t> out;       // flow arc targets, canonical order
  std::vector<std::size_t> triggers;  // indices into Engine::triggers_
  std::vector<const Expr*> gates;
};

struct Resident {
  ThingId id = 0;
  std::size_t stage = 0;
  std::optional<std::size_t> came_from;
};

class Engine {
 public:
  Engine(const Model& model, const Scenario& scenario) : scenario_(scenario) {
    const ValidationReport report = validate_structure(model);
    if (!report.passed()) {
      throw Error(Errc::InvalidModel, "model fails structure validation: " + report.violations.front().code + " " +
                                          report.violations.front().message);
    }
    for (const auto& ref : all_stages(model)) {
      index_.emplace(ref, stages_.size());
      stages_.push_back(StageInfo{ref, {}, {}, {}});
    }
    std::vector<FlowArc> flows = model.flow_arcs;
    std::sort(flows.begin(), flows.end(),
              [](const FlowArc& a, const FlowArc& b) { return ArcRef{a.from, a.to} < ArcRef{b.from, b.to}; });
    for (const auto& arc : flows) stages_[index_.at(arc.from)].out.push_back(index_.at(arc.to));

    triggers_ = model.trigger_arcs;
    std::sort(triggers_.begin(), triggers_.end(),
              [](const TriggerArc& a, const TriggerArc& b) { return ArcRef{a.from, a.to} < ArcRef{b.from, b.to}; });
    fire_guards_.resize(triggers_.size());
    for (std::size_t i = 0; i < triggers_.size(); ++i) stages_[index_.at(triggers_[i].from)].triggers.push_back(i);

    for (const auto& guard : scenario.guards) {
      const std::size_t at = stage_index(guard.at, guard.line);
      if (guard.mode == GuardMode::Gate) {
        stages_[at].gates.push_back(&guard.condition);
        continue;
      }
      auto it = std::find_if(triggers_.begin(), triggers_.end(),
                             [&](const TriggerArc& t) { return t.name == guard.trigger && t.from == guard.at; });
      if (it == triggers_.end()) {
        throw Error(Errc::UnresolvedRef, "line " + std::to_string(guard.line) + ": no trigger '" + guard.trigger +
                                             "' starting at " + to_string(guard.at));
      }
      fire_guards_[static_cast<std::size_t>(it - triggers_.begin())].push_back(&guard.condition);
    }
    for (const auto& inj : scenario.injections) {
      const std::size_t at = stage_index(inj.at, inj.line);
      const StageKind kind = stages_[at].ref.kind;
      if (kind != StageKind::Create && kind != StageKind::Transfer) {
        throw Error(Errc::UnresolvedRef, "line " + std::to_string(inj.line) + ": cannot inject at " + to_string(inj.at));
      }
      injections_.push_back(&inj);
    }
    std::stable_sort(injections_.begin(), injections_.end(),
                     [](const Injection* a, const Injection* b) { return a->step < b->step; });
  }

  Trace run() {
    std::vector<Resident> resident;
    std::size_t next_injection = 0;
    for (Step t = 0; t < scenario_.max_steps; ++t) {
      if (resident.empty() && next_injection == injections_.size()) break;
      trace_.steps_run = t + 1;
      std::vector<Resident> next;
      while (next_injection < injections_.size() && injections_[next_injection]->step <= t) {
        const Injection& inj = *injections_[next_injection++];
        const std::size_t at = index_.at(inj.at);
        const ThingId id = spawn(inj.at.thing, inj.attributes, t, Origin::Injected, std::nullopt);
        record(t, id, inj.at, Action::Create);
        record(t, id, inj.at, Action::Enter);
        next.push_back(Resident{id, at, std::nullopt});
      }
      for (const auto& r : resident) depart(r, t, next);
      resident = std::move(next);
    }
    return std::move(trace_);
  }

 private:
  std::size_t stage_index(const StageRef& ref, int line) const {
    auto it = index_.find(ref);
    if (it == index_.end()) {
      throw Error(Errc::UnresolvedRef, "line " + std::to_string(line) + ": " + to_string(ref) + " is not in the model");
    }
    return it->second;
  }

  ThingId spawn(const ThingKind& kind, Attributes attrs, Step t, Origin origin, std::optional<ThingId> parent) {
    const ThingId id = trace_.things.size() + 1;
    trace_.things.push_back(Thing{id, kind, std::move(attrs), t, origin, parent});
    return id;
  }

  void record(Step t, ThingId id, TraceElement element, Action action) {
    trace_.records.push_back(TraceRecord{t, id, std::move(element), action});
  }

  bool gate_open(std::size_t stage, const Attributes& attrs) const {
    for (const Expr* gate : stages_[stage].gates) {
      if (!gate->holds(attrs)) return false;
    }
    return true;
  }

  std::vector<std::size_t> candidates(const Resident& r) const {
    const StageInfo& here = stages_[r.stage];
    if (here.ref.kind != StageKind::Transfer) return here.out;
    const bool from_outside =
        !r.came_from || stages_[*r.came_from].ref.machine_path != here.ref.machine_path;
    std::vector<std::size_t> inward;
    std::vector<std::size_t> outward;
    for (std::size_t to : here.out) {
      if (stages_[to].ref.machine_path == here.ref.machine_path) {
        inward.push_back(to);
      } else if (!r.came_from || to != *r.came_from) {
        outward.push_back(to);
      }
    }
    if (from_outside && !inward.empty()) return inward;
    return outward;
  }

  void depart(const Resident& r, Step t, std::vector<Resident>& next) {
    const StageInfo& here = stages_[r.stage];

    for (std::size_t k : here.triggers) {
      const Attributes& attrs = trace_.things[r.id - 1].attributes;
      const bool fires = std::all_of(fire_guards_[k].begin(), fire_guards_[k].end(),
                                     [&](const Expr* e) { return e->holds(attrs); });
      if (!fires) continue;
      const TriggerArc& trig = triggers_[k];
      record(t, r.id, ArcRef{trig.from, trig.to}, Action::TriggerFire);
      Attributes inherited = attrs;
      inherited.erase("parent");
      inherited["source"] = static_cast<double>(r.id);
      const ThingId child = spawn(trig.to.thing, std::move(inherited), t, Origin::Triggered, r.id);
      record(t, child, trig.to, Action::Create);
      record(t, child, trig.to, Action::Enter);
      next.push_back(Resident{child, index_.at(trig.to), std::nullopt});
    }

    std::vector<std::size_t> options = candidates(r);
    const Attributes& attrs = trace_.things[r.id - 1].attributes;
    std::vector<std::size_t> open;
    std::vector<std::size_t> gated_open;
    for (std::size_t to : options) {
      if (!gate_open(to, attrs)) continue;
      open.push_back(to);
      if (!stages_[to].gates.empty()) gated_open.push_back(to);
    }
    if (!gated_open.empty()) open = gated_open;

    if (open.empty()) {
      record(t, r.id, here.ref, Action::Drop);
      return;
    }
    if (open.size() == 1) {
      record(t, r.id, here.ref, Action::Exit);
      record(t, r.id, stages_[open[0]].ref, Action::Enter);
      next.push_back(Resident{r.id, open[0], r.stage});
      return;
    }
    const bool fan_out = here.ref.kind == StageKind::Transfer &&
                         std::all_of(open.begin(), open.end(), [&](std::size_t to) {
                           return stages_[to].ref.machine_path != here.ref.machine_path;
                         });
    if (!fan_out) {
      std::string list;
      for (std::size_t to : open) list += (list.empty() ? "" : ", ") + to_string(stages_[to].ref);
      throw Error(Errc::AmbiguousFlow, "thing " + std::to_string(r.id) + " at " + to_string(here.ref) +
                                           " at step " + std::to_string(t) + " could go to " + list);
    }
    record(t, r.id, here.ref, Action::Drop);
    for (std::size_t to : open) {
      Attributes copied = trace_.things[r.id - 1].attributes;
      copied["parent"] = static_cast<double>(r.id);
      const ThingId copy = spawn(here.ref.thing, std::move(copied), t, Origin::Copied, r.id);
      record(t, copy, here.ref, Action::Create);
      record(t, copy, here.ref, Action::Exit);
      record(t, copy, stages_[to].ref, Action::Enter);
      next.push_back(Resident{copy, to, r.stage});
    }
  }

  const Scenario& scenario_;
  std::vector<StageInfo> stages_;
  std::map<StageRef, std::size_t> index_;
  std::vector<TriggerArc> triggers_;
  std::vector<std::vector<const Expr*>> fire_guards_;
  std::vector<const Injection*> injections_;
  Trace trace_;
};

}  // namespace

Trace run(const Model& model, const Scenario& scenario) {
  return Engine(model, scenario).run();
}

std::vector<EventFiring> detect_events(const Trace& trace, std::span<const EventDef> events) {
  struct Tracking {
    std::set<RegionElement> needed;
    std::set<RegionElement> active;
    std::optional<std::size_t> firing;  // index into the result
  };
  std::vector<Tracking> tracking(events.size());
  std::map<RegionElement, std::vector<std::size_t>> watchers;
  for (std::size_t i = 0; i < events.size(); ++i) {
    tracking[i].needed.insert(events[i].region.begin(), events[i].region.end());
    for (const auto& el : tracking[i].needed) watchers[el].push_back(i);
  }

  std::vector<EventFiring> firings;
  auto activate = [&](const RegionElement& el, Step step) {
    auto it = watchers.find(el);
    if (it == watchers.end()) return;
    for (std::size_t i : it->second) {
      Tracking& tr = tracking[i];
      tr.active.insert(el);
      if (tr.active.size() != tr.needed.size()) continue;
      if (!tr.firing) {
        tr.firing = firings.size();
        firings.push_back(EventFiring{events[i].id, step, 0});
      } else {
        ++firings[*tr.firing].refirings;
      }
      tr.active.clear();
    }
  };

  std::map<ThingId, StageRef> last_exit;
  for (const auto& rec : trace.records) {
    switch (rec.action) {
      case Action::Enter: {
        const auto& stage = std::get<StageRef>(rec.element);
        activate(stage, rec.step);
        if (auto it = last_exit.find(rec.thing); it != last_exit.end()) {
          activate(ArcRef{it->second, stage}, rec.step);
          last_exit.erase(it);
        }
        break;
      }
      case Action::Exit: last_exit[rec.thing] = std::get<StageRef>(rec.element); break;
      case Action::TriggerFire: activate(std::get<ArcRef>(rec.element), rec.step); break;
      case Action::Create:
      case Action::Drop: break;
    }
  }
  return firings;
}

std::optional<OrderViolation> check_order(std::span<const EventFiring> firings, const Chronology& chronology) {
  std::map<EventId, Step> fired;
  for (const auto& f : firings) fired.emplace(f.event, f.step);
  for (const auto& [before, after] : transitive_closure(chronology.edges)) {
    auto b = fired.find(before);
    auto a = fired.find(after);
    if (b == fired.end() || a == fired.end()) continue;
    if (b->second > a->second) return OrderViolation{before, after, b->second, a->second};
  }
  return std::nullopt;
}

namespace {

std::string describe(const TraceRecord& rec, std::size_t index) {
  std::string where = std::holds_alternative<StageRef>(rec.element) ? to_string(std::get<StageRef>(rec.element))
                                                                     : to_string(std::get<ArcRef>(rec.element));
  return "#" + std::to_string(index) + " step " + std::to_string(rec.step) + " thing " + std::to_string(rec.thing) +
         " " + std::string(to_string(rec.action)) + " " + where;
}

}  // namespace

ValidationReport check_trace(const Model& model, const Trace& trace) {
  ValidationReport report;
  auto flag = [&](const char* code, std::string message, std::size_t index) {
    report.violations.push_back(Violation{code, {"record " + std::to_string(index)}, std::move(message)});
  };

  std::map<ThingId, const Thing*> things;
  for (const auto& t : trace.things) {
    if (!things.emplace(t.id, &t).second) {
      report.violations.push_back(Violation{"TR-CONSERVATION", {"thing " + std::to_string(t.id)}, "duplicate thing id"});
    }
  }

  struct History {
    int creates = 0;
    bool dropped = false;
    std::optional<StageRef> pending_exit;
    std::optional<StageRef> at;
    std::set<StageRef> entered;  // stages entered so far, any step
  };
  std::map<ThingId, History> history;
  std::map<StageRef, std::deque<ThingId>> queues;
  std::map<StageRef, std::set<ThingId>> resident;

  Step last_step = 0;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const TraceRecord& rec = trace.records[i];
    if (rec.step < last_step) flag("TR-STEP-ORDER", "step goes backwards: " + describe(rec, i), i);
    last_step = std::max(last_step, rec.step);

    auto thing_it = things.find(rec.thing);
    if (thing_it == things.end()) {
      flag("TR-CONSERVATION", "record names an unknown thing: " + describe(rec, i), i);
      continue;
    }
    const Thing& thing = *thing_it->second;
    History& h = history[rec.thing];

    if (rec.action == Action::TriggerFire) {
      const auto& arc = std::get_if<ArcRef>(&rec.element);
      if (arc == nullptr || !has_trigger_arc(model, arc->from, arc->to)) {
        flag("TR-UNKNOWN-ELEMENT", "trigger firing names no trigger arc: " + describe(rec, i), i);
      } else if (!h.at || *h.at != arc->from) {
        flag("TR-CAUSALITY", "trigger fired by a thing not at its source: " + describe(rec, i), i);
      }
      continue;
    }

    const auto* stage = std::get_if<StageRef>(&rec.element);
    if (stage == nullptr || !resolves(model, *stage)) {
      flag("TR-UNKNOWN-ELEMENT", "record names no declared stage: " + describe(rec, i), i);
      continue;
    }
    if (stage->thing != thing.kind) {
      flag("TR-ILLEGAL-HOP", "thing of kind " + thing.kind + " at a stage of another kind: " + describe(rec, i), i);
    }
    if (h.dropped) flag("TR-CONSERVATION", "record after the thing was dropped: " + describe(rec, i), i);
    if (h.pending_exit && rec.action != Action::Enter) {
      flag("TR-ILLEGAL-HOP", "exit not followed by an enter: " + describe(rec, i), i);
      h.pending_exit.reset();
    }

    switch (rec.action) {
      case Action::Create: {
        if (++h.creates > 1) flag("TR-CONSERVATION", "thing created twice: " + describe(rec, i), i);
        if (thing.birth_step != rec.step) flag("TR-CONSERVATION", "creation step differs from birth step", i);
        if (thing.origin == Origin::Triggered) {
          const bool caused =
              i > 0 && trace.records[i - 1].action == Action::TriggerFire && thing.parent &&
              trace.records[i - 1].thing == *thing.parent &&
              std::get_if<ArcRef>(&trace.records[i - 1].element) != nullptr &&
              std::get<ArcRef>(trace.records[i - 1].element).to == *stage;
          if (!caused) flag("TR-CAUSALITY", "triggered thing without a matching trigger firing: " + describe(rec, i), i);
        } else if (thing.origin == Origin::Copied) {
          const bool caused = thing.parent && history[*thing.parent].dropped &&
                              history[*thing.parent].at == *stage;
          if (!caused) flag("TR-CAUSALITY", "copy without its original dropped here: " + describe(rec, i), i);
        }
        h.at = *stage;
        break;
      }
      case Action::Enter: {
        if (h.creates == 0) flag("TR-CONSERVATION", "enter before creation: " + describe(rec, i), i);
        if (h.pending_exit) {
          if (!has_flow_arc(model, *h.pending_exit, *stage)) {
            flag("TR-ILLEGAL-HOP", "no flow arc " + to_string(*h.pending_exit) + " -> " + to_string(*stage), i);
          }
          h.pending_exit.reset();
        } else if (!h.at || *h.at != *stage || h.entered.contains(*stage)) {
          flag("TR-ILLEGAL-HOP", "enter without a preceding exit or creation here: " + describe(rec, i), i);
        }
        h.at = *stage;
        h.entered.insert(*stage);
        queues[*stage].push_back(rec.thing);
        resident[*stage].insert(rec.thing);
        break;
      }
      case Action::Exit:
      case Action::Drop: {
        if (!h.at || *h.at != *stage) flag("TR-ILLEGAL-HOP", "leaves a stage it is not at: " + describe(rec, i), i);
        if (resident[*stage].erase(rec.thing) > 0) {
          auto& q = queues[*stage];
          if (q.front() != rec.thing) {
            flag("TR-FIFO", "thing " + std::to_string(rec.thing) + " overtakes thing " + std::to_string(q.front()) +
                                " at " + to_string(*stage),
                 i);
            q.erase(std::find(q.begin(), q.end(), rec.thing));
          } else {
            q.pop_front();
          }
        }
        if (rec.action == Action::Exit) {
          h.pending_exit = *stage;
        } else {
          h.dropped = true;
        }
        break;
      }
      case Action::TriggerFire: break;
    }
  }
  for (const auto& [id, h] : history) {
    if (h.pending_exit) {
      report.violations.push_back(
          Violation{"TR-ILLEGAL-HOP", {"thing " + std::to_string(id)}, "trace ends between exit and enter"});
    }
  }
  for (const auto& t : trace.things) {
    if (history[t.id].creates == 0) {
      report.violations.push_back(
          Violation{"TR-CONSERVATION", {"thing " + std::to_string(t.id)}, "thing never created"});
    }
  }
  return report;
}

}  // namespace tmkit
