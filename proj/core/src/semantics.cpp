#include "cbsrv/semantics.hpp"

#include <algorithm>
#include <map>

#include "cbsrv/error.hpp"

namespace cbsrv {

std::string busy_location_name(std::string_view from, std::string_view port, std::string_view to,
                               std::size_t ordinal) {
  std::string name = "\xE2\x8A\xA5@";
  name += from;
  name += '-';
  name += port;
  name += '-';
  name += to;
  if (ordinal > 0) name += "#" + std::to_string(ordinal + 1);
  return name;
}

CompositeSystem to_partial(const CompositeSystem& sys) {
  if (sys.rgt || sys.monitor) {
    throw Error(Errc::invalid_argument, "to_partial expects a plain global-state system");
  }
  CompositeSystem out;
  out.name = sys.name;
  for (const auto& c : sys.components) {
    if (c.is_partial()) {
      throw Error(Errc::invalid_argument, "component " + c.name + " is already in partial-state form");
    }
    if (c.find_port(kBetaPort)) {
      throw Error(Errc::invalid_argument, "component " + c.name + " already has a port named beta");
    }
    AtomicComponent p;
    p.name = c.name;
    p.vars = c.vars;
    p.ports = c.ports;
    p.ports.push_back({std::string(kBetaPort), {}});
    p.locations = c.locations;
    p.initial = c.initial;
    std::map<std::string, std::size_t> seen;
    for (const auto& t : c.transitions) {
      std::string key = t.from + "\n" + t.port + "\n" + t.to;
      std::string busy = busy_location_name(t.from, t.port, t.to, seen[key]++);
      p.locations.push_back(busy);
      p.transitions.push_back({t.from, t.port, t.guard, {}, busy});
      p.transitions.push_back({busy, std::string(kBetaPort), ex::lit(true), t.step, t.to});
    }
    out.components.push_back(std::move(p));
  }
  out.interactions = sys.interactions;
  for (const auto& c : sys.components) {
    out.interactions.push_back({beta_interaction_name(c.name), {{c.name, std::string(kBetaPort)}}, {}});
  }
  return out;
}

// ---------------------------------------------------------------------------

Semantics::Semantics(CompositeSystem sys) {
  require_valid(sys);
  sys_ = std::make_shared<const CompositeSystem>(std::move(sys));
  const CompositeSystem& s = *sys_;
  const std::size_t n = s.components.size();
  names_.reserve(n);
  for (const auto& c : s.components) names_.push_back(c.name);
  if (s.rgt) rgt_ = RgtContext::from(s);

  comps_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AtomicComponent& c = s.components[i];
    Comp& ix = comps_[i];
    for (std::size_t l = 0; l < c.locations.size(); ++l) ix.loc_index.emplace(c.locations[l], l);
    ix.by_loc_port.assign(c.locations.size(), std::vector<std::vector<std::size_t>>(c.ports.size()));
    for (std::size_t p = 0; p < c.ports.size(); ++p) {
      if (c.ports[p].name == kBetaPort) ix.beta_port = p;
    }
    for (std::size_t t = 0; t < c.transitions.size(); ++t) {
      const Transition& tr = c.transitions[t];
      std::size_t l = ix.loc_index.at(tr.from);
      auto pit = std::find_if(c.ports.begin(), c.ports.end(),
                              [&](const Port& p) { return p.name == tr.port; });
      ix.by_loc_port[l][static_cast<std::size_t>(pit - c.ports.begin())].push_back(t);
    }
  }

  beta_of_component_.assign(n, std::nullopt);
  ints_.resize(s.interactions.size());
  for (std::size_t a = 0; a < s.interactions.size(); ++a) {
    const Interaction& in = s.interactions[a];
    Info& info = ints_[a];
    info.involved.assign(n, false);
    int_index_.emplace(in.name, a);
    for (const auto& pr : in.ports) {
      if (s.rgt && pr.component == s.rgt->name) {
        const std::string& port = pr.port;
        if (port.rfind("p_", 0) == 0) {
          info.rgt_role = RgtRole::new_tag;
          info.rgt_arg = *rgt_->tag_index(port.substr(2));
        } else if (port.rfind("out_", 0) == 0) {
          info.rgt_role = RgtRole::get;
          info.rgt_arg = *rgt_->tag_index(port.substr(4));
        } else {
          info.rgt_role = RgtRole::upd;
          info.rgt_arg = *s.component_index(port.substr(5));
        }
        continue;
      }
      if (s.monitor && pr.component == kMonitorComponent) {
        info.monitor = true;
        continue;
      }
      std::size_t c = *s.component_index(pr.component);
      const AtomicComponent& comp = s.components[c];
      Part part{c, 0, {}};
      for (std::size_t p = 0; p < comp.ports.size(); ++p) {
        if (comp.ports[p].name == pr.port) part.port = p;
      }
      info.parts.push_back(part);
      info.involved[c] = true;
    }
    if (info.rgt_role == RgtRole::get) {
      info.kind = InteractionKind::delivery;
    } else if (info.parts.size() == 1 && comps_[info.parts[0].component].beta_port == info.parts[0].port) {
      info.kind = InteractionKind::beta;
      info.beta_of = info.parts[0].component;
      if (!beta_of_component_[*info.beta_of]) beta_of_component_[*info.beta_of] = a;
    }
  }
}

RunState Semantics::initial(bool retain_delivered) const {
  RunState q;
  q.comps = initial_state(*sys_);
  if (rgt_) q.rgt = rgt_init(*rgt_, q.comps, retain_delivered);
  if (sys_->monitor) q.monitor = sys_->monitor->initial;
  return q;
}

std::optional<std::size_t> Semantics::interaction_index(std::string_view name) const {
  auto it = int_index_.find(std::string(name));
  if (it == int_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Semantics::beta_component(std::size_t a) const { return ints_[a].beta_of; }

std::optional<std::size_t> Semantics::beta_interaction(std::size_t component) const {
  if (component >= beta_of_component_.size()) return std::nullopt;
  return beta_of_component_[component];
}

std::vector<std::size_t> Semantics::participants(std::size_t a) const {
  std::vector<std::size_t> out;
  for (const auto& p : ints_[a].parts) out.push_back(p.component);
  return out;
}

Label Semantics::label_of(std::size_t a) const {
  if (ints_[a].kind == InteractionKind::beta) return Label::beta(*ints_[a].beta_of);
  return Label::interaction(sys_->interactions[a].name);
}

std::optional<std::size_t> Semantics::resolve(const Label& l) const {
  if (l.is_beta()) return beta_interaction(l.component());
  return interaction_index(l.name());
}

const Transition* Semantics::enabled_transition(const ComponentState& s, std::size_t c,
                                                std::size_t port) const {
  const Comp& ix = comps_[c];
  auto it = ix.loc_index.find(s.location);
  if (it == ix.loc_index.end()) {
    throw Error(Errc::invalid_argument,
                "component " + names_[c] + " has no location '" + s.location + "'");
  }
  const AtomicComponent& comp = sys_->components[c];
  for (std::size_t t : ix.by_loc_port[it->second][port]) {
    const Transition& tr = comp.transitions[t];
    if (eval(tr.guard, s.vars).as_bool()) return &tr;
  }
  return nullptr;
}

bool Semantics::enabled(const RunState& q, std::size_t a) const {
  const Info& info = ints_[a];
  for (const auto& p : info.parts) {
    if (!enabled_transition(q.comps[p.component], p.component, p.port)) return false;
  }
  switch (info.rgt_role) {
    case RgtRole::none:
      break;
    case RgtRole::new_tag:
      if (rgt_->new_guarded() && !is_stable(*q.rgt)) return false;
      break;
    case RgtRole::upd:
      if (rgt_->upd_guarded() && !is_stable(*q.rgt)) return false;
      break;
    case RgtRole::get: {
      auto d = rgt_deliverable(*q.rgt);
      if (!d || *d != info.rgt_arg) return false;
      break;
    }
  }
  return true;
}

std::vector<std::size_t> Semantics::enabled_interactions(const RunState& q) const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < ints_.size(); ++a) {
    if (enabled(q, a)) out.push_back(a);
  }
  return out;
}

void Semantics::fire_into(RunState& q, std::size_t a, StepEffects* fx) const {
  if (a >= ints_.size() || !enabled(q, a)) {
    throw Error(Errc::not_enabled,
                "interaction '" + (a < ints_.size() ? sys_->interactions[a].name : std::string("?")) +
                    "' is not enabled");
  }
  const Info& info = ints_[a];
  const Interaction& in = sys_->interactions[a];

  std::vector<const Transition*> chosen;
  chosen.reserve(info.parts.size());
  for (const auto& p : info.parts) chosen.push_back(enabled_transition(q.comps[p.component], p.component, p.port));

  if (!in.transfer.empty()) {
    Valuation scratch;
    for (const auto& p : info.parts) {
      const AtomicComponent& comp = sys_->components[p.component];
      for (const auto& v : comp.ports[p.port].vars) {
        scratch.set(comp.name + "." + v, q.comps[p.component].vars.at(v));
      }
    }
    scratch = apply_assignments(in.transfer, std::move(scratch));
    for (const auto& p : info.parts) {
      const AtomicComponent& comp = sys_->components[p.component];
      for (const auto& v : comp.ports[p.port].vars) {
        q.comps[p.component].vars.set(v, scratch.at(comp.name + "." + v));
      }
    }
  }

  for (std::size_t k = 0; k < info.parts.size(); ++k) {
    ComponentState& s = q.comps[info.parts[k].component];
    if (!chosen[k]->step.empty()) s.vars = apply_assignments(chosen[k]->step, std::move(s.vars));
    s.location = chosen[k]->to;
  }
  apply_rgt_and_monitor(q, info, fx);
}

void Semantics::apply_rgt_and_monitor(RunState& q, const Info& info, StepEffects* fx) const {
  switch (info.rgt_role) {
    case RgtRole::none:
      break;
    case RgtRole::new_tag:
      rgt_new(*q.rgt, *rgt_, info.rgt_arg, info.involved);
      break;
    case RgtRole::upd:
      rgt_upd(*q.rgt, *rgt_, info.rgt_arg, q.comps[info.rgt_arg]);
      break;
    case RgtRole::get: {
      RgtDelivery d = rgt_get(*q.rgt, *rgt_);
      if (info.monitor && sys_->monitor) {
        q.monitor = monitor_next(*sys_->monitor, *q.monitor, names_, d.to_state());
        if (fx) fx->verdict = sys_->monitor->states[*q.monitor].verdict;
      }
      if (fx) fx->delivered = std::move(d);
      break;
    }
  }
}

ComponentState Semantics::execute_step(std::size_t component, const ComponentState& busy) const {
  const Comp& ix = comps_[component];
  if (!busy.busy() || !ix.beta_port) {
    throw Error(Errc::not_busy, "component " + names_[component] + " is not busy");
  }
  const Transition* t = enabled_transition(busy, component, *ix.beta_port);
  if (!t) throw Error(Errc::not_busy, "component " + names_[component] + " has no pending step");
  ComponentState next = busy;
  if (!t->step.empty()) next.vars = apply_assignments(t->step, std::move(next.vars));
  next.location = t->to;
  return next;
}

void Semantics::complete_beta(RunState& q, std::size_t component, ComponentState next,
                              StepEffects* fx) const {
  auto a = beta_interaction(component);
  if (!a || !enabled(q, *a)) {
    throw Error(Errc::not_enabled, "beta of component " + names_[component] + " is not enabled");
  }
  q.comps[component] = std::move(next);
  apply_rgt_and_monitor(q, ints_[*a], fx);
}

// ---------------------------------------------------------------------------

namespace {
RunState plain_state(const Semantics& sem, const SystemState& q) {
  if (sem.system().rgt || sem.system().monitor) {
    throw Error(Errc::invalid_argument, "system state alone does not determine RGT or monitor state");
  }
  if (q.size() != sem.system().components.size()) {
    throw Error(Errc::arity_mismatch, "state arity does not match the system");
  }
  return RunState{q, std::nullopt, std::nullopt};
}
}  // namespace

std::vector<std::string> enabled_interactions(const CompositeSystem& sys, const SystemState& q) {
  Semantics sem(sys);
  std::vector<std::string> out;
  for (std::size_t a : sem.enabled_interactions(plain_state(sem, q))) out.push_back(sem.interaction_name(a));
  return out;
}

SystemState step_global(const CompositeSystem& sys, const SystemState& q, std::string_view a) {
  Semantics sem(sys);
  auto idx = sem.interaction_index(a);
  if (!idx) throw Error(Errc::not_enabled, "no interaction '" + std::string(a) + "'");
  return sem.fire(plain_state(sem, q), *idx).comps;
}

SystemState step_partial(const CompositeSystem& partial, const SystemState& q, const Label& l) {
  Semantics sem(partial);
  auto idx = sem.resolve(l);
  if (!idx) throw Error(Errc::not_enabled, "no interaction for label '" + l.to_string() + "'");
  return sem.fire(plain_state(sem, q), *idx).comps;
}

}  // namespace cbsrv
