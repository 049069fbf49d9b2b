#include "cbsrv/model.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "cbsrv/monitor.hpp"

namespace cbsrv {

namespace {
constexpr std::string_view kBottom = "\xE2\x8A\xA5";
}

bool is_busy_location(std::string_view location) noexcept {
  return location.substr(0, kBottom.size()) == kBottom;
}

std::string beta_interaction_name(std::string_view component) {
  return "beta_" + std::string(component);
}

const Port* AtomicComponent::find_port(std::string_view port) const noexcept {
  for (const auto& p : ports) {
    if (p.name == port) return &p;
  }
  return nullptr;
}

const VarDecl* AtomicComponent::find_var(std::string_view var) const noexcept {
  for (const auto& v : vars) {
    if (v.name == var) return &v;
  }
  return nullptr;
}

std::optional<std::size_t> AtomicComponent::location_index(std::string_view location) const noexcept {
  for (std::size_t i = 0; i < locations.size(); ++i) {
    if (locations[i] == location) return i;
  }
  return std::nullopt;
}

Valuation AtomicComponent::initial_valuation() const {
  Valuation v;
  for (const auto& d : vars) v.set(d.name, d.init);
  return v;
}

bool AtomicComponent::is_partial() const noexcept {
  return std::any_of(locations.begin(), locations.end(),
                     [](const std::string& l) { return is_busy_location(l); });
}

bool Interaction::involves(std::string_view component) const noexcept {
  return std::any_of(ports.begin(), ports.end(),
                     [&](const PortRef& p) { return p.component == component; });
}

std::string_view rgt_variant_name(RgtVariant v) noexcept {
  switch (v) {
    case RgtVariant::guarded: return "default";
    case RgtVariant::unguarded_new: return "unguarded-new";
    case RgtVariant::unguarded_upd: return "unguarded-upd";
    case RgtVariant::unguarded_both: return "unguarded-both";
  }
  return "default";
}

std::optional<RgtVariant> parse_rgt_variant(std::string_view s) noexcept {
  if (s == "default") return RgtVariant::guarded;
  if (s == "unguarded-new") return RgtVariant::unguarded_new;
  if (s == "unguarded-upd") return RgtVariant::unguarded_upd;
  if (s == "unguarded-both") return RgtVariant::unguarded_both;
  return std::nullopt;
}

std::optional<std::size_t> CompositeSystem::component_index(std::string_view n) const noexcept {
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].name == n) return i;
  }
  return std::nullopt;
}

const AtomicComponent* CompositeSystem::find_component(std::string_view n) const noexcept {
  auto i = component_index(n);
  return i ? &components[*i] : nullptr;
}

std::optional<std::size_t> CompositeSystem::interaction_index(std::string_view n) const noexcept {
  for (std::size_t i = 0; i < interactions.size(); ++i) {
    if (interactions[i].name == n) return i;
  }
  return std::nullopt;
}

const Interaction* CompositeSystem::find_interaction(std::string_view n) const noexcept {
  auto i = interaction_index(n);
  return i ? &interactions[*i] : nullptr;
}

bool CompositeSystem::is_partial() const noexcept {
  return std::any_of(components.begin(), components.end(),
                     [](const AtomicComponent& c) { return c.is_partial(); });
}

bool operator==(const CompositeSystem& a, const CompositeSystem& b) {
  if (a.name != b.name || a.components != b.components || a.interactions != b.interactions ||
      a.rgt != b.rgt) {
    return false;
  }
  if (!a.monitor || !b.monitor) return !a.monitor && !b.monitor;
  return *a.monitor == *b.monitor;
}

// ---------------------------------------------------------------------------
// validation

namespace {

class ComponentTypes final : public TypeEnv {
 public:
  explicit ComponentTypes(const AtomicComponent& c) : c_(c) {}
  std::optional<Type> type_of(std::string_view name) const override {
    if (const VarDecl* d = c_.find_var(name)) return d->init.type();
    return std::nullopt;
  }

 private:
  const AtomicComponent& c_;
};

class QualifiedTypes final : public TypeEnv {
 public:
  std::unordered_map<std::string, Type> vars;
  std::optional<Type> type_of(std::string_view name) const override {
    auto it = vars.find(std::string(name));
    if (it == vars.end()) return std::nullopt;
    return it->second;
  }
};

class Collector {
 public:
  void add(DiagCode code, std::string message) { out.push_back({code, std::move(message)}); }

  /// Type-checks `e`, recording failures; returns the type when it checks.
  std::optional<Type> check(const Expr& e, const TypeEnv& env, const std::string& where) {
    try {
      return type_check(e, env);
    } catch (const Error& err) {
      add(err.code() == Errc::unbound_variable ? DiagCode::unbound_variable
                                               : DiagCode::type_mismatch,
          where + ": " + err.what());
      return std::nullopt;
    }
  }

  std::vector<Diagnostic> out;
};

template <class Range, class Key>
void check_unique(Collector& c, const Range& r, Key key, const std::string& what) {
  std::set<std::string> seen;
  for (const auto& x : r) {
    const std::string& k = key(x);
    if (!seen.insert(k).second) c.add(DiagCode::duplicate_name, "duplicate " + what + " '" + k + "'");
  }
}

void validate_component(Collector& c, const AtomicComponent& comp) {
  const std::string where = "component " + comp.name;
  check_unique(c, comp.vars, [](const VarDecl& d) -> const std::string& { return d.name; },
               "variable in " + where);
  check_unique(c, comp.ports, [](const Port& p) -> const std::string& { return p.name; },
               "port in " + where);
  check_unique(c, comp.locations, [](const std::string& l) -> const std::string& { return l; },
               "location in " + where);
  if (!comp.has_location(comp.initial)) {
    c.add(DiagCode::unknown_location, where + ": initial location '" + comp.initial + "'");
  }
  for (const auto& p : comp.ports) {
    for (const auto& v : p.vars) {
      if (!comp.find_var(v)) {
        c.add(DiagCode::unbound_variable,
              where + ": port " + p.name + " exports undeclared '" + v + "'");
      }
    }
  }
  ComponentTypes env(comp);
  for (const auto& t : comp.transitions) {
    const std::string tw = where + ": transition " + t.from + " -" + t.port + "-> " + t.to;
    if (!comp.has_location(t.from)) c.add(DiagCode::unknown_location, tw + ": '" + t.from + "'");
    if (!comp.has_location(t.to)) c.add(DiagCode::unknown_location, tw + ": '" + t.to + "'");
    if (!comp.find_port(t.port)) c.add(DiagCode::unknown_port, tw + ": '" + t.port + "'");
    if (auto ty = c.check(t.guard, env, tw + " guard"); ty && *ty != Type::boolean) {
      c.add(DiagCode::type_mismatch, tw + ": guard is not Bool");
    }
    for (const auto& a : t.step) {
      const VarDecl* d = comp.find_var(a.target);
      if (!d) {
        c.add(DiagCode::unbound_variable, tw + ": assignment to undeclared '" + a.target + "'");
        continue;
      }
      if (auto ty = c.check(a.source, env, tw + " step"); ty && *ty != d->init.type()) {
        c.add(DiagCode::type_mismatch, tw + ": assignment to '" + a.target + "' has wrong type");
      }
    }
  }
}

bool valid_rgt_port(const RgtSpec& rgt, std::string_view port) {
  for (const auto& t : rgt.tags) {
    if (port == RgtSpec::new_port(t) || port == RgtSpec::out_port(t)) return true;
  }
  for (const auto& m : rgt.monitored) {
    if (port == RgtSpec::beta_port(m)) return true;
  }
  return false;
}

void validate_interaction(Collector& c, const CompositeSystem& sys, const Interaction& in) {
  const std::string where = "interaction " + in.name;
  if (in.ports.empty()) {
    c.add(DiagCode::empty_interaction, where + " has no ports");
    return;
  }
  std::set<std::string> seen;
  QualifiedTypes env;
  for (const auto& p : in.ports) {
    if (!seen.insert(p.component).second) {
      c.add(DiagCode::duplicate_component_in_interaction,
            where + ": two ports of component '" + p.component + "'");
    }
    if (sys.rgt && p.component == sys.rgt->name) {
      if (!valid_rgt_port(*sys.rgt, p.port)) {
        c.add(DiagCode::unknown_port, where + ": no RGT port '" + p.port + "'");
      }
      continue;
    }
    if (sys.monitor && p.component == kMonitorComponent) {
      if (p.port != kMonitorPort) c.add(DiagCode::unknown_port, where + ": no monitor port '" + p.port + "'");
      continue;
    }
    const AtomicComponent* comp = sys.find_component(p.component);
    if (!comp) {
      c.add(DiagCode::unknown_component, where + ": '" + p.component + "'");
      continue;
    }
    const Port* port = comp->find_port(p.port);
    if (!port) {
      c.add(DiagCode::unknown_port, where + ": '" + p.to_string() + "'");
      continue;
    }
    for (const auto& v : port->vars) {
      if (const VarDecl* d = comp->find_var(v)) env.vars[p.component + "." + v] = d->init.type();
    }
  }
  for (const auto& a : in.transfer) {
    auto it = env.vars.find(a.target);
    if (it == env.vars.end()) {
      c.add(DiagCode::bad_transfer_target,
            where + ": '" + a.target + "' is not a variable of a participating port");
      continue;
    }
    if (auto ty = c.check(a.source, env, where + " transfer"); ty && *ty != it->second) {
      c.add(DiagCode::type_mismatch, where + ": transfer to '" + a.target + "' has wrong type");
    }
  }
}

void validate_rgt(Collector& c, const CompositeSystem& sys, const RgtSpec& rgt) {
  if (sys.find_component(rgt.name)) {
    c.add(DiagCode::duplicate_name, "RGT name '" + rgt.name + "' clashes with a component");
  }
  for (const auto& m : rgt.monitored) {
    const AtomicComponent* comp = sys.find_component(m);
    if (!comp) {
      c.add(DiagCode::bad_rgt, "monitored component '" + m + "' does not exist");
    } else if (!comp->is_instrumented() || !comp->find_port(kBetaPort)) {
      c.add(DiagCode::bad_rgt, "monitored component '" + m + "' is not instrumented");
    }
  }
  check_unique(c, rgt.tags, [](const std::string& t) -> const std::string& { return t; }, "RGT tag");
  for (const auto& t : rgt.tags) {
    const Interaction* in = sys.find_interaction(t);
    if (!in) {
      c.add(DiagCode::bad_rgt, "RGT tag '" + t + "' is not an interaction");
      continue;
    }
    const bool wired = std::any_of(in->ports.begin(), in->ports.end(), [&](const PortRef& p) {
      return p.component == rgt.name && p.port == RgtSpec::new_port(t);
    });
    if (!wired) c.add(DiagCode::bad_rgt, "interaction '" + t + "' does not notify " + rgt.name);
  }
}

}  // namespace

std::vector<Diagnostic> validate(const CompositeSystem& sys) {
  Collector c;
  check_unique(c, sys.components,
               [](const AtomicComponent& x) -> const std::string& { return x.name; }, "component");
  check_unique(c, sys.interactions,
               [](const Interaction& x) -> const std::string& { return x.name; }, "interaction");
  for (const auto& comp : sys.components) validate_component(c, comp);
  for (const auto& in : sys.interactions) validate_interaction(c, sys, in);
  if (sys.rgt) validate_rgt(c, sys, *sys.rgt);
  if (sys.monitor) {
    if (sys.find_component(kMonitorComponent)) {
      c.add(DiagCode::duplicate_name, "component name 'Monitor' is reserved for the monitor");
    }
    try {
      check_against(*sys.monitor, sys);
    } catch (const Error& e) {
      c.add(DiagCode::bad_monitor, e.what());
    }
  }
  return std::move(c.out);
}

void require_valid(const CompositeSystem& sys) {
  auto d = validate(sys);
  if (!d.empty()) throw ValidationError(std::move(d));
}

}  // namespace cbsrv
