#include "cbsrv/monitor.hpp"

#include <algorithm>
#include <unordered_map>

#include "cbsrv/error.hpp"
#include "parsers.hpp"

namespace cbsrv {

std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::true_: return "true";
    case Verdict::currently_true: return "currently_true";
    case Verdict::currently_false: return "currently_false";
    case Verdict::false_: return "false";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view s) noexcept {
  if (s == "true") return Verdict::true_;
  if (s == "currently_true") return Verdict::currently_true;
  if (s == "currently_false") return Verdict::currently_false;
  if (s == "false") return Verdict::false_;
  return std::nullopt;
}

std::optional<std::size_t> MonitorSpec::state_index(std::string_view state) const noexcept {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].name == state) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class EventTypes final : public TypeEnv {
 public:
  explicit EventTypes(const MonitorSpec& spec) : spec_(spec) {}
  std::optional<Type> type_of(std::string_view name) const override {
    for (const auto& e : spec_.events) {
      if (e.name == name) return Type::boolean;
    }
    return std::nullopt;
  }

 private:
  const MonitorSpec& spec_;
};

void check_guards(const MonitorSpec& spec) {
  EventTypes env(spec);
  for (const auto& t : spec.transitions) {
    try {
      if (type_check(t.guard, env) != Type::boolean) {
        throw Error(Errc::type_mismatch, "monitor transition guard is not Bool");
      }
    } catch (const Error& e) {
      if (e.code() == Errc::unbound_variable) throw Error(Errc::unknown_variable, e.what());
      throw;
    }
  }
}

}  // namespace

namespace detail {

MonitorSpec parse_monitor_block(TokenStream& ts) {
  MonitorSpec spec;
  ts.expect_ident("monitor");
  spec.name = ts.expect_name();
  ts.expect_punct("{");
  std::optional<std::size_t> initial;
  struct PendingTransition {
    Token at;
    std::string from;
    std::string to;
    Expr guard;
  };
  std::vector<PendingTransition> pending;
  while (!ts.accept_punct("}")) {
    const Token& kw = ts.peek();
    if (ts.accept_ident("emit")) {
      ts.expect_ident("initial");
      spec.emit_initial = true;
    } else if (ts.accept_ident("strict")) {
      spec.strict = true;
    } else if (ts.accept_ident("event")) {
      Token at = ts.peek();
      std::string name = ts.expect_name();
      for (const auto& e : spec.events) {
        if (e.name == name) ts.fail_at(at, "duplicate event '" + name + "'");
      }
      ts.expect_punct("=");
      spec.events.push_back({std::move(name), parse_expression(ts)});
    } else if (ts.accept_ident("state")) {
      Token at = ts.peek();
      std::string name = ts.expect_name();
      if (spec.state_index(name)) ts.fail_at(at, "duplicate state '" + name + "'");
      if (ts.accept_ident("initial")) {
        if (initial) ts.fail_at(at, "second initial state");
        initial = spec.states.size();
      }
      Token vt = ts.peek();
      auto v = parse_verdict(ts.expect_name());
      if (!v) ts.fail_at(vt, "expected a verdict");
      spec.states.push_back({std::move(name), *v});
    } else if (ts.accept_ident("transition")) {
      PendingTransition t{ts.peek(), {}, {}, nullptr};
      t.from = ts.expect_name();
      ts.expect_punct("->");
      t.to = ts.expect_name();
      ts.expect_punct("[");
      t.guard = parse_expression(ts);
      ts.expect_punct("]");
      pending.push_back(std::move(t));
    } else {
      ts.fail_at(kw, "expected emit, strict, event, state or transition");
    }
    ts.expect_punct(";");
  }
  if (spec.states.empty()) throw SyntaxError("monitor declares no state", ts.peek().line, ts.peek().column);
  if (!initial) throw SyntaxError("monitor has no initial state", ts.peek().line, ts.peek().column);
  spec.initial = *initial;
  for (auto& t : pending) {
    auto from = spec.state_index(t.from);
    auto to = spec.state_index(t.to);
    if (!from) ts.fail_at(t.at, "unknown state '" + t.from + "'");
    if (!to) ts.fail_at(t.at, "unknown state '" + t.to + "'");
    spec.transitions.push_back({*from, std::move(t.guard), *to});
  }
  check_guards(spec);
  check_deterministic(spec);
  return spec;
}

}  // namespace detail

MonitorSpec parse_monitor(std::string_view text) {
  detail::TokenStream ts(detail::tokenize(text));
  MonitorSpec spec = detail::parse_monitor_block(ts);
  if (!ts.at_end()) ts.fail("unexpected input after monitor");
  return spec;
}

void check_deterministic(const MonitorSpec& spec) {
  const std::size_t k = spec.events.size();
  if (k > 20) throw Error(Errc::invalid_argument, "too many monitor events to check exhaustively");
  Valuation ev;
  for (const auto& e : spec.events) ev.set(e.name, false);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
    for (std::size_t i = 0; i < k; ++i) ev.set(spec.events[i].name, ((bits >> i) & 1U) != 0);
    for (std::size_t s = 0; s < spec.states.size(); ++s) {
      std::size_t matches = 0;
      for (const auto& t : spec.transitions) {
        if (t.from == s && eval(t.guard, ev).as_bool()) ++matches;
      }
      if (matches > 1) {
        throw Error(Errc::nondeterministic_transition,
                    "state '" + spec.states[s].name + "' has overlapping transitions under " +
                        ev.to_string());
      }
    }
  }
}

namespace {

class SystemTypes final : public TypeEnv {
 public:
  explicit SystemTypes(const CompositeSystem& sys) : sys_(sys) {}
  std::optional<Type> type_of(std::string_view name) const override {
    auto dot = name.find('.');
    if (dot == std::string_view::npos) return std::nullopt;
    const AtomicComponent* c = sys_.find_component(name.substr(0, dot));
    if (!c) return std::nullopt;
    const VarDecl* d = c->find_var(name.substr(dot + 1));
    if (!d) return std::nullopt;
    return d->init.type();
  }
  bool has_location(std::string_view component, std::string_view location) const override {
    const AtomicComponent* c = sys_.find_component(component);
    return c && c->has_location(location);
  }

 private:
  const CompositeSystem& sys_;
};

}  // namespace

void check_against(const MonitorSpec& spec, const CompositeSystem& sys) {
  SystemTypes env(sys);
  for (const auto& e : spec.events) {
    Type t;
    try {
      t = type_check(e.condition, env);
    } catch (const Error& err) {
      if (err.code() == Errc::unbound_variable) {
        throw Error(Errc::unknown_variable, "event " + e.name + ": " + err.what());
      }
      throw Error(err.code(), "event " + e.name + ": " + err.what());
    }
    if (t != Type::boolean) throw Error(Errc::type_mismatch, "event " + e.name + " is not Bool");
  }
}

std::set<std::string> monitor_support(const MonitorSpec& spec) {
  std::set<std::string> out;
  for (const auto& e : spec.events) {
    std::vector<std::string> vars;
    collect_vars(e.condition, vars);
    out.insert(vars.begin(), vars.end());
    std::vector<std::pair<std::string, std::string>> locs;
    collect_locations(e.condition, locs);
    for (const auto& [c, l] : locs) out.insert(c + "." + std::string(kLocVar));
  }
  return out;
}

std::set<std::string> support_components(const MonitorSpec& spec) {
  std::set<std::string> out;
  for (const auto& v : monitor_support(spec)) out.insert(v.substr(0, v.find('.')));
  return out;
}

std::string render_monitor(const MonitorSpec& spec, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  std::string out = pad + "monitor " + spec.name + " {\n";
  if (spec.emit_initial) out += pad + "  emit initial;\n";
  if (spec.strict) out += pad + "  strict;\n";
  for (const auto& e : spec.events) out += pad + "  event " + e.name + " = " + to_string(e.condition) + ";\n";
  for (std::size_t i = 0; i < spec.states.size(); ++i) {
    out += pad + "  state " + spec.states[i].name + (i == spec.initial ? " initial " : " ") +
           std::string(verdict_name(spec.states[i].verdict)) + ";\n";
  }
  for (const auto& t : spec.transitions) {
    out += pad + "  transition " + spec.states[t.from].name + " -> " + spec.states[t.to].name + " [" +
           to_string(t.guard) + "];\n";
  }
  return out + pad + "}\n";
}

// ---------------------------------------------------------------------------
// running

MonitorRun monitor_start(const MonitorSpec& spec) { return MonitorRun{spec.initial, {}}; }

const ComponentState* GlobalStateEnv::find(std::string_view component) const {
  for (std::size_t i = 0; i < names_.size() && i < q_.size(); ++i) {
    if (names_[i] == component) return &q_[i];
  }
  return nullptr;
}

const Value* GlobalStateEnv::lookup(std::string_view name) const {
  auto dot = name.find('.');
  if (dot == std::string_view::npos) return nullptr;
  const ComponentState* s = find(name.substr(0, dot));
  return s ? s->vars.find(name.substr(dot + 1)) : nullptr;
}

std::optional<bool> GlobalStateEnv::at_location(std::string_view component,
                                                std::string_view location) const {
  const ComponentState* s = find(component);
  if (!s) return std::nullopt;
  return s->location == location;
}

std::size_t monitor_next(const MonitorSpec& spec, std::size_t state,
                         const std::vector<std::string>& names, const SystemState& q) {
  if (is_terminal(spec.states[state].verdict)) return state;
  GlobalStateEnv env(names, q);
  for (const auto& c : support_components(spec)) {
    for (std::size_t i = 0; i < names.size() && i < q.size(); ++i) {
      if (names[i] == c && q[i].busy()) {
        throw Error(Errc::partial_state_rejected, "component " + c + " is busy");
      }
    }
  }
  Valuation ev;
  for (const auto& e : spec.events) ev.set(e.name, eval(e.condition, env).as_bool());
  for (const auto& t : spec.transitions) {
    if (t.from == state && eval(t.guard, ev).as_bool()) return t.to;
  }
  if (spec.strict) {
    throw Error(Errc::guard_violated,
                "monitor state '" + spec.states[state].name + "' has no transition for " + ev.to_string());
  }
  return state;
}

Verdict monitor_step(MonitorRun& run, const MonitorSpec& spec, const std::vector<std::string>& names,
                     const SystemState& q) {
  run.state = monitor_next(spec, run.state, names, q);
  Verdict v = spec.states[run.state].verdict;
  run.verdicts.push_back(v);
  return v;
}

std::vector<std::string> component_names(const CompositeSystem& sys) {
  std::vector<std::string> out;
  out.reserve(sys.components.size());
  for (const auto& c : sys.components) out.push_back(c.name);
  return out;
}

CompositeSystem attach_monitor(const CompositeSystem& transformed, const MonitorSpec& spec) {
  if (!transformed.rgt) {
    throw Error(Errc::invalid_argument, "attach_monitor needs a transformed system");
  }
  const auto& monitored = transformed.rgt->monitored;
  for (const auto& c : support_components(spec)) {
    if (std::find(monitored.begin(), monitored.end(), c) == monitored.end()) {
      throw Error(Errc::incompatible_support, "monitor reads component '" + c + "' which is not instrumented");
    }
  }
  check_against(spec, transformed);
  CompositeSystem out = transformed;
  out.monitor = std::make_shared<const MonitorSpec>(spec);
  for (auto& in : out.interactions) {
    const bool delivery = std::any_of(in.ports.begin(), in.ports.end(), [&](const PortRef& p) {
      return p.component == transformed.rgt->name && p.port.rfind("out_", 0) == 0;
    });
    if (delivery && !in.involves(kMonitorComponent)) {
      in.ports.push_back({std::string(kMonitorComponent), std::string(kMonitorPort)});
    }
  }
  require_valid(out);
  return out;
}

}  // namespace cbsrv
