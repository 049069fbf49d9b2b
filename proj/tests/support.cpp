#include "support.hpp"

#include <algorithm>

namespace cbsrv::testing {

namespace {

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& xs) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

CompositeSystem random_system(std::mt19937_64& rng) {
  CompositeSystem sys;
  sys.name = "random";
  const std::size_t n = uniform(rng, 1, 4);
  for (std::size_t i = 0; i < n; ++i) {
    AtomicComponent c;
    c.name = "C" + std::to_string(i);
    c.vars.push_back({"x", Value(0)});
    const std::size_t nlocs = uniform(rng, 2, 3);
    for (std::size_t l = 0; l < nlocs; ++l) c.locations.push_back("l" + std::to_string(l));
    c.initial = "l0";
    const std::size_t nports = uniform(rng, 1, 3);
    for (std::size_t p = 0; p < nports; ++p) {
      Port port{"p" + std::to_string(p), {}};
      if (coin(rng, 0.5)) port.vars.push_back("x");
      c.ports.push_back(std::move(port));
    }
    for (const auto& from : c.locations) {
      const std::size_t k = uniform(rng, 1, 2);
      for (std::size_t t = 0; t < k; ++t) {
        Transition tr;
        tr.from = from;
        tr.port = pick(rng, c.ports).name;
        tr.to = pick(rng, c.locations);
        // x stays within [0, 3]: increments need x < 3, decrements need x >= 1.
        switch (uniform(rng, 0, 4)) {
          case 0:
            tr.guard = ex::lit(true);
            break;
          case 1:
            tr.guard = ex::lt(ex::var("x"), ex::lit(3));
            tr.step = {{"x", ex::add(ex::var("x"), ex::lit(1))}};
            break;
          case 2:
            tr.guard = ex::ge(ex::var("x"), ex::lit(1));
            tr.step = {{"x", ex::sub(ex::var("x"), ex::lit(1))}};
            break;
          case 3:
            tr.guard = ex::lit(true);
            tr.step = {{"x", ex::lit(0)}};
            break;
          default:
            tr.guard = ex::le(ex::var("x"), ex::lit(1));
            break;
        }
        c.transitions.push_back(std::move(tr));
      }
    }
    sys.components.push_back(std::move(c));
  }
  const std::size_t nints = uniform(rng, 1, 6);
  for (std::size_t a = 0; a < nints; ++a) {
    Interaction in;
    in.name = "i" + std::to_string(a);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t k = uniform(rng, 1, std::min<std::size_t>(3, n));
    std::vector<std::size_t> with_x;
    for (std::size_t j = 0; j < k; ++j) {
      const AtomicComponent& c = sys.components[order[j]];
      const Port& p = pick(rng, c.ports);
      in.ports.push_back({c.name, p.name});
      if (!p.vars.empty()) with_x.push_back(order[j]);
    }
    if (with_x.size() >= 2 && coin(rng, 0.4)) {
      in.transfer.push_back({sys.components[with_x[1]].name + ".x", ex::var(sys.components[with_x[0]].name + ".x")});
    }
    sys.interactions.push_back(std::move(in));
  }
  return sys;
}

std::optional<SystemState> ref_step(const CompositeSystem& sys, const SystemState& q, const Interaction& a) {
  struct Chosen {
    std::size_t comp;
    const Port* port;
    const Transition* tr;
  };
  std::vector<Chosen> chosen;
  for (const auto& pr : a.ports) {
    std::size_t c = 0;
    while (sys.components[c].name != pr.component) ++c;
    const AtomicComponent& comp = sys.components[c];
    const Transition* found = nullptr;
    for (const auto& t : comp.transitions) {
      if (t.from == q[c].location && t.port == pr.port && eval(t.guard, q[c].vars).as_bool()) {
        found = &t;
        break;
      }
    }
    if (!found) return std::nullopt;
    const Port* port = nullptr;
    for (const auto& p : comp.ports) {
      if (p.name == pr.port) port = &p;
    }
    chosen.push_back({c, port, found});
  }
  SystemState next = q;
  Valuation scratch;
  for (const auto& ch : chosen) {
    for (const auto& v : ch.port->vars) scratch.set(sys.components[ch.comp].name + "." + v, q[ch.comp].vars.at(v));
  }
  for (const auto& asg : a.transfer) scratch.set(asg.target, eval(asg.source, scratch));
  for (const auto& ch : chosen) {
    Valuation& vars = next[ch.comp].vars;
    for (const auto& v : ch.port->vars) vars.set(v, scratch.at(sys.components[ch.comp].name + "." + v));
    for (const auto& asg : ch.tr->step) vars.set(asg.target, eval(asg.source, vars));
    next[ch.comp].location = ch.tr->to;
  }
  return next;
}

std::optional<Trace> ref_replay(const CompositeSystem& sys, const std::vector<std::string>& labels) {
  Trace t;
  for (const auto& c : sys.components) {
    Valuation v;
    for (const auto& d : c.vars) v.set(d.name, d.init);
    t.initial.push_back({c.initial, v});
  }
  for (const auto& name : labels) {
    const Interaction* a = sys.find_interaction(name);
    if (!a) return std::nullopt;
    auto next = ref_step(sys, t.last(), *a);
    if (!next) return std::nullopt;
    t.steps.emplace_back(Label::interaction(name), std::move(*next));
  }
  return t;
}

std::vector<WitnessElement> elements_of(const Trace& t) {
  std::vector<WitnessElement> out{t.initial};
  for (const auto& [l, q] : t.steps) {
    out.emplace_back(l.to_string());
    out.emplace_back(q);
  }
  return out;
}

std::string loc_tuple(const SystemState& q) {
  std::string out = "(";
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) out += ",";
    out += q[i].busy() ? "\xE2\x8A\xA5" : q[i].location;
  }
  return out + ")";
}

const CompositeSystem& task() {
  static const CompositeSystem s = builtin_task();
  return s;
}

const CompositeSystem& task_partial() {
  static const CompositeSystem s = to_partial(task());
  return s;
}

const MonitorSpec& task_monitor() {
  static const MonitorSpec m = builtin_task_monitor();
  return m;
}

const CompositeSystem& task_monitored() {
  static const CompositeSystem s = [] {
    const auto support = monitor_support(task_monitor());
    return attach_monitor(
        transform_system(task_partial(), std::vector<std::string>(support.begin(), support.end())),
        task_monitor());
  }();
  return s;
}

}  // namespace cbsrv::testing
