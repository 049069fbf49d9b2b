#include "cbsrv/transform.hpp"

#include <algorithm>
#include <set>

#include "cbsrv/error.hpp"

namespace cbsrv {

AtomicComponent instrument_atomic(const AtomicComponent& partial) {
  if (partial.is_instrumented()) {
    throw Error(Errc::already_instrumented, "component " + partial.name + " already has a loc variable");
  }
  if (!partial.is_partial() || !partial.find_port(kBetaPort)) {
    throw Error(Errc::invalid_argument, "component " + partial.name + " is not in partial-state form");
  }
  AtomicComponent out = partial;
  const auto init = partial.location_index(partial.initial);
  if (!init) throw Error(Errc::invalid_argument, "component " + partial.name + " has no initial location");
  out.vars.push_back({std::string(kLocVar), Value(static_cast<std::int64_t>(*init))});
  for (auto& t : out.transitions) {
    if (t.port != kBetaPort) continue;
    const auto to = partial.location_index(t.to);
    if (!to) throw Error(Errc::invalid_argument, "transition targets unknown location " + t.to);
    t.step.push_back({std::string(kLocVar), ex::lit(static_cast<std::int64_t>(*to))});
  }
  for (auto& p : out.ports) {
    if (p.name != kBetaPort) continue;
    p.vars.clear();
    for (const auto& v : out.vars) p.vars.push_back(v.name);
  }
  return out;
}

namespace {

bool is_beta_interaction(const Interaction& in) {
  return in.ports.size() == 1 && in.ports[0].port == kBetaPort;
}

std::set<std::string> support_of(const CompositeSystem& partial,
                                 const std::optional<std::vector<std::string>>& monitored_vars) {
  std::set<std::string> out;
  if (!monitored_vars) {
    for (const auto& c : partial.components) out.insert(c.name);
    return out;
  }
  for (const auto& q : *monitored_vars) {
    const auto dot = q.find('.');
    const AtomicComponent* c = dot == std::string::npos ? nullptr : partial.find_component(q.substr(0, dot));
    const std::string var = dot == std::string::npos ? std::string() : q.substr(dot + 1);
    if (!c || (var != kLocVar && !c->find_var(var))) {
      throw Error(Errc::unknown_monitored_variable, "unknown monitored variable '" + q + "'");
    }
    out.insert(c->name);
  }
  return out;
}

}  // namespace

CompositeSystem transform_system(const CompositeSystem& partial,
                                 const std::optional<std::vector<std::string>>& monitored_vars,
                                 RgtVariant variant) {
  if (partial.rgt || partial.monitor) {
    throw Error(Errc::invalid_argument, "system is already transformed");
  }
  for (const auto& c : partial.components) {
    if (!c.find_port(kBetaPort)) {
      throw Error(Errc::invalid_argument, "component " + c.name + " is not in partial-state form");
    }
  }
  const std::set<std::string> support = support_of(partial, monitored_vars);

  CompositeSystem out;
  out.name = partial.name;
  RgtSpec rgt;
  rgt.variant = variant;
  for (const auto& c : partial.components) {
    if (support.count(c.name)) {
      out.components.push_back(instrument_atomic(c));
      rgt.monitored.push_back(c.name);
    } else {
      out.components.push_back(c);
    }
  }
  for (const auto& in : partial.interactions) {
    if (!is_beta_interaction(in)) rgt.tags.push_back(in.name);
  }

  for (const auto& in : partial.interactions) {
    Interaction r = in;
    if (!is_beta_interaction(in)) {
      r.ports.push_back({rgt.name, RgtSpec::new_port(in.name)});
    } else if (support.count(in.ports[0].component)) {
      r.ports.push_back({rgt.name, RgtSpec::beta_port(in.ports[0].component)});
    }
    out.interactions.push_back(std::move(r));
  }
  for (const auto& tag : rgt.tags) {
    out.interactions.push_back({RgtSpec::out_port(tag), {{rgt.name, RgtSpec::out_port(tag)}}, {}});
  }
  out.rgt = std::move(rgt);
  require_valid(out);
  return out;
}

}  // namespace cbsrv
