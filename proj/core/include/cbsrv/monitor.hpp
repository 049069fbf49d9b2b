#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cbsrv/expr.hpp"
#include "cbsrv/model.hpp"
#include "cbsrv/state.hpp"

namespace cbsrv {

enum class Verdict { true_, currently_true, currently_false, false_ };

std::string_view verdict_name(Verdict v) noexcept;
std::optional<Verdict> parse_verdict(std::string_view s) noexcept;
inline bool is_terminal(Verdict v) noexcept { return v == Verdict::true_ || v == Verdict::false_; }

struct MonitorEvent {
  std::string name;
  Expr condition;  // over "Comp.var" and "Comp@loc"

  friend bool operator==(const MonitorEvent& a, const MonitorEvent& b) {
    return a.name == b.name && structurally_equal(a.condition, b.condition);
  }
};

struct MonitorStateDecl {
  std::string name;
  Verdict verdict;

  friend bool operator==(const MonitorStateDecl&, const MonitorStateDecl&) = default;
};

struct MonitorTransition {
  std::size_t from;
  Expr guard;  // over event names
  std::size_t to;

  friend bool operator==(const MonitorTransition& a, const MonitorTransition& b) {
    return a.from == b.from && structurally_equal(a.guard, b.guard) && a.to == b.to;
  }
};

/// Deterministic finite-state monitor over global states.
/// A valuation of the events that matches no outgoing transition keeps the current state,
/// unless `strict` is set, in which case it is an error.
struct MonitorSpec {
  std::string name;
  bool emit_initial = false;  // also judge the initial state
  bool strict = false;
  std::vector<MonitorEvent> events;
  std::vector<MonitorStateDecl> states;
  std::size_t initial = 0;
  std::vector<MonitorTransition> transitions;

  std::optional<std::size_t> state_index(std::string_view state) const noexcept;
  friend bool operator==(const MonitorSpec&, const MonitorSpec&) = default;
};

/// Parses and checks well-formedness and determinism.
/// Errors: SyntaxError, Error(unknown_variable) for guards naming undeclared events,
/// Error(nondeterministic_transition).
MonitorSpec parse_monitor(std::string_view text);

/// Enumerates all event valuations; throws Error(nondeterministic_transition) if two
/// transitions leaving one state can both match.
void check_deterministic(const MonitorSpec& spec);

/// Event conditions must be Bool over the system's components; throws Error(unknown_variable)
/// or Error(type_mismatch).
void check_against(const MonitorSpec& spec, const CompositeSystem& sys);

/// Qualified variables the events read; a location test on C contributes "C.loc".
std::set<std::string> monitor_support(const MonitorSpec& spec);
/// Components the events read.
std::set<std::string> support_components(const MonitorSpec& spec);

std::string render_monitor(const MonitorSpec& spec, int indent = 0);

struct MonitorRun {
  std::size_t state = 0;
  std::vector<Verdict> verdicts;  // one per consumed global state
};

MonitorRun monitor_start(const MonitorSpec& spec);

/// Looks up qualified names in a full tuple of component states.
class GlobalStateEnv final : public Env {
 public:
  GlobalStateEnv(const std::vector<std::string>& names, const SystemState& q)
      : names_(names), q_(q) {}
  const Value* lookup(std::string_view name) const override;
  std::optional<bool> at_location(std::string_view component,
                                  std::string_view location) const override;

 private:
  const ComponentState* find(std::string_view component) const;
  const std::vector<std::string>& names_;
  const SystemState& q_;
};

/// Monitor control state reached from `state` on global state q. Terminal verdicts absorb.
/// Errors: Error(partial_state_rejected) if a component read by the events is busy,
/// Error(guard_violated) under strict mode when nothing matches.
std::size_t monitor_next(const MonitorSpec& spec, std::size_t state,
                         const std::vector<std::string>& component_names, const SystemState& q);

/// One consumed global state: returns the verdict and records it in `run`.
Verdict monitor_step(MonitorRun& run, const MonitorSpec& spec,
                     const std::vector<std::string>& component_names, const SystemState& q);

/// Component names of a system in index order.
std::vector<std::string> component_names(const CompositeSystem& sys);

/// Adds the monitor to a transformed system; every out_<a> delivery interaction gains Monitor.in.
/// Errors: Error(incompatible_support) if the events read an uninstrumented component,
/// Error(invalid_argument) if the system has no reconstruction component.
CompositeSystem attach_monitor(const CompositeSystem& transformed, const MonitorSpec& spec);

}  // namespace cbsrv
