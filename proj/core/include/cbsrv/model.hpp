#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbsrv/error.hpp"
#include "cbsrv/expr.hpp"

namespace cbsrv {

/// Port added by the partial-state split; fires the internal half of a transition.
inline constexpr std::string_view kBetaPort = "beta";
/// Variable added by instrumentation; holds the index of the current location.
inline constexpr std::string_view kLocVar = "loc";
/// Component name of an attached monitor and its single port.
inline constexpr std::string_view kMonitorComponent = "Monitor";
inline constexpr std::string_view kMonitorPort = "in";

/// Busy locations are the ones introduced by the partial-state split; their names start with "⊥".
bool is_busy_location(std::string_view location) noexcept;

struct VarDecl {
  std::string name;
  Value init;

  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

struct Port {
  std::string name;
  std::vector<std::string> vars;  // attached variables, in export order

  friend bool operator==(const Port&, const Port&) = default;
};

struct Transition {
  std::string from;
  std::string port;
  Expr guard;  // Bool
  std::vector<Assignment> step;
  std::string to;

  friend bool operator==(const Transition& a, const Transition& b) {
    return a.from == b.from && a.port == b.port && structurally_equal(a.guard, b.guard) &&
           a.step == b.step && a.to == b.to;
  }
};

struct AtomicComponent {
  std::string name;
  std::vector<VarDecl> vars;
  std::vector<Port> ports;
  std::vector<std::string> locations;  // ready locations first, then busy ones
  std::string initial;
  std::vector<Transition> transitions;

  const Port* find_port(std::string_view port) const noexcept;
  const VarDecl* find_var(std::string_view var) const noexcept;
  std::optional<std::size_t> location_index(std::string_view location) const noexcept;
  bool has_location(std::string_view location) const noexcept {
    return location_index(location).has_value();
  }
  Valuation initial_valuation() const;
  /// True when some location is busy, i.e. the component is in partial-state form.
  bool is_partial() const noexcept;
  bool is_instrumented() const noexcept { return find_var(kLocVar) != nullptr; }

  friend bool operator==(const AtomicComponent&, const AtomicComponent&) = default;
};

struct PortRef {
  std::string component;
  std::string port;

  std::string to_string() const { return component + "." + port; }
  friend bool operator==(const PortRef&, const PortRef&) = default;
};

struct Interaction {
  std::string name;
  std::vector<PortRef> ports;
  std::vector<Assignment> transfer;  // over qualified names "Comp.var"

  bool involves(std::string_view component) const noexcept;
  friend bool operator==(const Interaction&, const Interaction&) = default;
};

enum class RgtVariant { guarded, unguarded_new, unguarded_upd, unguarded_both };

std::string_view rgt_variant_name(RgtVariant v) noexcept;
std::optional<RgtVariant> parse_rgt_variant(std::string_view s) noexcept;

/// The synthesized reconstruction component. Its ports are derived:
/// p_<a> and out_<a> per tag a, beta_<C> per instrumented component C.
struct RgtSpec {
  std::string name = "RGT";
  RgtVariant variant = RgtVariant::guarded;
  std::vector<std::string> monitored;  // instrumented components, in system order
  std::vector<std::string> tags;       // the interactions of the underlying system

  static std::string new_port(std::string_view tag) { return "p_" + std::string(tag); }
  static std::string out_port(std::string_view tag) { return "out_" + std::string(tag); }
  static std::string beta_port(std::string_view component) {
    return "beta_" + std::string(component);
  }

  friend bool operator==(const RgtSpec&, const RgtSpec&) = default;
};

struct MonitorSpec;

struct CompositeSystem {
  std::string name = "system";
  std::vector<AtomicComponent> components;
  std::vector<Interaction> interactions;
  std::optional<RgtSpec> rgt;
  std::shared_ptr<const MonitorSpec> monitor;

  std::optional<std::size_t> component_index(std::string_view name) const noexcept;
  const AtomicComponent* find_component(std::string_view name) const noexcept;
  const Interaction* find_interaction(std::string_view name) const noexcept;
  std::optional<std::size_t> interaction_index(std::string_view name) const noexcept;
  bool is_partial() const noexcept;
};

bool operator==(const CompositeSystem& a, const CompositeSystem& b);

/// Static checks over every structural invariant; empty iff the system is well-formed.
std::vector<Diagnostic> validate(const CompositeSystem& sys);

/// Throws ValidationError when validate() reports anything.
void require_valid(const CompositeSystem& sys);

/// Interaction name for the singleton busy interaction of a component.
std::string beta_interaction_name(std::string_view component);

}  // namespace cbsrv
