#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cbsrv/expr.hpp"
#include "cbsrv/model.hpp"

namespace cbsrv {

/// Local state (l, v) of one component. A busy location marks the slot as undefined:
/// the valuation is carried along but not trusted.
struct ComponentState {
  std::string location;
  Valuation vars;

  bool busy() const noexcept { return is_busy_location(location); }
  std::string to_string() const;

  friend bool operator==(const ComponentState&, const ComponentState&) = default;
  friend auto operator<=>(const ComponentState&, const ComponentState&) = default;
};

/// (q_1, ..., q_n), indexed by component position.
using SystemState = std::vector<ComponentState>;

bool is_global(const SystemState& q) noexcept;
std::string to_string(const SystemState& q);
/// Locations only, e.g. "(free, free, free, ready)"; busy slots print as "⊥".
std::string locations_string(const SystemState& q);

SystemState initial_state(const CompositeSystem& sys);

/// An interaction of γ or the busy notification β_i of component i (0-based).
class Label {
 public:
  enum class Kind { interaction, beta };

  static Label interaction(std::string name) { return Label(Kind::interaction, std::move(name), 0); }
  static Label beta(std::size_t component) { return Label(Kind::beta, {}, component); }

  Kind kind() const noexcept { return kind_; }
  bool is_beta() const noexcept { return kind_ == Kind::beta; }
  const std::string& name() const noexcept { return name_; }
  std::size_t component() const noexcept { return component_; }

  /// "ex12" or "beta(4)" (1-based component index).
  std::string to_string() const;
  /// Inverse of to_string; throws Error(malformed_trace).
  static Label parse(std::string_view text);

  friend bool operator==(const Label&, const Label&) = default;

 private:
  Label(Kind k, std::string name, std::size_t component)
      : kind_(k), name_(std::move(name)), component_(component) {}

  Kind kind_;
  std::string name_;
  std::size_t component_;
};

/// q0 · l1 · q1 ⋯ ls · qs
struct Trace {
  SystemState initial;
  std::vector<std::pair<Label, SystemState>> steps;

  const SystemState& last() const noexcept { return steps.empty() ? initial : steps.back().second; }
  std::size_t size() const noexcept { return steps.size(); }
  /// Prefix with the first k steps.
  Trace prefix(std::size_t k) const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Labels with every β removed.
std::vector<std::string> interactions_of(const Trace& t);

}  // namespace cbsrv
