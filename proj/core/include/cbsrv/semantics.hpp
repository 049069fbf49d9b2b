#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cbsrv/model.hpp"
#include "cbsrv/monitor.hpp"
#include "cbsrv/rgt.hpp"
#include "cbsrv/state.hpp"

namespace cbsrv {

/// Splits every transition into a visible half and a β half through a fresh busy location,
/// and adds one singleton β interaction per component.
CompositeSystem to_partial(const CompositeSystem& sys);

/// Busy location name for transition (from, port, to); `ordinal` > 0 disambiguates repeats.
std::string busy_location_name(std::string_view from, std::string_view port, std::string_view to,
                               std::size_t ordinal = 0);

/// State of a system that may include the reconstruction component and a monitor.
struct RunState {
  SystemState comps;
  std::optional<RgtState> rgt;
  std::optional<std::size_t> monitor;  // monitor control state

  friend bool operator==(const RunState&, const RunState&) = default;
};

enum class InteractionKind {
  gamma,     // an interaction of the underlying system (possibly rewired to RGT)
  beta,      // β_i, possibly rewired to RGT
  delivery,  // out_<a>: RGT hands a reconstructed state to the monitor
};

struct StepEffects {
  std::optional<RgtDelivery> delivered;
  std::optional<Verdict> verdict;
};

/// Indexed interpreter for the composite semantic rule. Guards are evaluated on the
/// pre-transfer valuation; transfer F_a runs over the qualified port variables, then each
/// involved component applies its step to v \ v_p. When a component has several enabled
/// transitions on the same port the first in declaration order fires.
class Semantics {
 public:
  /// Throws ValidationError on an invalid system.
  explicit Semantics(CompositeSystem sys);

  const CompositeSystem& system() const noexcept { return *sys_; }
  std::shared_ptr<const CompositeSystem> shared_system() const noexcept { return sys_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::optional<RgtContext>& rgt_context() const noexcept { return rgt_; }

  RunState initial(bool retain_delivered = false) const;

  std::size_t interaction_count() const noexcept { return ints_.size(); }
  const std::string& interaction_name(std::size_t a) const { return sys_->interactions[a].name; }
  std::optional<std::size_t> interaction_index(std::string_view name) const;
  InteractionKind kind(std::size_t a) const { return ints_[a].kind; }
  /// Component of a β interaction.
  std::optional<std::size_t> beta_component(std::size_t a) const;
  std::optional<std::size_t> beta_interaction(std::size_t component) const;
  /// Components (indices) taking part in interaction a.
  std::vector<std::size_t> participants(std::size_t a) const;

  Label label_of(std::size_t a) const;
  std::optional<std::size_t> resolve(const Label& l) const;

  bool enabled(const RunState& q, std::size_t a) const;
  std::vector<std::size_t> enabled_interactions(const RunState& q) const;

  /// Throws Error(not_enabled).
  void fire_into(RunState& q, std::size_t a, StepEffects* fx = nullptr) const;
  RunState fire(const RunState& q, std::size_t a, StepEffects* fx = nullptr) const {
    RunState next = q;
    fire_into(next, a, fx);
    return next;
  }

  /// Worker half of β_i: the pending β transition's computation step on a busy component.
  /// Touches only that component's state. Throws Error(not_busy).
  ComponentState execute_step(std::size_t component, const ComponentState& busy) const;
  /// Coordinator half: installs a worker result as β_i (including the RGT update when rewired).
  /// Throws Error(not_enabled) if β_i is not enabled in q.
  void complete_beta(RunState& q, std::size_t component, ComponentState next,
                     StepEffects* fx = nullptr) const;

 private:
  struct Part {
    std::size_t component;
    std::size_t port;  // index into the component's ports
    std::vector<std::size_t> vars;  // attached variables
  };
  enum class RgtRole { none, new_tag, upd, get };
  struct Info {
    InteractionKind kind = InteractionKind::gamma;
    std::vector<Part> parts;
    RgtRole rgt_role = RgtRole::none;
    std::size_t rgt_arg = 0;  // tag or component
    bool monitor = false;
    std::optional<std::size_t> beta_of;
    std::vector<bool> involved;  // per component
  };
  struct Comp {
    std::unordered_map<std::string, std::size_t> loc_index;
    // transitions[loc][port] -> transition indices in declaration order
    std::vector<std::vector<std::vector<std::size_t>>> by_loc_port;
    std::optional<std::size_t> beta_port;
  };

  const Transition* enabled_transition(const ComponentState& s, std::size_t c,
                                       std::size_t port) const;
  void apply_rgt_and_monitor(RunState& q, const Info& info, StepEffects* fx) const;

  std::shared_ptr<const CompositeSystem> sys_;
  std::vector<std::string> names_;
  std::vector<Info> ints_;
  std::vector<Comp> comps_;
  std::vector<std::optional<std::size_t>> beta_of_component_;
  std::unordered_map<std::string, std::size_t> int_index_;
  std::optional<RgtContext> rgt_;
};

/// Names of the interactions enabled at q (β interactions included for partial systems).
std::vector<std::string> enabled_interactions(const CompositeSystem& sys, const SystemState& q);

/// Throws Error(not_enabled).
SystemState step_global(const CompositeSystem& sys, const SystemState& q, std::string_view a);
SystemState step_partial(const CompositeSystem& partial, const SystemState& q, const Label& l);

}  // namespace cbsrv
