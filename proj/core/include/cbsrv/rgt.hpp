#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbsrv/model.hpp"
#include "cbsrv/state.hpp"

namespace cbsrv {

/// One component slot of a reconstruction tuple.
struct RgtSlot {
  enum class Kind : std::uint8_t {
    null,         // component busy when the tuple was created and not updated since
    unmonitored,  // component outside the monitored support; counts as defined
    defined,
  };
  Kind kind = Kind::null;
  ComponentState state;  // meaningful only when defined

  static RgtSlot null_slot() { return {}; }
  static RgtSlot unmonitored() { return {Kind::unmonitored, {}}; }
  static RgtSlot defined(ComponentState s) { return {Kind::defined, std::move(s)}; }

  friend bool operator==(const RgtSlot&, const RgtSlot&) = default;
};

/// (v_1, ..., v_n, a): component slots plus the interaction that produced the state.
struct RgtTuple {
  std::vector<RgtSlot> slots;
  std::size_t tag = 0;  // index into RgtContext::tags

  bool complete() const noexcept;
  friend bool operator==(const RgtTuple&, const RgtTuple&) = default;
};

/// Static data the algorithms need; derived once from a transformed system.
struct RgtContext {
  std::size_t n = 0;
  std::vector<bool> monitored;    // per component
  std::vector<std::string> tags;  // γ
  RgtVariant variant = RgtVariant::guarded;

  static RgtContext from(const CompositeSystem& transformed);
  std::optional<std::size_t> tag_index(std::string_view tag) const noexcept;
  bool new_guarded() const noexcept {
    return variant == RgtVariant::guarded || variant == RgtVariant::unguarded_upd;
  }
  bool upd_guarded() const noexcept {
    return variant == RgtVariant::guarded || variant == RgtVariant::unguarded_new;
  }
};

/// Variables of the RGT atom. V holds the logical sequence from position `base + 1`;
/// tuples before that have been delivered and discarded. The initial tuple is not stored:
/// position 1 is the tuple of the first interaction.
struct RgtState {
  std::vector<RgtTuple> V;
  std::size_t base = 0;
  std::size_t m = 1;  // 1-based cursor, base < m <= base + |V| + 1
  std::vector<bool> gs;
  std::vector<bool> z;
  std::vector<ComponentState> mirror;     // X^r of each component, as last exported
  std::vector<RgtSlot> delivered;         // X^r_c, filled by get
  std::optional<std::size_t> delivered_tag;
  bool retain_delivered = false;

  std::size_t length() const noexcept { return base + V.size(); }
  /// Logical 1-based access; requires base < j <= length().
  const RgtTuple& at(std::size_t j) const { return V[j - base - 1]; }
  RgtTuple& at(std::size_t j) { return V[j - base - 1]; }

  friend bool operator==(const RgtState&, const RgtState&) = default;
};

RgtState rgt_init(const RgtContext& ctx, const SystemState& init, bool retain_delivered = false);

bool is_stable(const RgtState& s) noexcept;

/// Algorithm new(a). Involved monitored components get null slots and z_i := true; a
/// monitored uninvolved component that is still busy also gets null.
/// Errors: Error(guard_violated) when the variant guards new and s is unstable.
void rgt_new(RgtState& s, const RgtContext& ctx, std::size_t tag,
             const std::vector<bool>& involved);

/// Algorithm upd(i): z_i := false, mirror_i := exported, null slots i := exported, then check.
/// Errors: Error(guard_violated); Error(not_busy) when z_i is false.
void rgt_upd(RgtState& s, const RgtContext& ctx, std::size_t i, const ComponentState& exported);

/// Algorithm check(): gs_{V(j).tag} := complete(V(j)) for each undelivered j whose flag is false.
void rgt_check(RgtState& s, const RgtContext& ctx);

/// Tag the delivery port may fire for: gs of V(m)'s tag is set.
std::optional<std::size_t> rgt_deliverable(const RgtState& s) noexcept;

struct RgtDelivery {
  std::vector<RgtSlot> slots;
  std::size_t tag = 0;

  /// Unmonitored slots print as location "-" with no variables.
  SystemState to_state() const;
};

/// Algorithm get(): copies V(m), resets its flag, m := m + 1, then check.
/// Errors: Error(nothing_to_deliver).
RgtDelivery rgt_get(RgtState& s, const RgtContext& ctx);

/// Tuple-state equivalence: monitored slot i is null iff q_i is busy, else equals q_i;
/// unmonitored slots carry the Unmonitored marker.
bool rgt_equivalent(const RgtTuple& v, const SystemState& q, const std::vector<bool>& monitored);

/// Control abstraction used for state-space exploration. Keeps what decides future
/// enabledness: whether some undelivered tuple is complete (with the tag of V(m)), and
/// the sequence of distinct null masks of incomplete tuples. Slot contents, delivered
/// tuples and the mirror are dropped.
RgtState rgt_abstract(const RgtState& s, const RgtContext& ctx);

}  // namespace cbsrv
