#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cbsrv/model.hpp"
#include "cbsrv/state.hpp"

namespace cbsrv {

/// q0 · a1 · q1 ⋯ as · qs: a global prefix followed by partial states.
struct AccSeq {
  std::vector<SystemState> states;  // s + 1 entries
  std::vector<std::string> labels;  // s entries
  std::size_t first_partial = 1;    // states before this index are global

  std::size_t length() const noexcept { return states.size() + labels.size(); }
  friend bool operator==(const AccSeq& a, const AccSeq& b) {
    return a.states == b.states && a.labels == b.labels;
  }
};

/// Errors: Error(partial_state_rejected).
AccSeq acc_init(const SystemState& init);

/// An interaction appends (a, q); β_i maps upd(q, ·) over every stored state.
/// Errors: Error(malformed_stream) on arity mismatch or an out-of-range β.
void acc_step(AccSeq& s, const Label& label, const SystemState& q);

/// Per slot: a stored busy slot takes the incoming ready one, otherwise the stored slot stays.
/// Errors: Error(arity_mismatch).
SystemState upd(const SystemState& incoming, const SystemState& stored);

struct WitnessPrefix {
  Trace trace;  // global states only
  std::optional<std::string> trailing;

  std::size_t element_count() const noexcept {
    return 1 + 2 * trace.steps.size() + (trailing ? 1 : 0);
  }
  friend bool operator==(const WitnessPrefix&, const WitnessPrefix&) = default;
};

/// Longest prefix ending in a global state, followed by the next label when the sequence
/// continues past it.
WitnessPrefix discriminant(const AccSeq& s);

/// A state or an interaction name of the reconstructed trace.
using WitnessElement = std::variant<SystemState, std::string>;

std::vector<WitnessElement> flatten(const WitnessPrefix& w);

/// Online reconstruction. Each call returns only the elements that joined the witness prefix.
class RgtStream {
 public:
  explicit RgtStream(SystemState init);

  /// The initial state; call once before the first push.
  std::vector<WitnessElement> start();
  std::vector<WitnessElement> push(const Label& label, const SystemState& q);

  const AccSeq& acc() const noexcept { return acc_; }
  WitnessPrefix current() const { return discriminant(acc_); }
  std::size_t emitted() const noexcept { return emitted_; }

 private:
  std::vector<WitnessElement> emit_new();

  AccSeq acc_;
  std::size_t emitted_ = 0;  // elements already handed out
};

/// RGT(σ) in one pass.
WitnessPrefix rgt(const Trace& partial_trace);

/// Replays interactions_of(σ) in the global system from its initial state.
/// Errors: Error(replay_failed).
Trace witness_oracle(const CompositeSystem& global, const Trace& partial_trace);

/// Drops variable `var` from every component state.
SystemState strip_var(const SystemState& q, std::string_view var);
Trace strip_var(const Trace& t, std::string_view var);

}  // namespace cbsrv
