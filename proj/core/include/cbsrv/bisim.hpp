#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cbsrv/model.hpp"
#include "cbsrv/state.hpp"

namespace cbsrv {

struct StateCodec;

/// Finite LTS with interned states. State 0 is initial.
struct ExplicitLts {
  struct Edge {
    std::uint32_t src;
    std::uint32_t label;
    std::uint32_t dst;
  };

  std::size_t num_states = 0;
  std::vector<std::string> labels;
  std::vector<bool> hidden;  // per label
  std::vector<Edge> edges;

  /// Present when built by explore(): decodes the component part of a state.
  std::shared_ptr<const StateCodec> codec;
  std::vector<std::int64_t> keys;        // flattened encodings
  std::vector<std::size_t> key_offsets;  // num_states + 1 entries

  std::uint32_t initial() const noexcept { return 0; }
  std::optional<std::uint32_t> label_index(std::string_view name) const;
  SystemState components(std::uint32_t state) const;
  /// Whether the reconstruction part of the state is stable (no pending delivery).
  bool stable(std::uint32_t state) const;
  /// Looks a state up by its component part; systems without RGT only.
  std::optional<std::uint32_t> find(const SystemState& comps) const;
};

using HidePredicate = std::function<bool(std::string_view label)>;

bool is_beta_label(std::string_view label) noexcept;      // "beta_<C>"
bool is_delivery_label(std::string_view label) noexcept;  // "out_<a>"

/// Breadth-first exploration of the semantic rule. With an RGT component the
/// reconstruction state is replaced by rgt_abstract() after every step; the quotient is
/// weakly bisimilar to the exact system once delivery labels are hidden.
/// Errors: Error(bound_exceeded) when more than `state_bound` states are found.
ExplicitLts explore(const CompositeSystem& sys, std::size_t state_bound, const HidePredicate& hide);

struct BisimResult {
  bool equivalent = false;
  std::size_t blocks = 0;
  std::vector<std::uint32_t> block_left;   // block of each state of the first LTS
  std::vector<std::uint32_t> block_right;  // of the second
  /// Observable labels, executable from the initial state in exactly one of the two LTSs.
  std::vector<std::string> counterexample;
  /// Set when `equivalent` is false: which side can execute the counterexample.
  bool counterexample_in_left = false;

  bool related(std::uint32_t left, std::uint32_t right) const {
    return block_left[left] == block_right[right];
  }
  /// Every related pair; can be large.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> relation() const;
};

/// Weak bisimilarity by saturation and signature refinement over the disjoint union.
/// Labels are matched by name; each LTS hides its own `hidden` labels.
BisimResult weak_bisimilar(const ExplicitLts& l1, const ExplicitLts& l2);

/// Observable label sequence accepted by exactly one LTS, or empty if none is found within
/// `max_depth`. Both LTSs are determinized on the fly over weak moves.
std::optional<std::pair<std::vector<std::string>, bool>> find_distinguishing_trace(
    const ExplicitLts& l1, const ExplicitLts& l2, std::size_t max_depth = 256);

}  // namespace cbsrv
