#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cbsrv/model.hpp"
#include "cbsrv/monitor.hpp"
#include "cbsrv/semantics.hpp"
#include "cbsrv/state.hpp"

namespace cbsrv {

/// A schedulable move: an interaction of the system, a β completion, or an RGT delivery.
struct Move {
  enum class Kind { interaction, beta, delivery };
  Kind kind;
  std::size_t interaction;  // index in the system
  std::string name;

  friend bool operator==(const Move&, const Move&) = default;
};

struct SeededRandom {
  std::uint64_t seed = 0;
};

/// Labels consumed in order; deliveries are fired as soon as they are enabled.
/// Each label must be enabled when consumed, else Error(not_enabled).
struct FixedSequence {
  std::vector<Label> labels;
};

/// Returns the position of the chosen move in `enabled` (never empty).
struct Interactive {
  std::function<std::size_t(const std::vector<Move>& enabled)> choose;
};

using SchedulerPolicy = std::variant<SeededRandom, FixedSequence, Interactive>;

/// Uniform duration in [min, max] for the computation step of a component.
struct BusyDelay {
  std::chrono::microseconds min{0};
  std::chrono::microseconds max{0};
};

struct EngineConfig {
  SchedulerPolicy policy = SeededRandom{};
  std::size_t max_steps = 100;  // γ interactions
  BusyDelay busy_delay;
  std::map<std::string, BusyDelay> busy_delay_for;  // per component name
  bool drain = true;  // flush pending β's and deliveries before returning
  bool real_time = false;
  std::size_t threads = 1;  // worker pool size in real-time mode
  bool retain_delivered = false;
  /// Monitor for global-mode runs; monitored runs embed theirs in the system.
  std::shared_ptr<const MonitorSpec> monitor;
  /// Called after every fired move with the resulting state (coordinator thread).
  std::function<void(const Move&, const RunState&)> observer;
};

enum class Outcome { completed, deadlock };

struct DeliveryRecord {
  std::size_t after_step;  // number of trace steps emitted before the delivery
  SystemState state;
  std::string tag;
  std::optional<Verdict> verdict;
};

struct RunCounts {
  std::size_t gamma = 0;      // γ interactions executed
  std::size_t beta = 0;       // β events
  std::size_t delivered = 0;  // reconstructed global states handed out
  std::size_t fired = 0;      // every interaction of the executed system
  std::map<Verdict, std::size_t> verdicts;

  /// Interactions beyond γ ones: β notifications plus deliveries.
  std::size_t extra() const noexcept { return fired - gamma; }
};

struct RunResult {
  Trace trace;
  std::vector<DeliveryRecord> deliveries;
  std::vector<Verdict> verdicts;
  Outcome outcome = Outcome::completed;
  RunCounts counts;
  RunState final_state;
  std::chrono::nanoseconds wall{0};
};

/// Sequential interpretation. Errors: Error(not_enabled) from FixedSequence.
RunResult run_global(const CompositeSystem& sys, const EngineConfig& cfg);

/// Partial-state execution (a to_partial system, or a transformed one with RGT).
/// Virtual-time mode (default) is single-threaded and deterministic under SeededRandom:
/// every enabled move, including β completions of busy components, is a candidate.
/// Real-time mode runs computation steps on a pool of `threads` workers.
/// Errors: Error(not_enabled); Error(worker_panicked).
RunResult run_partial_concurrent(const CompositeSystem& partial, const EngineConfig& cfg);

}  // namespace cbsrv
