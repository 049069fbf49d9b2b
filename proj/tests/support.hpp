#pragma once

// Generators and independent oracles shared by the unit, property and acceptance tests.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cbsrv/cbsrv.hpp"

namespace cbsrv::testing {

/// Small random systems: up to 4 components, up to 6 interactions, 2-3 locations each,
/// one Int variable with guards that keep it within a few units of zero.
CompositeSystem random_system(std::mt19937_64& rng);

/// Reference interpreter for the global semantic rule, written directly from the
/// definition without the indexed Semantics class. Returns nullopt when `a` is not enabled.
std::optional<SystemState> ref_step(const CompositeSystem& sys, const SystemState& q, const Interaction& a);

/// Replays `labels` with ref_step from the initial state; nullopt if one is not enabled.
std::optional<Trace> ref_replay(const CompositeSystem& sys, const std::vector<std::string>& labels);

/// States and labels interleaved, for comparing against RgtStream emissions.
std::vector<WitnessElement> elements_of(const Trace& t);

/// Locations of a state with busy slots shown as "⊥", e.g. "(⊥,done,free,delivered)".
std::string loc_tuple(const SystemState& q);

/// Task system pieces, built once.
const CompositeSystem& task();
const CompositeSystem& task_partial();
const MonitorSpec& task_monitor();
/// Transformed Task with the homogeneity monitor attached.
const CompositeSystem& task_monitored();

}  // namespace cbsrv::testing
