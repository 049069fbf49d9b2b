#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbsrv/model.hpp"

namespace cbsrv {

/// Adds `loc` (initialised to the index of the initial location), appends
/// `loc := <index of target>` to every β half, and exports X ∪ {loc} on β.
/// Errors: Error(already_instrumented); Error(invalid_argument) if not in partial-state form.
AtomicComponent instrument_atomic(const AtomicComponent& partial);

/// Builds γ^r(B^r_1, ..., B^r_n, RGT) from a partial-state system.
/// `monitored_vars` lists qualified variables ("Worker1.x", or "Worker1.loc" for location
/// reads); components outside their support stay uninstrumented. nullopt monitors every
/// component.
/// Errors: Error(unknown_monitored_variable); Error(invalid_argument) for a non-partial input.
CompositeSystem transform_system(const CompositeSystem& partial,
                                 const std::optional<std::vector<std::string>>& monitored_vars,
                                 RgtVariant variant = RgtVariant::guarded);

}  // namespace cbsrv
