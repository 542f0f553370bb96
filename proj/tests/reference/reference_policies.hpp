#pragma once

#include <cstdint>
#include <vector>

#include "ub3/core.hpp"

// Deliberately naive re-implementations used as test oracles. They share no
// code with the library beyond the Environment interface, and draw samples
// in the same order so outputs can be compared trial for trial.

namespace ref {

int ub3_reference(const ub3::Environment& env, std::int64_t budget, ub3::Rng& rng);
int seqhalv_reference(const ub3::Environment& env, std::int64_t budget, ub3::Rng& rng);

}  // namespace ref
