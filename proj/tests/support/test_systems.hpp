#pragma once

#include "tfred/examples.hpp"

namespace tfred::testing {

/// x1' = -x1 slow, x2' = -x2 / eps fast. Closed-form flows on both scales.
ExampleSystem linear_toy(const ParamMap& p = {});

/// Dh0 is a nilpotent Jordan block: rank one but no direct sum decomposition.
ExampleSystem jordan_block(const ParamMap& p = {});

/// Fast relaxation onto w = u, van der Pol oscillation on the slow plane.
/// The limit cycle makes errors grow with time.
ExampleSystem vdp_nonexample(const ParamMap& p = {});

/// Reversible Michaelis-Menten with an invariance region cut below the
/// stoichiometric bound.
ExampleSystem mm_shrunken(const ParamMap& p);

/// Builtin systems plus the four above.
Registry test_registry();

}  // namespace tfred::testing
