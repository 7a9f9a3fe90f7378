#pragma once

#include "wipmf/bandit.hpp"

namespace wipmf::fixtures {

// Three-state reference model (stable fixed points, singular at alpha = 0.4).
BanditModel reference3();
// Three-state models whose mean-field map has a period-2 cycle at alpha = 0.4;
// k in {1, 2, 3}.
BanditModel cycle_example(int k);
// P0 = P1 = all 1/2, R1 = (1, 0): the fixed point is singular at alpha = 1/2.
BanditModel singular2();

} // namespace wipmf::fixtures
