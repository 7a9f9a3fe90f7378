#pragma once

#include "wipmf/types.hpp"

namespace wipmf {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    Vector x;
};

// max c.x  s.t.  A x = b, x >= 0. Dense two-phase simplex with Bland's rule.
LpResult lp_maximize(const Vector& c, const Matrix& A, const Vector& b, double tol = 1e-11);

} // namespace wipmf
