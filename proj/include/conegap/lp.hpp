#pragma once

#include "conegap/common.hpp"

#include <optional>

namespace conegap {

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

struct LpResult {
    LpStatus status = LpStatus::NumericalFailure;
    Vec x;
    double objective = 0.0;
};

// maximize c.x  subject to  A x <= b,  E x = d,  x free.
// Callers bound the feasible region themselves (box rows in A) so the
// problem is never genuinely unbounded. Dense two-phase simplex, Bland's
// rule; intended for small problems (tens of variables, hundreds of rows).
LpResult solve_lp(const Vec& c, const Mat& A, const Vec& b, const Mat& E,
                  const Vec& d);

}  // namespace conegap
