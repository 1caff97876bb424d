#pragma once

#include "varinfer/model.hpp"

namespace varinfer {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Vector x;
    double objective = 0.0;
};

/// Minimizes c^T x subject to A x = b, x >= 0, by two-phase primal simplex
/// with Bland's rule. Dense, intended for small problems (a few hundred
/// variables at most).
LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& c,
                  int max_iter = 0);

}  // namespace varinfer
