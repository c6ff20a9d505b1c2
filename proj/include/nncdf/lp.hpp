#pragma once

#include <vector>

namespace nncdf {

// Dense two-phase primal simplex for the small LPs this project needs
// (feasibility of halfspace systems, redundancy tests, coordinate ranges,
// Chebyshev centers). Variables are free; constraints are A x <= b.
struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };
    Status status = Status::Infeasible;
    std::vector<double> x; // maximizer when Optimal
    double value = 0.0;    // c'x at the maximizer
};

// max c'x  s.t.  A[i]'x <= b[i] for all i, x free.
// Rows should be reasonably scaled (callers normalize halfspace rows).
LpResult lp_solve(const std::vector<std::vector<double>>& A,
                  const std::vector<double>& b,
                  const std::vector<double>& c,
                  double tol = 1e-9);

// Chebyshev center: max r s.t. a_i'x + r*||a_i|| <= b_i. Returns Infeasible
// when the system is empty; value = inradius when Optimal (may be Unbounded
// for unbounded systems).
LpResult chebyshev_center(const std::vector<std::vector<double>>& A,
                          const std::vector<double>& b,
                          double tol = 1e-9);

} // namespace nncdf
