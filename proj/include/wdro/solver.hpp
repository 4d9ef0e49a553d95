#pragma once

#include <string>
#include <vector>

#include "wdro/conic_program.hpp"

namespace wdro {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit, TimeLimit, Numerical };

const char* to_string(SolveStatus status);

struct SolverConfig {
  /// Allowed scaled primal and dual residual at the returned point.
  double feasibility_tol = 1e-9;
  /// Target bound on (objective - optimum) relative to max(1, |objective|).
  double gap_tol = 1e-9;
  int max_iterations = 500;  // Newton steps, including any domain phase
  double time_limit_seconds = kInfinity;
  bool verbose = false;
  /// Hint to prefer a dual formulation. The built-in backend always works on
  /// the primal-dual pair; the flag is accepted and recorded.
  bool prefer_dual = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Numerical;
  std::vector<double> x;
  double objective = 0.0;
  /// Complementarity w'z at exit; estimates the distance to the optimal value.
  double gap = kInfinity;
  double solve_seconds = 0.0;
  int iterations = 0;
  std::string message;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Solves `program` with a primal-dual interior-point method (Mehrotra
/// predictor-corrector) after rewriting cones as smooth convex constraints.
/// Softplus-style cone pairs whose auxiliaries occur nowhere else are merged
/// into log-sum-exp constraints and the auxiliaries eliminated.
/// Deterministic for a given program and config; holds no global state.
SolveResult solve(const ConicProgram& program, const SolverConfig& config = {});

}  // namespace wdro
