#pragma once

#include <cstdint>
#include <optional>

#include "hsid/simulate.hpp"
#include "hsid/types.hpp"

namespace hsid {

/// The Hankel nuclear-norm penalized least-squares problem
///   min_g  (1/N_bar) |Y - X g^*|_F^2 + lambda |H g^*|_{S1}.
struct PenalizedProblem {
  RegressionData data;
  double lambda = 0.0;
  int T = 0;
  int p = 0;
  int r = 0;

  PenalizedProblem(RegressionData data_, double lambda_, int p_, int r_);
};

struct SolverOptions {
  double rho = 1.0;
  int max_iter = 5000;
  double tol_abs = 1e-8;
  double tol_rel = 1e-6;
  /// When false, a numerically rank-deficient X is a precondition error;
  /// when true, a 1e-10 ridge is added to the g-update normal matrix.
  bool allow_rank_deficient = false;
};

struct SolverReport {
  MarkovSeq g_hat;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  /// Frobenius norm of the Fermat-rule stationarity residual
  /// (2/N_bar) X^T (X g^* - Y) + lambda * pullback(V) at the certificate V.
  double stationarity_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double rho_final = 0.0;
};

/// Optional per-iteration trace row (debug flag on the CLI).
struct IterTraceRow {
  int iter;
  double objective;
  double primal_res;
  double dual_res;
};

double objective_value(const PenalizedProblem& prob, const MarkovSeq& g);

/// Singular-value soft thresholding, the proximal operator of tau |.|_{S1}:
/// U max(S - tau, 0) V^T.
MatrixXd svd_soft_threshold(const MatrixXd& M, double tau);

/// ADMM on the splitting Z = H g^*. The g-update solves the normal equations
/// of the quadratic part (the Hankel Gram is the diagonal anti-diagonal
/// multiplicity weighting, so one SPD factorization per rho serves all output
/// channels); the Z-update is singular-value soft thresholding; rho adapts by
/// residual balancing.
SolverReport solve_admm(const PenalizedProblem& prob, const SolverOptions& opts = {},
                        const MarkovSeq* warm_start = nullptr,
                        std::vector<IterTraceRow>* trace = nullptr);

/// Independent correctness reference: deflected subgradient descent with a
/// Polyak step against an adaptive target gap. Only intended for small
/// problems (g dimension <= 200 entries) and used by tests as the optimum
/// oracle; it shares no code path with solve_admm beyond the objective.
MarkovSeq oracle_solve(const PenalizedProblem& prob, int iters = 300000,
                       std::uint64_t seed = 0);

}  // namespace hsid
