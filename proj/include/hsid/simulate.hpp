#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hsid/types.hpp"

namespace hsid {

enum class NoiseKind { kGaussian, kRademacher };

/// Raised when the simulated state norm exceeds the overflow guard (1e12),
/// which happens when an unstable system is run for too long.
struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-step decomposition of the output noise, materialized on demand:
/// y_n = g0 X_n + xbar_part_n + w_part_n + eps_part_n, where xbar_part is the
/// input-tail term gbar Xbar_n, w_part the process-noise term h W_n, and
/// eps_part the measurement noise. Rows align with Trajectory::y.
struct NoiseParts {
  MatrixXd xbar_part;  // N x p
  MatrixXd w_part;     // N x p
  MatrixXd eps_part;   // N x p
};

/// One simulated input/output path. u.row(i) is the input applied at time i
/// (0-based); y.row(i) is the output y_{i+1}, so y_n for n in {1..N} is
/// y.row(n-1). The hidden state after the last step is kept for diagnostics.
struct Trajectory {
  MatrixXd u;  // N x r
  MatrixXd y;  // N x p
  VectorXd x_final;
  std::uint64_t seed = 0;
  std::optional<NoiseParts> parts;

  int length() const { return static_cast<int>(u.rows()); }
  int r() const { return static_cast<int>(u.cols()); }
  int p() const { return static_cast<int>(y.cols()); }
};

/// Stacked regression matrices of the windowed input/output relation:
/// row l-2T of X is [u_{l-1}^T, u_{l-2}^T, ..., u_{l-2T+1}^T] and the same
/// row of Y is y_l^T, for l in {2T, ..., N}.
struct RegressionData {
  MatrixXd Y;  // N_bar x p
  MatrixXd X;  // N_bar x (2T-1) r
  int N_bar = 0;
  int T = 0;
};

/// Runs the state recursion from x_0 = 0 with iid draws from a counter RNG
/// keyed by (seed, stream). When diag_T > 0 the noise decomposition for
/// window order diag_T is materialized into Trajectory::parts.
Trajectory simulate(const StateSpace& sys, const NoiseSpec& noise, int N,
                    std::uint64_t seed, NoiseKind kind = NoiseKind::kGaussian,
                    int diag_T = 0);

RegressionData build_regression(const Trajectory& traj, int T);

/// CSV interop; columns t, u_1..u_r, y_1..y_p with rows t = 1..N (row t holds
/// the input applied at time t-1 and the output observed at time t).
void trajectory_to_csv(const Trajectory& traj, const std::string& path);
Trajectory trajectory_from_csv(const std::string& path);

}  // namespace hsid
