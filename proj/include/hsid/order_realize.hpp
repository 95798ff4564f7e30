#pragma once

#include "hsid/types.hpp"

namespace hsid {

struct OrderEstimate {
  int d_check = 0;
  double xi = 0.0;
  VectorXd singular_values;  // descending
};

/// State-space triple produced by the Ho-Kalman map, together with the
/// retained Hankel singular values.
struct Realization {
  MatrixXd A;  // d_hat x d_hat
  MatrixXd B;  // d_hat x r
  MatrixXd C;  // p x d_hat
  int d_hat = 0;
  VectorXd source_singulars;
};

struct StabilityMargin {
  bool satisfied = false;
  double slack = 0.0;
  double rhs = 0.0;
};

/// Counts singular values >= 2 xi (inclusive threshold).
OrderEstimate estimate_order(const HankelMatrix& H_hat, double xi);

/// Best rank-d approximation sum_{i<=d} s_i u_i v_i^T with deterministic
/// singular-vector signs.
MatrixXd truncate_svd(const HankelMatrix& H_hat, int d);
MatrixXd truncate_svd(const MatrixXd& M, int d);

/// Balanced Ho-Kalman realization from the rank-d truncated SVD U S V^T of a
/// Tp x Tr Hankel estimate: O = U S^{1/2}, Ctrl = S^{1/2} V^T,
/// A = pinv(O+) O- with O+ / O- dropping the last / first output block-row,
/// B the first r columns of Ctrl and C the first p rows of O.
/// Requires T >= d + 1.
Realization ho_kalman(const MatrixXd& H_hat, int d, int T);

/// Theorem-style robustness check: err <= (sqrt(2)-1)^{1/2} s_d(O+)
/// sqrt(s_d(H)) / (2 sqrt(2)), boundary inclusive.
StabilityMargin stability_margin(double H_hat_err_S2, double s_d_Oplus, double s_d_H);

}  // namespace hsid
