#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsid {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Discrete-time LTI state-space triple (A, B, C) with state dimension d,
/// input dimension r and output dimension p:
///   x_{i+1} = A x_i + B u_i + w_i,   y_i = C x_i + v_i.
struct StateSpace {
  MatrixXd A;  // d x d
  MatrixXd B;  // d x r
  MatrixXd C;  // p x d

  StateSpace() = default;
  StateSpace(MatrixXd A_, MatrixXd B_, MatrixXd C_);

  int d() const { return static_cast<int>(A.rows()); }
  int r() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }
};

/// Standard deviations of the three driving noise sources. The input
/// excitation sigma_u must be strictly positive; the disturbances may be zero.
struct NoiseSpec {
  double sigma_u = 1.0;
  double sigma_w = 0.0;
  double sigma_v = 0.0;

  void validate() const {
    if (!(sigma_u > 0.0)) throw std::invalid_argument("NoiseSpec: sigma_u must be > 0");
    if (sigma_w < 0.0 || sigma_v < 0.0)
      throw std::invalid_argument("NoiseSpec: noise std devs must be >= 0");
  }
};

/// Ordered sequence [g_1, ..., g_L] of p x r Markov parameter blocks.
struct MarkovSeq {
  std::vector<MatrixXd> blocks;
  int p = 0;
  int r = 0;

  MarkovSeq() = default;
  MarkovSeq(std::vector<MatrixXd> blocks_, int p_, int r_);

  int size() const { return static_cast<int>(blocks.size()); }

  /// Stacked column form [g_1^T; g_2^T; ...; g_L^T], shape (L*r) x p.
  /// This is the regression-coefficient orientation g^* used by the solver.
  MatrixXd stacked() const;
  static MarkovSeq from_stacked(const MatrixXd& gt, int p, int r);
};

/// Block-Hankel matrix of order T built from 2T-1 blocks of shape p x r.
/// Block (i, j) equals block (i', j') whenever i + j = i' + j'; this is
/// verified on construction.
struct HankelMatrix {
  MatrixXd data;  // (T*p) x (T*r)
  int T = 0;
  int p = 0;
  int r = 0;

  HankelMatrix() = default;
  HankelMatrix(MatrixXd data_, int T_, int p_, int r_);
};

}  // namespace hsid
