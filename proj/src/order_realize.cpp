#include "hsid/order_realize.hpp"

#include <Eigen/SVD>

#include <cmath>

#include "hsid/lti_core.hpp"

namespace hsid {

namespace {

void svd_with_signs(const MatrixXd& M, MatrixXd& U, VectorXd& S, MatrixXd& V) {
  Eigen::JacobiSVD<MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  U = svd.matrixU();
  S = svd.singularValues();
  V = svd.matrixV();
  fix_svd_signs(U, V);
}

}  // namespace

OrderEstimate estimate_order(const HankelMatrix& H_hat, double xi) {
  if (!(xi > 0.0)) throw std::invalid_argument("estimate_order: xi must be > 0");
  OrderEstimate est;
  est.xi = xi;
  est.singular_values = Eigen::BDCSVD<MatrixXd>(H_hat.data).singularValues();
  est.d_check = 0;
  for (Eigen::Index i = 0; i < est.singular_values.size(); ++i)
    if (est.singular_values(i) >= 2.0 * xi) ++est.d_check;
  return est;
}

MatrixXd truncate_svd(const MatrixXd& M, int d) {
  const int maxd = static_cast<int>(std::min(M.rows(), M.cols()));
  if (d < 0 || d > maxd) throw std::invalid_argument("truncate_svd: rank out of range");
  if (d == 0) return MatrixXd::Zero(M.rows(), M.cols());
  MatrixXd U, V;
  VectorXd S;
  svd_with_signs(M, U, S, V);
  return U.leftCols(d) * S.head(d).asDiagonal() * V.leftCols(d).transpose();
}

MatrixXd truncate_svd(const HankelMatrix& H_hat, int d) { return truncate_svd(H_hat.data, d); }

Realization ho_kalman(const MatrixXd& H_hat, int d, int T) {
  if (T < d + 1) throw std::invalid_argument("ho_kalman: requires T >= d + 1");
  if (H_hat.rows() % T != 0 || H_hat.cols() % T != 0)
    throw std::invalid_argument("ho_kalman: H_hat must be Tp x Tr");
  const int p = static_cast<int>(H_hat.rows()) / T;
  const int r = static_cast<int>(H_hat.cols()) / T;

  Realization real;
  real.d_hat = d;
  if (d == 0) {
    real.A = MatrixXd::Zero(0, 0);
    real.B = MatrixXd::Zero(0, r);
    real.C = MatrixXd::Zero(p, 0);
    real.source_singulars = VectorXd::Zero(0);
    return real;
  }

  MatrixXd U, V;
  VectorXd S;
  svd_with_signs(H_hat, U, S, V);
  if (!(S(d - 1) > 0.0))
    throw std::invalid_argument("ho_kalman: s_d(H_hat) must be positive");
  real.source_singulars = S.head(d);

  const VectorXd sqrtS = S.head(d).cwiseSqrt();
  const MatrixXd O = U.leftCols(d) * sqrtS.asDiagonal();           // Tp x d
  const MatrixXd Ctrl = sqrtS.asDiagonal() * V.leftCols(d).transpose();  // d x Tr

  const MatrixXd Oplus = O.topRows(static_cast<Eigen::Index>(p) * (T - 1));
  const MatrixXd Ominus = O.bottomRows(static_cast<Eigen::Index>(p) * (T - 1));

  // pinv(O+) via SVD with a relative cutoff
  Eigen::JacobiSVD<MatrixXd> svdO(Oplus, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sO = svdO.singularValues();
  const double cutoff = 1e-10 * sO(0);
  if (!(sO(d - 1) > cutoff))
    throw std::runtime_error("ho_kalman: unobservable truncation (s_d(O+) below pinv tolerance)");
  VectorXd inv = sO;
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = sO(i) > cutoff ? 1.0 / sO(i) : 0.0;
  const MatrixXd pinvOplus =
      svdO.matrixV() * inv.asDiagonal() * svdO.matrixU().transpose();

  real.A = pinvOplus * Ominus;
  real.B = Ctrl.leftCols(r);
  real.C = O.topRows(p);
  return real;
}

StabilityMargin stability_margin(double H_hat_err_S2, double s_d_Oplus, double s_d_H) {
  if (H_hat_err_S2 < 0.0 || s_d_Oplus < 0.0 || s_d_H < 0.0)
    throw std::invalid_argument("stability_margin: inputs must be non-negative");
  StabilityMargin m;
  m.rhs = std::sqrt(std::sqrt(2.0) - 1.0) * s_d_Oplus * std::sqrt(s_d_H) / (2.0 * std::sqrt(2.0));
  m.satisfied = H_hat_err_S2 <= m.rhs;
  m.slack = m.rhs - H_hat_err_S2;
  return m;
}

}  // namespace hsid
