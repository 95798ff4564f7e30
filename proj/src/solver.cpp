#include "hsid/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

#include "hsid/lti_core.hpp"
#include "hsid/rng.hpp"

namespace hsid {

namespace {

// thin SVD; Jacobi is both faster and more accurate at these block sizes
void thin_svd(const MatrixXd& M, MatrixXd& U, VectorXd& S, MatrixXd& V) {
  if (std::min(M.rows(), M.cols()) <= 32) {
    Eigen::JacobiSVD<MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    U = svd.matrixU();
    S = svd.singularValues();
    V = svd.matrixV();
  } else {
    Eigen::BDCSVD<MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    U = svd.matrixU();
    S = svd.singularValues();
    V = svd.matrixV();
  }
}

MatrixXd hankel_of_stacked(const MatrixXd& gt, int T, int p, int r) {
  MatrixXd H(static_cast<Eigen::Index>(T) * p, static_cast<Eigen::Index>(T) * r);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < T; ++j)
      H.block(i * p, j * r, p, r) = gt.middleRows((i + j) * r, r).transpose();
  return H;
}

double nuclear_norm(const MatrixXd& M) {
  MatrixXd U, V;
  VectorXd S;
  thin_svd(M, U, S, V);
  return S.sum();
}

double objective_of_stacked(const MatrixXd& Y, const MatrixXd& X, const MatrixXd& gt,
                            double lambda, int T, int p, int r, int Nbar) {
  const double fit = (Y - X * gt).squaredNorm() / Nbar;
  return fit + lambda * nuclear_norm(hankel_of_stacked(gt, T, p, r));
}

}  // namespace

PenalizedProblem::PenalizedProblem(RegressionData data_, double lambda_, int p_, int r_)
    : data(std::move(data_)), lambda(lambda_), T(data.T), p(p_), r(r_) {
  if (lambda <= 0.0) throw std::invalid_argument("PenalizedProblem: lambda must be > 0");
  if (data.X.cols() != static_cast<Eigen::Index>(2 * T - 1) * r || data.Y.cols() != p)
    throw std::invalid_argument("PenalizedProblem: data shape does not match (T, p, r)");
}

double objective_value(const PenalizedProblem& prob, const MarkovSeq& g) {
  return objective_of_stacked(prob.data.Y, prob.data.X, g.stacked(), prob.lambda, prob.T,
                              prob.p, prob.r, prob.data.N_bar);
}

MatrixXd svd_soft_threshold(const MatrixXd& M, double tau) {
  if (tau < 0.0) throw std::invalid_argument("svd_soft_threshold: tau must be >= 0");
  if (tau == 0.0) return M;
  MatrixXd U, V;
  VectorXd S;
  thin_svd(M, U, S, V);
  const VectorXd Sthr = (S.array() - tau).cwiseMax(0.0);
  return U * Sthr.asDiagonal() * V.transpose();
}

SolverReport solve_admm(const PenalizedProblem& prob, const SolverOptions& opts,
                        const MarkovSeq* warm_start, std::vector<IterTraceRow>* trace) {
  const MatrixXd& X = prob.data.X;
  const MatrixXd& Y = prob.data.Y;
  const int T = prob.T, p = prob.p, r = prob.r;
  const int Nbar = prob.data.N_bar;
  const Eigen::Index n = X.cols();

  const MatrixXd XtX2 = (2.0 / Nbar) * (X.transpose() * X);
  const MatrixXd XtY2 = (2.0 / Nbar) * (X.transpose() * Y);

  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(XtX2);
    const double emax = es.eigenvalues().maxCoeff();
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(emax, 1e-300) &&
        !opts.allow_rank_deficient)
      throw std::invalid_argument(
          "solve_admm: X is rank-deficient; enable the ridge fallback to proceed");
  }

  VectorXd diag_w(n);
  for (int k = 0; k < 2 * T - 1; ++k)
    diag_w.segment(static_cast<Eigen::Index>(k) * r, r).setConstant(hankel_weight(k + 1, T));

  double rho = opts.rho;
  const double ridge = opts.allow_rank_deficient ? 1e-10 : 0.0;
  Eigen::LLT<MatrixXd> llt;
  auto refactor = [&] {
    MatrixXd normal = XtX2;
    normal.diagonal() += rho * diag_w;
    normal.diagonal().array() += ridge;
    llt.compute(normal);
  };
  refactor();

  MatrixXd Gt = warm_start ? warm_start->stacked() : MatrixXd::Zero(n, p);
  MatrixXd Z = hankel_of_stacked(Gt, T, p, r);
  MatrixXd U = MatrixXd::Zero(Z.rows(), Z.cols());

  SolverReport report;
  const double eps_scale_pri = std::sqrt(static_cast<double>(Z.size()));
  const double eps_scale_dual = std::sqrt(static_cast<double>(Gt.size()));

  int it = 0;
  for (it = 1; it <= opts.max_iter; ++it) {
    Gt = llt.solve(XtY2 + rho * hankel_pullback(Z - U, T, p, r));
    const MatrixXd HG = hankel_of_stacked(Gt, T, p, r);
    const MatrixXd Zprev = Z;
    Z = svd_soft_threshold(HG + U, prob.lambda / rho);
    U += HG - Z;

    const double rpri = (HG - Z).norm();
    const double sdual = rho * hankel_pullback(Z - Zprev, T, p, r).norm();
    const double eps_pri = eps_scale_pri * opts.tol_abs +
                           opts.tol_rel * std::max(HG.norm(), Z.norm());
    const double eps_dual = eps_scale_dual * opts.tol_abs +
                            opts.tol_rel * rho * hankel_pullback(U, T, p, r).norm();
    if (trace)
      trace->push_back({it,
                        objective_of_stacked(Y, X, Gt, prob.lambda, T, p, r, Nbar), rpri,
                        sdual});
    report.primal_residual = rpri;
    report.dual_residual = sdual;
    if (rpri <= eps_pri && sdual <= eps_dual) {
      report.converged = true;
      break;
    }
    if (rpri > 10.0 * sdual && rho < 1e6) {
      rho *= 2.0;
      U *= 0.5;
      refactor();
    } else if (sdual > 10.0 * rpri && rho > 1e-6) {
      rho *= 0.5;
      U *= 2.0;
      refactor();
    }
  }
  report.iterations = std::min(it, opts.max_iter);
  report.rho_final = rho;
  report.g_hat = MarkovSeq::from_stacked(Gt, p, r);
  report.objective = objective_of_stacked(Y, X, Gt, prob.lambda, T, p, r, Nbar);
  // Fermat-rule certificate: (rho/lambda) U is an exact subgradient of
  // |.|_{S1} at Z by prox optimality, so at primal feasibility the residual
  // below vanishes.
  report.stationarity_residual =
      (XtX2 * Gt - XtY2 + rho * hankel_pullback(U, T, p, r)).norm();
  return report;
}

MarkovSeq oracle_solve(const PenalizedProblem& prob, int iters, std::uint64_t seed) {
  const MatrixXd& X = prob.data.X;
  const MatrixXd& Y = prob.data.Y;
  const int T = prob.T, p = prob.p, r = prob.r;
  const int Nbar = prob.data.N_bar;
  const Eigen::Index n = X.cols();
  if (n * p > 200)
    throw std::invalid_argument("oracle_solve: problem too large for the oracle");

  const MatrixXd M = (2.0 / Nbar) * (X.transpose() * X);
  const MatrixXd q = (2.0 / Nbar) * (X.transpose() * Y);
  const double lambda = prob.lambda;

  auto fval = [&](const MatrixXd& gt) {
    return objective_of_stacked(Y, X, gt, lambda, T, p, r, Nbar);
  };

  MatrixXd Gt = X.colPivHouseholderQr().solve(Y);  // least-squares start
  double fbest = fval(Gt);
  MatrixXd Gbest = Gt;
  double delta = 0.5 * std::max(fbest, 1e-12);
  double target = fbest - delta;
  bool hit = false;
  constexpr int kWindow = 50;

  CounterRng jitter(seed, 0x6F72636CULL);
  MatrixXd dir_prev = MatrixXd::Zero(n, p);
  MatrixXd U, V;
  VectorXd S;
  for (int t = 1; t <= iters; ++t) {
    const MatrixXd HG = hankel_of_stacked(Gt, T, p, r);
    thin_svd(HG, U, S, V);
    // subgradient selection: drop numerically-zero singular directions
    const double cut = 1e-12 * std::max(S.size() ? S(0) : 0.0, 1e-300);
    MatrixXd UVt = MatrixXd::Zero(HG.rows(), HG.cols());
    for (Eigen::Index i = 0; i < S.size(); ++i)
      if (S(i) > cut) UVt.noalias() += U.col(i) * V.col(i).transpose();
    MatrixXd sg = M * Gt - q + lambda * hankel_pullback(UVt, T, p, r);
    // deflection keeps consecutive directions from fighting each other
    const double dd = (dir_prev.array() * sg.array()).sum();
    const double np2 = dir_prev.squaredNorm();
    const double beta = (t > 1 && np2 > 0.0) ? std::max(0.0, -1.5 * dd / np2) : 0.0;
    const MatrixXd dir = sg + beta * dir_prev;
    const double nd2 = dir.squaredNorm();
    if (nd2 < 1e-32) break;

    const double ft = fval(Gt);
    if (ft < fbest) {
      fbest = ft;
      Gbest = Gt;
    }
    if (ft <= target) hit = true;
    Gt -= ((ft - (fbest - delta)) / nd2) * dir;
    dir_prev = dir;

    if (t % kWindow == 0) {
      if (hit) {
        delta = std::min(2.0 * delta, 0.5 * std::max(fbest, 1e-12));
      } else {
        delta *= 0.5;
        // restart from the incumbent with a small deterministic kick
        MatrixXd kick(n, p);
        for (Eigen::Index i = 0; i < kick.size(); ++i)
          kick.data()[i] = jitter.next_gaussian();
        const double knorm = kick.norm();
        Gt = Gbest + (knorm > 0 ? std::sqrt(delta) * 1e-3 / knorm : 0.0) * kick;
        dir_prev.setZero();
      }
      delta = std::max(delta, 1e-18 * std::max(1.0, fbest));
      target = fbest - delta;
      hit = false;
    }
  }
  return MarkovSeq::from_stacked(Gbest, p, r);
}

}  // namespace hsid
