#include "hsid/pipeline.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cmath>

#include "hsid/lti_core.hpp"

namespace hsid {

namespace {

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

double s_min_of(const MatrixXd& M, int d) {
  const VectorXd s = Eigen::JacobiSVD<MatrixXd>(M).singularValues();
  return d >= 1 && d <= s.size() ? s(d - 1) : 0.0;
}

}  // namespace

void EstimationConfig::validate() const {
  if (T0 < 2) throw std::invalid_argument("EstimationConfig: T0 must be >= 2");
  if (!(xi > 0.0)) throw std::invalid_argument("EstimationConfig: xi must be > 0");
  const double dmax = std::exp(-1.0) / 4.0;
  if (!(delta > 0.0 && delta < dmax))
    throw std::invalid_argument("EstimationConfig: delta must lie in (0, e^-1/4)");
  if (phi < 1.0) throw std::invalid_argument("EstimationConfig: phi must be >= 1");
  if (!(sigma_u > 0.0)) throw std::invalid_argument("EstimationConfig: sigma_u must be > 0");
  if (!(c > 0.0)) throw std::invalid_argument("EstimationConfig: c must be > 0");
  if (eta_check < 0) throw std::invalid_argument("EstimationConfig: eta_check must be >= 0");
  if (lambda0 && !(*lambda0 > 0.0))
    throw std::invalid_argument("EstimationConfig: lambda0 must be > 0");
  if (lambda1 && !(*lambda1 > 0.0))
    throw std::invalid_argument("EstimationConfig: lambda1 must be > 0");
}

double lambda_rule(double phi, double sigma_u, int N_bar, int T, double delta, int r,
                   int p, double c) {
  if (N_bar < 1) throw std::invalid_argument("lambda_rule: N_bar must be >= 1");
  if (!(delta > 0.0 && delta < std::exp(-1.0)))
    throw std::invalid_argument("lambda_rule: delta must lie in (0, e^-1)");
  const double N0 = std::log(static_cast<double>(T)) + p + r;
  const double logT = std::log(static_cast<double>(T));
  const double logd = std::log(1.0 / delta);
  const double nb = N_bar;
  const double branch = std::max({std::sqrt(N0 / nb), logT * N0 / nb,
                                  std::sqrt(logd / nb), logT * logd / nb});
  return c * phi * sigma_u * sigma_u * branch;
}

int decay_horizon(const StateSpace& sys) {
  const double rho = spectral_radius(sys.A);
  const int d = sys.d();
  if (rho <= 0.0) return d + 1;  // nilpotent
  if (rho >= 1.0)
    throw std::invalid_argument("decay_horizon: system must be stable (rho < 1)");
  // psi ~ max_k |A^k| / rho^k over k <= 200 stands in for the Jordan constant
  double psi = 1.0;
  MatrixXd Ak = MatrixXd::Identity(d, d);
  double rhok = 1.0;
  for (int k = 1; k <= 200; ++k) {
    Ak = Ak * sys.A;
    rhok *= rho;
    psi = std::max(psi, Ak.operatorNorm() / rhok);
  }
  const double scale = psi * sys.C.operatorNorm() * sys.B.operatorNorm();
  if (scale <= 0.0) return d + 1;
  const double K = std::log(1e-10 / scale) / std::log(rho);
  return std::min(100000, std::max(d + 1, static_cast<int>(std::ceil(K))));
}

double phi_oracle(const StateSpace& sys, const NoiseSpec& noise, int T, int horizon) {
  noise.validate();
  const int K = horizon > 0 ? horizon : decay_horizon(sys);
  // gbar: blocks C A^{k-1} B for k >= 2T
  MatrixXd x = sys.B;
  for (int k = 1; k < 2 * T; ++k) x = sys.A * x;  // A^{2T-1} B
  std::vector<MatrixXd> gbar;
  gbar.reserve(K);
  for (int k = 0; k < K; ++k) {
    gbar.push_back(sys.C * x);
    x = sys.A * x;
  }
  const double g_term = hinf_norm(MarkovSeq(std::move(gbar), sys.p(), sys.r()), 1024);

  double h_term = 0.0;
  if (noise.sigma_w > 0.0) {
    std::vector<MatrixXd> h;
    h.reserve(K);
    MatrixXd row = sys.C;
    for (int k = 0; k < K; ++k) {
      h.push_back(row);
      row = row * sys.A;
    }
    h_term = noise.sigma_w / noise.sigma_u *
             hinf_norm(MarkovSeq(std::move(h), sys.p(), sys.d()), 1024);
  }
  return g_term + h_term + 1.0;
}

double xi_oracle(const StateSpace& sys) {
  const int d = sys.d();
  if (d < 1) throw std::invalid_argument("xi_oracle: system must have d >= 1");
  const int T1 = d + 1;
  const HankelMatrix H = hankel_map(markov_params(sys, 2 * T1 - 1), T1);
  Eigen::JacobiSVD<MatrixXd> svd(H.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd sqrtS = svd.singularValues().head(d).cwiseSqrt();
  const MatrixXd O = svd.matrixU().leftCols(d) * sqrtS.asDiagonal();
  const MatrixXd Oplus = O.topRows(static_cast<Eigen::Index>(sys.p()) * (T1 - 1));
  const double sd = s_min_of(Oplus, d);
  return sd * sd / 5.0;
}

PipelineResult run_algorithm1(const Trajectory& traj, const EstimationConfig& cfg,
                              const StateSpace* truth) {
  cfg.validate();
  const double t_start = now_ms();
  const int p = traj.p(), r = traj.r();

  PipelineResult res;

  // stage 1: Hankel penalized regression at the over-order T0
  RegressionData data1 = build_regression(traj, cfg.T0);
  res.lambda0_used = cfg.lambda0 ? *cfg.lambda0
                                 : lambda_rule(cfg.phi, cfg.sigma_u, data1.N_bar, cfg.T0,
                                               cfg.delta, r, p, cfg.c);
  double t0 = now_ms();
  res.report1 = solve_admm(PenalizedProblem(std::move(data1), res.lambda0_used, p, r),
                           cfg.solver);
  res.timings.solve1_ms = now_ms() - t0;
  res.H_hat_stage1 = hankel_map(res.report1.g_hat, cfg.T0);

  // stage 2: order detection
  res.order = estimate_order(res.H_hat_stage1, cfg.xi);
  res.d_check = res.order.d_check;

  if (truth) {
    const HankelMatrix H0 = hankel_map(markov_params(*truth, 2 * cfg.T0 - 1), cfg.T0);
    const double err1 = (res.H_hat_stage1.data - H0.data).norm();
    Eigen::JacobiSVD<MatrixXd> svd(H0.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int d0 = truth->d();
    const VectorXd sqrtS = svd.singularValues().head(d0).cwiseSqrt();
    const MatrixXd O = svd.matrixU().leftCols(d0) * sqrtS.asDiagonal();
    const double sdO = s_min_of(O.topRows(static_cast<Eigen::Index>(p) * (cfg.T0 - 1)), d0);
    res.margins.push_back(stability_margin(err1, sdO, svd.singularValues()(d0 - 1)));
  }

  if (res.d_check == 0) {
    res.realization = ho_kalman(MatrixXd::Zero(2 * p, 2 * r), 0, 2);
    res.T1 = 0;
    res.note = "estimated order is zero; returning the trivial realization";
    res.timings.total_ms = now_ms() - t_start;
    return res;
  }

  // stage 3: reduced-order re-fit on the same trajectory
  const int d_bar = std::max(res.d_check, cfg.eta_check);
  res.T1 = d_bar + 1;
  if (traj.length() < 2 * res.T1)
    throw std::invalid_argument("run_algorithm1: trajectory too short for T1 window");
  RegressionData data3 = build_regression(traj, res.T1);
  res.lambda1_used = cfg.lambda1 ? *cfg.lambda1
                                 : lambda_rule(cfg.phi, cfg.sigma_u, data3.N_bar, res.T1,
                                               cfg.delta, r, p, cfg.c);

  // warm start from the truncated stage-1 solution
  std::vector<MatrixXd> warm_blocks;
  warm_blocks.reserve(2 * res.T1 - 1);
  for (int k = 0; k < 2 * res.T1 - 1; ++k)
    warm_blocks.push_back(k < res.report1.g_hat.size() ? res.report1.g_hat.blocks[k]
                                                       : MatrixXd::Zero(p, r));
  const MarkovSeq warm(std::move(warm_blocks), p, r);

  t0 = now_ms();
  res.report3 = solve_admm(PenalizedProblem(std::move(data3), res.lambda1_used, p, r),
                           cfg.solver, &warm);
  res.timings.solve3_ms = now_ms() - t0;
  res.H_hat_stage3 = hankel_map(res.report3.g_hat, res.T1);
  res.H_hat_stage3_trunc = truncate_svd(res.H_hat_stage3, res.d_check);
  res.realization = ho_kalman(res.H_hat_stage3_trunc, res.d_check, res.T1);

  if (truth) {
    const HankelMatrix H0 = hankel_map(markov_params(*truth, 2 * res.T1 - 1), res.T1);
    const double err3 = (res.H_hat_stage3.data - H0.data).norm();
    Eigen::JacobiSVD<MatrixXd> svd(H0.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int d0 = truth->d();
    if (svd.singularValues().size() >= d0) {
      const VectorXd sqrtS = svd.singularValues().head(d0).cwiseSqrt();
      const MatrixXd O = svd.matrixU().leftCols(d0) * sqrtS.asDiagonal();
      const double sdO =
          s_min_of(O.topRows(static_cast<Eigen::Index>(p) * (res.T1 - 1)), d0);
      res.margins.push_back(stability_margin(err3, sdO, svd.singularValues()(d0 - 1)));
    }
  }

  res.timings.total_ms = now_ms() - t_start;
  return res;
}

}  // namespace hsid
