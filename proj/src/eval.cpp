#include "hsid/eval.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <thread>

#include "hsid/lti_core.hpp"
#include "hsid/rng.hpp"

namespace hsid {

void parallel_for(long n, int jobs, const std::function<void(long)>& fn) {
  int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<long>(workers, n));
  if (workers == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

double schatten_norm(const MatrixXd& M, SchattenP p) {
  if (M.size() == 0) return 0.0;
  switch (p) {
    case SchattenP::Two:
      return M.norm();
    case SchattenP::Inf:
      return Eigen::JacobiSVD<MatrixXd>(M).singularValues()(0);
    case SchattenP::One: {
      if (std::min(M.rows(), M.cols()) <= 32)
        return Eigen::JacobiSVD<MatrixXd>(M).singularValues().sum();
      return Eigen::BDCSVD<MatrixXd>(M).singularValues().sum();
    }
  }
  return 0.0;
}

double hankel_loss(const MarkovSeq& g_hat, const MarkovSeq& g0, int T, SchattenP p) {
  if (g_hat.p != g0.p || g_hat.r != g0.r || g_hat.size() != g0.size())
    throw std::invalid_argument("hankel_loss: block shapes or counts differ");
  const MatrixXd diff = hankel_map(g_hat, T).data - hankel_map(g0, T).data;
  return schatten_norm(diff, p);
}

namespace {

MatrixXd ctrb_of(const MatrixXd& A, const MatrixXd& B, int K) {
  MatrixXd out(A.rows(), B.cols() * K);
  MatrixXd col = B;
  for (int k = 0; k < K; ++k) {
    out.middleCols(k * B.cols(), B.cols()) = col;
    if (k + 1 < K) col = A * col;
  }
  return out;
}

MatrixXd obsv_of(const MatrixXd& A, const MatrixXd& C, int K) {
  MatrixXd out(C.rows() * K, A.cols());
  MatrixXd row = C;
  for (int k = 0; k < K; ++k) {
    out.middleRows(k * C.rows(), C.rows()) = row;
    if (k + 1 < K) row = row * A;
  }
  return out;
}

}  // namespace

RealizationLoss realization_loss(const Realization& est, const Realization& ref) {
  RealizationLoss out;
  if (est.d_hat != ref.d_hat) {
    out.dimension_mismatch = true;
    out.total = std::numeric_limits<double>::infinity();
    return out;
  }
  const int d = est.d_hat;
  if (d == 0) {
    out.alignment = MatrixXd::Zero(0, 0);
    return out;
  }
  const int K = d + 1;
  // est = W^T (ref) W for orthogonal W implies O_est = O_ref W and
  // Ctrl_est^T = Ctrl_ref^T W; Procrustes on the stack recovers W.
  MatrixXd Mh(static_cast<Eigen::Index>(K) * est.C.rows() + K * est.B.cols(), d);
  MatrixXd Mr(Mh.rows(), d);
  Mh << obsv_of(est.A, est.C, K), ctrb_of(est.A, est.B, K).transpose();
  Mr << obsv_of(ref.A, ref.C, K), ctrb_of(ref.A, ref.B, K).transpose();
  Eigen::JacobiSVD<MatrixXd> svd(Mr.transpose() * Mh,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
  const MatrixXd W = svd.matrixU() * svd.matrixV().transpose();
  out.alignment = W;
  out.errA = (est.A - W.transpose() * ref.A * W).norm();
  out.errB = (est.B - W.transpose() * ref.B).norm();
  out.errC = (est.C - ref.C * W).norm();
  out.total = out.errA + out.errB + out.errC;
  return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need matching series of length >= 2");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_loglog_slope: degenerate grid");
  return (n * sxy - sx * sy) / denom;
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

RateFit rate_experiment(const StateSpace& sys, const NoiseSpec& noise,
                        const EstimationConfig& cfg, const std::vector<int>& N_grid,
                        int seeds_per_n, std::uint64_t seed0,
                        const std::function<double(const PipelineResult&)>& metric,
                        int jobs) {
  if (N_grid.size() < 2) throw std::invalid_argument("rate_experiment: grid too small");
  RateFit fit;
  fit.n_grid.assign(N_grid.begin(), N_grid.end());
  const long total = static_cast<long>(N_grid.size()) * seeds_per_n;
  std::vector<double> values(total, std::numeric_limits<double>::quiet_NaN());
  std::atomic<int> failures{0};
  parallel_for(total, jobs, [&](long idx) {
    const int gi = static_cast<int>(idx / seeds_per_n);
    const int si = static_cast<int>(idx % seeds_per_n);
    try {
      const Trajectory traj =
          simulate(sys, noise, N_grid[gi], seed0 + 1000003ULL * gi + si);
      values[idx] = metric(run_algorithm1(traj, cfg));
    } catch (const std::exception&) {
      failures.fetch_add(1);
    }
  });
  fit.failures = failures.load();
  fit.samples.resize(N_grid.size());
  for (size_t gi = 0; gi < N_grid.size(); ++gi) {
    for (int si = 0; si < seeds_per_n; ++si) {
      const double v = values[gi * seeds_per_n + si];
      if (std::isfinite(v)) fit.samples[gi].push_back(v);
    }
    fit.medians.push_back(median_of(fit.samples[gi]));
  }
  fit.slope = fit_loglog_slope(fit.n_grid, fit.medians);

  // bootstrap band over seed resamples
  constexpr int kBoot = 200;
  std::vector<double> slopes(kBoot);
  CounterRng rng(seed0, 0xB007ULL);
  for (int b = 0; b < kBoot; ++b) {
    std::vector<double> meds(N_grid.size());
    for (size_t gi = 0; gi < N_grid.size(); ++gi) {
      const auto& pool = fit.samples[gi];
      std::vector<double> resample(pool.size());
      for (size_t k = 0; k < pool.size(); ++k)
        resample[k] = pool[rng.next_u64() % pool.size()];
      meds[gi] = median_of(resample);
    }
    slopes[b] = fit_loglog_slope(fit.n_grid, meds);
  }
  std::sort(slopes.begin(), slopes.end());
  fit.slope_lo = slopes[static_cast<int>(0.025 * kBoot)];
  fit.slope_hi = slopes[static_cast<int>(0.975 * kBoot) - 1];
  return fit;
}

namespace {

void finish_envelope(EnvelopeFit& fit) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (size_t i = 0; i < fit.measured.size(); ++i) {
    fit.ratio.push_back(fit.measured[i] / fit.envelope[i]);
    lo = std::min(lo, fit.ratio.back());
    hi = std::max(hi, fit.ratio.back());
  }
  fit.max_min_ratio = hi / lo;
  fit.trend_slope = fit_loglog_slope(fit.n_grid, fit.ratio);
}

}  // namespace

EnvelopeFit covariance_concentration(int trials, const std::vector<int>& nbar_grid, int T,
                                     int r, double sigma_u, std::uint64_t seed0, int jobs) {
  EnvelopeFit fit;
  const double N1 = std::log(static_cast<double>(T)) + r;
  const int n = (2 * T - 1) * r;
  std::vector<std::vector<double>> devs(nbar_grid.size(),
                                        std::vector<double>(trials, 0.0));
  const long total = static_cast<long>(nbar_grid.size()) * trials;
  parallel_for(total, jobs, [&](long idx) {
    const int gi = static_cast<int>(idx / trials);
    const int ti = static_cast<int>(idx % trials);
    const int Nbar = nbar_grid[gi];
    const int N = Nbar + 2 * T - 1;
    CounterRng rng(seed0 + gi, ti);
    MatrixXd u(N, r);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < r; ++j) u(i, j) = sigma_u * rng.next_gaussian();
    MatrixXd M = MatrixXd::Zero(n, n);
    VectorXd row(n);
    for (int l = 2 * T; l <= N; ++l) {
      for (int j = 0; j < 2 * T - 1; ++j) row.segment(j * r, r) = u.row(l - 1 - j);
      M.selfadjointView<Eigen::Lower>().rankUpdate(row);
    }
    M = MatrixXd(M.selfadjointView<Eigen::Lower>());
    M /= Nbar;
    M.diagonal().array() -= sigma_u * sigma_u;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
    devs[gi][ti] = es.eigenvalues().cwiseAbs().maxCoeff();
  });
  for (size_t gi = 0; gi < nbar_grid.size(); ++gi) {
    fit.n_grid.push_back(nbar_grid[gi]);
    fit.measured.push_back(*std::max_element(devs[gi].begin(), devs[gi].end()));
    fit.envelope.push_back(std::sqrt(T * N1 / nbar_grid[gi]));
  }
  finish_envelope(fit);
  return fit;
}

EnvelopeFit noise_term_concentration(const StateSpace& sys, const NoiseSpec& noise,
                                     const std::vector<int>& nbar_grid, int T, int trials,
                                     std::uint64_t seed0, NoiseTerm term, int jobs) {
  EnvelopeFit fit;
  const int p = sys.p(), r = sys.r();
  const double N0 = std::log(static_cast<double>(T)) + p + r;
  const double N2 = std::log(static_cast<double>(T)) + p;

  double prefactor = 0.0, Neff = N2;
  switch (term) {
    case NoiseTerm::kXbar: {
      const int K = decay_horizon(sys);
      MatrixXd x = sys.B;
      for (int k = 1; k < 2 * T; ++k) x = sys.A * x;
      std::vector<MatrixXd> gbar;
      for (int k = 0; k < K; ++k) {
        gbar.push_back(sys.C * x);
        x = sys.A * x;
      }
      prefactor =
          noise.sigma_u * noise.sigma_u * hinf_norm(MarkovSeq(gbar, p, r), 1024);
      Neff = N0;
      break;
    }
    case NoiseTerm::kProcess: {
      const int K = decay_horizon(sys);
      std::vector<MatrixXd> h;
      MatrixXd row = sys.C;
      for (int k = 0; k < K; ++k) {
        h.push_back(row);
        row = row * sys.A;
      }
      prefactor =
          noise.sigma_u * noise.sigma_w * hinf_norm(MarkovSeq(h, p, sys.d()), 1024);
      break;
    }
    case NoiseTerm::kOutput:
      prefactor = noise.sigma_v * noise.sigma_v;
      break;
  }
  if (prefactor <= 0.0) prefactor = 1.0;  // degenerate (zero-noise) negative controls

  std::vector<std::vector<double>> vals(nbar_grid.size(), std::vector<double>(trials));
  const long total = static_cast<long>(nbar_grid.size()) * trials;
  parallel_for(total, jobs, [&](long idx) {
    const int gi = static_cast<int>(idx / trials);
    const int ti = static_cast<int>(idx % trials);
    const int Nbar = nbar_grid[gi];
    const int N = Nbar + 2 * T - 1;
    const Trajectory traj =
        simulate(sys, noise, N, seed0 + 7919ULL * gi + ti, NoiseKind::kGaussian, T);
    const RegressionData data = build_regression(traj, T);
    MatrixXd P(data.N_bar, p);
    const MatrixXd& src = term == NoiseTerm::kXbar ? traj.parts->xbar_part
                          : term == NoiseTerm::kProcess ? traj.parts->w_part
                                                        : traj.parts->eps_part;
    P = src.bottomRows(data.N_bar);
    const MatrixXd h = data.X.transpose() * P / data.N_bar;
    vals[gi][ti] = schatten_norm(hankel_adjoint_pinv(h, T, p, r), SchattenP::Inf);
  });
  for (size_t gi = 0; gi < nbar_grid.size(); ++gi) {
    fit.n_grid.push_back(nbar_grid[gi]);
    fit.measured.push_back(*std::max_element(vals[gi].begin(), vals[gi].end()));
    fit.envelope.push_back(prefactor * std::sqrt(Neff / nbar_grid[gi]));
  }
  finish_envelope(fit);
  return fit;
}

namespace {

// largest singular value of a complex p x r matrix with p, r <= 2 via the
// closed-form eigenvalue of M^* M; falls back to Jacobi otherwise
double sigma_max_small(const Eigen::MatrixXcd& M) {
  if (M.rows() == 2 && M.cols() == 2) {
    const Eigen::Matrix2cd G = M.adjoint() * M;
    const double a = G(0, 0).real(), c = G(1, 1).real();
    const double b2 = std::norm(G(0, 1));
    const double tr2 = 0.5 * (a + c);
    const double disc = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + b2));
    return std::sqrt(std::max(0.0, tr2 + disc));
  }
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(M).singularValues()(0);
}

}  // namespace

AppendixBReport appendixB_checks(long samples, std::uint64_t seed, int jobs) {
  AppendixBReport rep;
  rep.samples = samples;
  rep.b1_worst_margin = std::numeric_limits<double>::infinity();
  rep.b2_worst_margin = std::numeric_limits<double>::infinity();

  // B.1: |v1 w1^* - v2 w2^*|_{Sinf} <= |v1 - v2|_2 + |w1 - w2|_2 on unit pairs
  {
    const int r = 5, pdim = 3;
    std::atomic<long> viol{0};
    std::vector<double> margins(samples);
    parallel_for(samples, jobs, [&](long i) {
      CounterRng rng(seed, 2 * i);
      auto unit = [&rng](int n) {
        VectorXd v(n);
        double nrm = 0.0;
        do {
          for (int k = 0; k < n; ++k) v(k) = rng.next_gaussian();
          nrm = v.norm();
        } while (nrm == 0.0);
        return VectorXd(v / nrm);
      };
      const VectorXd v1 = unit(r), v2 = unit(r), w1 = unit(pdim), w2 = unit(pdim);
      const MatrixXd D = v1 * w1.transpose() - v2 * w2.transpose();
      const double lhs = Eigen::JacobiSVD<MatrixXd>(D).singularValues()(0);
      const double rhs = (v1 - v2).norm() + (w1 - w2).norm();
      margins[i] = rhs - lhs;
      if (lhs > rhs + 1e-12) viol.fetch_add(1);
    });
    rep.b1_violations = viol.load();
    rep.b1_worst_margin = *std::min_element(margins.begin(), margins.end());
  }

  // B.2: a finite section of the banded block-Toeplitz operator has norm at
  // most the frequency-grid maximum of the symbol plus a Lipschitz slack
  {
    const int T = 3, pdim = 2, r = 2, L = 2 * T - 1;
    const int K = 3 * T;  // section block size
    const int grid = 1024;
    std::atomic<long> viol{0};
    std::vector<double> margins(samples);
    parallel_for(samples, jobs, [&](long i) {
      CounterRng rng(seed, 2 * i + 1);
      std::vector<MatrixXd> h(L);
      for (int l = 0; l < L; ++l) {
        h[l].resize(pdim, r);
        for (int a = 0; a < pdim; ++a)
          for (int b = 0; b < r; ++b) h[l](a, b) = rng.next_gaussian();
      }
      MatrixXd section = MatrixXd::Zero(K * pdim, K * r);
      for (int j = 0; j < K; ++j)
        for (int k = 0; k < K; ++k) {
          const int l = j - k;  // diagonal offset, block h_{l+1}
          if (l >= 0 && l < L) section.block(j * pdim, k * r, pdim, r) = h[l];
        }
      const double lhs = Eigen::JacobiSVD<MatrixXd>(section).singularValues()(0);

      double grid_max = 0.0;
      double lip = 0.0;
      for (int l = 0; l < L; ++l)
        lip += 2.0 * M_PI * (l + 1) * Eigen::JacobiSVD<MatrixXd>(h[l]).singularValues()(0);
      std::vector<std::complex<double>> cur(L), step(L);
      for (int l = 0; l < L; ++l) {
        cur[l] = 1.0;
        step[l] = std::polar(1.0, 2.0 * M_PI * (l + 1) / grid);
      }
      Eigen::MatrixXcd Msym(pdim, r);
      for (int q = 0; q < grid; ++q) {
        Msym.setZero();
        for (int l = 0; l < L; ++l) {
          Msym += cur[l] * h[l];
          cur[l] *= step[l];
        }
        grid_max = std::max(grid_max, sigma_max_small(Msym));
      }
      const double rhs = grid_max + 0.5 * lip / grid;
      margins[i] = rhs - lhs;
      if (lhs > rhs + 1e-9) viol.fetch_add(1);
    });
    rep.b2_violations = viol.load();
    rep.b2_worst_margin = *std::min_element(margins.begin(), margins.end());
  }
  return rep;
}

}  // namespace hsid
