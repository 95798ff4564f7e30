#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hsid/order_realize.hpp"
#include "hsid/pipeline.hpp"
#include "hsid/types.hpp"

namespace hsid {

enum class SchattenP { One, Two, Inf };

double schatten_norm(const MatrixXd& M, SchattenP p);

/// |H ghat^* - H g0^*|_{Sp} at Hankel order T.
double hankel_loss(const MarkovSeq& g_hat, const MarkovSeq& g0, int T, SchattenP p);

/// Aligned realization error: the orthogonal R from a Procrustes fit of the
/// stacked observability/controllability factors, then the three S2 terms
/// |A_hat - R^T A_ref R|, |B_hat - R^T B_ref|, |C_hat - C_ref R| at that R.
/// Upper-bounds the similarity-class loss (which ranges over all invertible
/// transforms).
struct RealizationLoss {
  double total = 0.0;
  double errA = 0.0;
  double errB = 0.0;
  double errC = 0.0;
  MatrixXd alignment;
  bool dimension_mismatch = false;
};

RealizationLoss realization_loss(const Realization& est, const Realization& ref);

struct LossReport {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  RealizationLoss realization;
};

/// Ordinary least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct RateFit {
  std::vector<double> n_grid;
  std::vector<double> medians;
  std::vector<std::vector<double>> samples;  // per grid point, per seed
  double slope = 0.0;
  double slope_lo = 0.0;  // bootstrap 2.5%
  double slope_hi = 0.0;  // bootstrap 97.5%
  int failures = 0;
};

/// Runs the full pipeline over an N grid x seed set and fits the log-log
/// slope of the per-N median metric. Failed runs are excluded and counted.
RateFit rate_experiment(const StateSpace& sys, const NoiseSpec& noise,
                        const EstimationConfig& cfg, const std::vector<int>& N_grid,
                        int seeds_per_n, std::uint64_t seed0,
                        const std::function<double(const PipelineResult&)>& metric,
                        int jobs = 0);

struct EnvelopeFit {
  std::vector<double> n_grid;    // N_bar values
  std::vector<double> measured;  // max over trials
  std::vector<double> envelope;
  std::vector<double> ratio;
  double max_min_ratio = 0.0;
  double trend_slope = 0.0;
};

/// Max-over-trials deviation |(1/N_bar) X^T X - sigma_u^2 I|_{Sinf} of the
/// time-shifted input covariates against the sqrt(T N1 / N_bar) envelope,
/// N1 = log(T) + r.
EnvelopeFit covariance_concentration(int trials, const std::vector<int>& nbar_grid, int T,
                                     int r, double sigma_u, std::uint64_t seed0,
                                     int jobs = 0);

enum class NoiseTerm { kXbar, kProcess, kOutput };

/// Max-over-trials |H^{dagger*} X^T P|_{Sinf} / N_bar for the selected noise
/// part P, against its concentration envelope (N0 rate for the input tail,
/// N2 = log(T) + p for the process and output terms).
EnvelopeFit noise_term_concentration(const StateSpace& sys, const NoiseSpec& noise,
                                     const std::vector<int>& nbar_grid, int T, int trials,
                                     std::uint64_t seed0, NoiseTerm term, int jobs = 0);

struct AppendixBReport {
  long b1_violations = 0;
  long b2_violations = 0;
  long samples = 0;
  double b1_worst_margin = 0.0;  // min of RHS - LHS over samples
  double b2_worst_margin = 0.0;
};

/// Property checks: the rank-two outer-product difference bound
/// |v1 w1^* - v2 w2^*|_{Sinf} <= |v1 - v2|_2 + |w1 - w2|_2 and the Toeplitz
/// section norm against the frequency-grid bound with a Lipschitz slack.
AppendixBReport appendixB_checks(long samples, std::uint64_t seed, int jobs = 0);

/// Simple index-sharded worker pool; fn(i) runs for i in [0, n) with results
/// independent of the thread schedule. jobs <= 0 selects the hardware count.
void parallel_for(long n, int jobs, const std::function<void(long)>& fn);

}  // namespace hsid
