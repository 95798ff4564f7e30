#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>

#include "hsid/lti_core.hpp"
#include "hsid/order_realize.hpp"
#include "hsid/rng.hpp"

using namespace hsid;

namespace {

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

StateSpace random_minimal(CounterRng& rng, int d, int r, int p, double rho_lo = 0.3,
                          double rho_hi = 0.9) {
  while (true) {
    MatrixXd A(d, d), B(d, r), C(p, d);
    for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = rng.next_gaussian();
    for (Eigen::Index i = 0; i < B.size(); ++i) B.data()[i] = rng.next_gaussian();
    for (Eigen::Index i = 0; i < C.size(); ++i) C.data()[i] = rng.next_gaussian();
    const double rho = spectral_radius(A);
    if (rho == 0.0) continue;
    A *= (rho_lo + (rho_hi - rho_lo) * rng.next_uniform()) / rho;
    const StateSpace sys(A, B, C);
    const MatrixXd H = hankel_map(markov_params(sys, 2 * (d + 1) - 1), d + 1).data;
    const VectorXd s = Eigen::JacobiSVD<MatrixXd>(H).singularValues();
    if (s(d - 1) > 1e-4) return sys;
  }
}

HankelMatrix exact_hankel(const StateSpace& sys, int T) {
  return hankel_map(markov_params(sys, 2 * T - 1), T);
}

}  // namespace

TEST_CASE("estimate_order threshold semantics") {
  // diag(5, 3, 0.1) as a valid 3x3 scalar Hankel built from blocks is awkward;
  // feed the values through a constant-anti-diagonal matrix instead
  MatrixXd D = MatrixXd::Zero(3, 3);
  D(0, 0) = 5;
  D(1, 1) = 3;
  D(2, 2) = 0.1;
  // a diagonal matrix is not block-Hankel; use the raw constructor bypass via
  // a rank-revealing equivalent: singular values are invariant to orthogonal
  // factors, so wrap D in a valid Hankel of the same spectrum is unnecessary -
  // estimate_order only reads the data member
  HankelMatrix H;
  H.data = D;
  H.T = 3;
  H.p = 1;
  H.r = 1;
  const OrderEstimate est = estimate_order(H, 1.0);
  CHECK(est.d_check == 2);

  H.data = MatrixXd::Zero(3, 3);
  CHECK(estimate_order(H, 0.5).d_check == 0);

  // inclusive threshold: s_i exactly equal to 2 xi is counted
  H.data = MatrixXd::Zero(3, 3);
  H.data(0, 0) = 2.0;
  CHECK(estimate_order(H, 1.0).d_check == 1);

  CHECK_THROWS_AS(estimate_order(H, 0.0), std::invalid_argument);
}

TEST_CASE("truncate_svd") {
  const StateSpace sys(scalar(0.5), scalar(1.0), scalar(1.0));
  const HankelMatrix H = exact_hankel(sys, 3);
  CHECK((truncate_svd(H, 1) - H.data).norm() <= 1e-10);
  CHECK(truncate_svd(H, 0).isZero(0));

  CounterRng rng(13, 0);
  MatrixXd M(6, 6);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = rng.next_gaussian();
  const MatrixXd M2 = truncate_svd(M, 2);
  const VectorXd s = Eigen::JacobiSVD<MatrixXd>(M).singularValues();
  // Eckart-Young oracle via the full SVD tail
  const double tail = s.tail(4).squaredNorm();
  CHECK((M - M2).squaredNorm() == doctest::Approx(tail).epsilon(1e-10));
  CHECK_THROWS_AS(truncate_svd(M, 7), std::invalid_argument);
}

TEST_CASE("ho_kalman recovers the scalar system exactly") {
  const StateSpace sys(scalar(0.5), scalar(1.0), scalar(1.0));
  const HankelMatrix H = exact_hankel(sys, 4);
  const Realization real = ho_kalman(H.data, 1, 4);
  CHECK(real.A(0, 0) == doctest::Approx(0.5).epsilon(1e-10));
  double ca = 1.0;
  const StateSpace est(real.A, real.B, real.C);
  const MarkovSeq round = markov_params(est, 7);
  for (int k = 0; k <= 6; ++k) {
    CHECK(round.blocks[k](0, 0) == doctest::Approx(ca).epsilon(1e-8));
    ca *= 0.5;
  }
}

TEST_CASE("ho_kalman round trip on random minimal systems") {
  CounterRng rng(2025, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    const int r = 1 + static_cast<int>(rng.next_u64() % 2);
    const int p = 1 + static_cast<int>(rng.next_u64() % 2);
    const StateSpace sys = random_minimal(rng, d, r, p);
    const int T = d + 2;
    const HankelMatrix H = exact_hankel(sys, T);
    const Realization real = ho_kalman(H.data, d, T);
    const MarkovSeq round = markov_params(StateSpace(real.A, real.B, real.C), 2 * T - 1);
    const MarkovSeq truth = markov_params(sys, 2 * T - 1);
    for (int k = 0; k < 2 * T - 1; ++k)
      CHECK((round.blocks[k] - truth.blocks[k]).cwiseAbs().maxCoeff() <= 1e-8);

    // similarity-class eigenvalues match after sorting by modulus
    Eigen::VectorXcd ev_est = real.A.eigenvalues();
    Eigen::VectorXcd ev_true = sys.A.eigenvalues();
    std::sort(ev_est.data(), ev_est.data() + d,
              [](auto a, auto b) { return std::abs(a) < std::abs(b); });
    std::sort(ev_true.data(), ev_true.data() + d,
              [](auto a, auto b) { return std::abs(a) < std::abs(b); });
    for (int i = 0; i < d; ++i) CHECK(std::abs(ev_est(i) - ev_true(i)) <= 1e-6);
  }
}

TEST_CASE("ho_kalman balanced property on exact input") {
  CounterRng rng(77, 0);
  const StateSpace sys = random_minimal(rng, 3, 2, 2);
  const int T = 5;
  const HankelMatrix H = exact_hankel(sys, T);
  Eigen::JacobiSVD<MatrixXd> svd(H.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Realization real = ho_kalman(H.data, 3, T);
  const MatrixXd O = observability(StateSpace(real.A, real.B, real.C), T);
  const MatrixXd Cm = controllability(StateSpace(real.A, real.B, real.C), T);
  const MatrixXd Sigma = svd.singularValues().head(3).asDiagonal();
  CHECK((O.transpose() * O - Sigma).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((Cm * Cm.transpose() - Sigma).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("ho_kalman degenerate inputs") {
  const Realization real = ho_kalman(MatrixXd::Zero(4, 4), 0, 2);
  CHECK(real.d_hat == 0);
  CHECK(real.A.size() == 0);
  CHECK(real.C.rows() == 2);

  CHECK_THROWS_AS(ho_kalman(MatrixXd::Zero(4, 4), 2, 2), std::invalid_argument);  // T < d+1
  CHECK_THROWS_AS(ho_kalman(MatrixXd::Zero(6, 6), 1, 3), std::invalid_argument);  // s_d = 0
}

TEST_CASE("Weyl stability of singular values under perturbation") {
  CounterRng rng(55, 0);
  const StateSpace sys = random_minimal(rng, 2, 1, 1);
  const MatrixXd H = exact_hankel(sys, 4).data;
  const VectorXd s0 = Eigen::JacobiSVD<MatrixXd>(H).singularValues();
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd E(H.rows(), H.cols());
    for (Eigen::Index i = 0; i < E.size(); ++i) E.data()[i] = rng.next_gaussian();
    E *= rng.next_uniform();
    const VectorXd s1 = Eigen::JacobiSVD<MatrixXd>(H + E).singularValues();
    const double enorm = Eigen::JacobiSVD<MatrixXd>(E).singularValues()(0);
    for (int i = 0; i < s0.size(); ++i)
      CHECK(std::abs(s1(i) - s0(i)) <= enorm + 1e-12);
  }
}

TEST_CASE("stability_margin") {
  const StabilityMargin zero = stability_margin(0.0, 2.0, 1.5);
  CHECK(zero.satisfied);
  CHECK(zero.slack == doctest::Approx(zero.rhs));

  // boundary inclusive
  const double rhs = std::sqrt(std::sqrt(2.0) - 1.0) * 2.0 * std::sqrt(1.5) /
                     (2.0 * std::sqrt(2.0));
  const StabilityMargin edge = stability_margin(rhs, 2.0, 1.5);
  CHECK(edge.satisfied);
  CHECK(edge.slack == doctest::Approx(0.0).epsilon(1e-12));

  const StabilityMargin bad = stability_margin(2.0 * rhs, 2.0, 1.5);
  CHECK_FALSE(bad.satisfied);
  CHECK_THROWS_AS(stability_margin(-1.0, 1.0, 1.0), std::invalid_argument);
}
