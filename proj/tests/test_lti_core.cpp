#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>

#include "hsid/lti_core.hpp"
#include "hsid/rng.hpp"

using namespace hsid;

namespace {

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

StateSpace scalar_half() { return StateSpace(scalar(0.5), scalar(1.0), scalar(1.0)); }

StateSpace random_stable(CounterRng& rng, int d, int r, int p, double rho_target) {
  while (true) {
    MatrixXd A(d, d), B(d, r), C(p, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = rng.next_gaussian();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < r; ++j) B(i, j) = rng.next_gaussian();
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < d; ++j) C(i, j) = rng.next_gaussian();
    const double rho = spectral_radius(A);
    if (rho == 0.0) continue;
    A *= rho_target / rho;
    StateSpace sys(A, B, C);
    // keep only minimal draws
    const Eigen::JacobiSVD<MatrixXd> so(observability(sys, d));
    const Eigen::JacobiSVD<MatrixXd> sc(controllability(sys, d));
    if (so.singularValues()(d - 1) > 1e-6 && sc.singularValues()(d - 1) > 1e-6) return sys;
  }
}

MarkovSeq random_seq(CounterRng& rng, int L, int p, int r) {
  std::vector<MatrixXd> blocks(L);
  for (int k = 0; k < L; ++k) {
    blocks[k].resize(p, r);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < r; ++j) blocks[k](i, j) = rng.next_gaussian();
  }
  return MarkovSeq(std::move(blocks), p, r);
}

}  // namespace

TEST_CASE("markov_params on reference systems") {
  const MarkovSeq g = markov_params(scalar_half(), 3);
  CHECK(g.blocks[0](0, 0) == doctest::Approx(1.0));
  CHECK(g.blocks[1](0, 0) == doctest::Approx(0.5));
  CHECK(g.blocks[2](0, 0) == doctest::Approx(0.25));

  const StateSpace nil(MatrixXd::Zero(2, 2), MatrixXd::Identity(2, 2),
                       MatrixXd::Identity(2, 2));
  const MarkovSeq gn = markov_params(nil, 2);
  CHECK(gn.blocks[0].isApprox(MatrixXd::Identity(2, 2)));
  CHECK(gn.blocks[1].isZero(0));

  MatrixXd A(2, 2), B(2, 1), C(1, 2);
  A << 0.9, 0.1, 0.0, 0.8;
  B << 1.0, 1.0;
  C << 1.0, 0.0;
  const MarkovSeq g2 = markov_params(StateSpace(A, B, C), 4);
  // direct-iteration oracle: CB=1, CAB=1.0, CA^2B=0.98, CA^3B=0.946
  CHECK(g2.blocks[0](0, 0) == doctest::Approx(1.0));
  CHECK(g2.blocks[1](0, 0) == doctest::Approx(1.0));
  CHECK(g2.blocks[2](0, 0) == doctest::Approx(0.98));
  CHECK(g2.blocks[3](0, 0) == doctest::Approx(0.946));

  CHECK_THROWS_AS(markov_params(scalar_half(), 0), std::invalid_argument);
}

TEST_CASE("hankel_map layout and spectrum") {
  MarkovSeq g({scalar(1), scalar(2), scalar(3)}, 1, 1);
  const HankelMatrix H = hankel_map(g, 2);
  MatrixXd expect(2, 2);
  expect << 1, 2, 2, 3;
  CHECK(H.data.isApprox(expect));

  const HankelMatrix H1 = hankel_map(MarkovSeq({scalar(5)}, 1, 1), 1);
  CHECK(H1.data(0, 0) == 5.0);

  // SVD oracle on the rank-1 geometric Hankel: s1 = 1 + 1/4 + 1/16 = 1.3125
  const HankelMatrix Hg = hankel_map(markov_params(scalar_half(), 5), 3);
  const VectorXd s = Eigen::JacobiSVD<MatrixXd>(Hg.data).singularValues();
  CHECK(s(0) == doctest::Approx(1.3125).epsilon(1e-10));
  CHECK(s(1) <= 1e-12);

  CHECK_THROWS_AS(hankel_map(g, 3), std::invalid_argument);
}

TEST_CASE("HankelMatrix construction rejects broken anti-diagonals") {
  MatrixXd bad(2, 2);
  bad << 1, 2, 2.5, 3;
  CHECK_THROWS_AS(HankelMatrix(bad, 2, 1, 1), std::invalid_argument);
}

TEST_CASE("hankel_adjoint_pinv weights") {
  // T=2 scalar: weights 1, 1/2, 1
  MatrixXd h3(3, 1);
  h3 << 2.0, 4.0, 6.0;
  const MatrixXd M2 = hankel_adjoint_pinv(h3, 2, 1, 1);
  MatrixXd expect2(2, 2);
  expect2 << 2.0, 2.0, 2.0, 6.0;
  CHECK(M2.isApprox(expect2));

  // T=3 scalar h=[1,2,3,4,5]: anti-diagonal multiplicities 1,2,3,2,1
  MatrixXd h5(5, 1);
  h5 << 1, 2, 3, 4, 5;
  const MatrixXd M3 = hankel_adjoint_pinv(h5, 3, 1, 1);
  MatrixXd expect3(3, 3);
  expect3 << 1, 1, 1, 1, 1, 2, 1, 2, 5;
  CHECK(M3.isApprox(expect3));

  CHECK_THROWS_AS(hankel_adjoint_pinv(h3, 3, 1, 1), std::invalid_argument);
}

TEST_CASE("adjoint identity <h, g*> = <H+*h, Hg*>") {
  CounterRng rng(2024, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int T = 1 + static_cast<int>(rng.next_u64() % 8);
    const int p = 1 + static_cast<int>(rng.next_u64() % 4);
    const int r = 1 + static_cast<int>(rng.next_u64() % 4);
    const MarkovSeq g = random_seq(rng, 2 * T - 1, p, r);
    MatrixXd h((2 * T - 1) * r, p);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = rng.next_gaussian();

    const double lhs = (h.array() * g.stacked().array()).sum();
    const double rhs =
        (hankel_adjoint_pinv(h, T, p, r).array() * hankel_map(g, T).data.array()).sum();
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("observability/controllability factorization") {
  const StateSpace sys = scalar_half();
  const MatrixXd O = observability(sys, 3);
  const MatrixXd Cm = controllability(sys, 3);
  MatrixXd expectO(3, 1), expectC(1, 3);
  expectO << 1, 0.5, 0.25;
  expectC << 1, 0.5, 0.25;
  CHECK(O.isApprox(expectO));
  CHECK(Cm.isApprox(expectC));

  CounterRng rng(7, 0);
  const StateSpace sys3 = random_stable(rng, 3, 2, 2, 0.8);
  const int T = 5;
  const MatrixXd H = hankel_map(markov_params(sys3, 2 * T - 1), T).data;
  CHECK((H - observability(sys3, T) * controllability(sys3, T)).norm() <= 1e-10);

  // minimality: rank(O) = rank(C) = d at tolerance 1e-8
  const VectorXd so = Eigen::JacobiSVD<MatrixXd>(observability(sys3, 3)).singularValues();
  const VectorXd sc = Eigen::JacobiSVD<MatrixXd>(controllability(sys3, 3)).singularValues();
  CHECK(so(2) > 1e-8 * so(0));
  CHECK(sc(2) > 1e-8 * sc(0));
}

TEST_CASE("mcmillan_degree") {
  CHECK(mcmillan_degree(markov_params(scalar_half(), 5), 3) == 1);

  MarkovSeq zero({scalar(0), scalar(0), scalar(0)}, 1, 1);
  CHECK(mcmillan_degree(zero, 2) == 0);

  CounterRng rng(11, 0);
  const StateSpace sys = random_stable(rng, 2, 1, 1, 0.7);
  CHECK(mcmillan_degree(markov_params(sys, 7), 4) == 2);

  // constant in T once T >= d (McMillan monotonicity)
  for (int T = 2; T <= 6; ++T)
    CHECK(mcmillan_degree(markov_params(sys, 2 * T - 1), T) == 2);
}

TEST_CASE("spectral_radius") {
  CHECK(spectral_radius(scalar(0.5)) == doctest::Approx(0.5));
  MatrixXd nilp(2, 2);
  nilp << 0, 1, 0, 0;
  CHECK(spectral_radius(nilp) == doctest::Approx(0.0));
  CHECK_THROWS_AS(spectral_radius(MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("hinf_norm of the geometric sequence") {
  std::vector<MatrixXd> blocks;
  for (int k = 0; k < 32; ++k) blocks.push_back(scalar(std::pow(0.5, k)));
  const MarkovSeq g(blocks, 1, 1);
  // geometric-series oracle: sum 0.5^j = 2 at frequency zero
  CHECK(hinf_norm(g, 512) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_THROWS_AS(hinf_norm(g, 32), std::invalid_argument);

  // monotone non-decreasing in the truncation length for non-negative scalars
  double prev = 0.0;
  for (int L = 1; L <= 16; L += 3) {
    const MarkovSeq gl(std::vector<MatrixXd>(blocks.begin(), blocks.begin() + L), 1, 1);
    const double v = hinf_norm(gl, 64);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("fix_svd_signs gives deterministic factors") {
  CounterRng rng(5, 0);
  MatrixXd M(4, 3);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = rng.next_gaussian();
  Eigen::JacobiSVD<MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  MatrixXd U = svd.matrixU(), V = svd.matrixV();
  fix_svd_signs(U, V);
  CHECK((U * svd.singularValues().asDiagonal() * V.transpose()).isApprox(M, 1e-12));
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    for (Eigen::Index i = 0; i < U.rows(); ++i)
      if (std::abs(U(i, j)) > 1e-12 * U.col(j).cwiseAbs().maxCoeff()) {
        CHECK(U(i, j) > 0.0);
        break;
      }
  }
}
