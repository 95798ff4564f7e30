#include "hsid/lti_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <complex>

namespace hsid {

StateSpace::StateSpace(MatrixXd A_, MatrixXd B_, MatrixXd C_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)) {
  if (A.rows() != A.cols()) throw std::invalid_argument("StateSpace: A must be square");
  if (B.rows() != A.rows())
    throw std::invalid_argument("StateSpace: B row count must equal state dimension");
  if (C.cols() != A.rows())
    throw std::invalid_argument("StateSpace: C column count must equal state dimension");
}

MarkovSeq::MarkovSeq(std::vector<MatrixXd> blocks_, int p_, int r_)
    : blocks(std::move(blocks_)), p(p_), r(r_) {
  for (const auto& b : blocks)
    if (b.rows() != p || b.cols() != r)
      throw std::invalid_argument("MarkovSeq: all blocks must be p x r");
}

MatrixXd MarkovSeq::stacked() const {
  MatrixXd out(static_cast<Eigen::Index>(size()) * r, p);
  for (int k = 0; k < size(); ++k) out.middleRows(k * r, r) = blocks[k].transpose();
  return out;
}

MarkovSeq MarkovSeq::from_stacked(const MatrixXd& gt, int p, int r) {
  if (gt.cols() != p || gt.rows() % r != 0)
    throw std::invalid_argument("MarkovSeq::from_stacked: shape mismatch");
  const int L = static_cast<int>(gt.rows()) / r;
  std::vector<MatrixXd> blocks(L);
  for (int k = 0; k < L; ++k) blocks[k] = gt.middleRows(k * r, r).transpose();
  return MarkovSeq(std::move(blocks), p, r);
}

HankelMatrix::HankelMatrix(MatrixXd data_, int T_, int p_, int r_)
    : data(std::move(data_)), T(T_), p(p_), r(r_) {
  if (data.rows() != static_cast<Eigen::Index>(T) * p ||
      data.cols() != static_cast<Eigen::Index>(T) * r)
    throw std::invalid_argument("HankelMatrix: data must be Tp x Tr");
  for (int i = 0; i < T; ++i)
    for (int j = 0; j + 1 < T; ++j) {
      if (i + 1 >= T) continue;
      // block (i, j+1) and block (i+1, j) lie on the same anti-diagonal
      if (data.block(i * p, (j + 1) * r, p, r) != data.block((i + 1) * p, j * r, p, r))
        throw std::invalid_argument("HankelMatrix: block anti-diagonals are not constant");
    }
}

MarkovSeq markov_params(const StateSpace& sys, int count) {
  if (count < 1) throw std::invalid_argument("markov_params: count must be >= 1");
  std::vector<MatrixXd> blocks;
  blocks.reserve(count);
  MatrixXd x = sys.B;  // A^{k-1} B
  for (int k = 0; k < count; ++k) {
    blocks.push_back(sys.C * x);
    if (k + 1 < count) x = sys.A * x;
  }
  return MarkovSeq(std::move(blocks), sys.p(), sys.r());
}

HankelMatrix hankel_map(const MarkovSeq& g, int T) {
  if (g.size() != 2 * T - 1)
    throw std::invalid_argument("hankel_map: need exactly 2T-1 blocks");
  MatrixXd H(static_cast<Eigen::Index>(T) * g.p, static_cast<Eigen::Index>(T) * g.r);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < T; ++j) H.block(i * g.p, j * g.r, g.p, g.r) = g.blocks[i + j];
  return HankelMatrix(std::move(H), T, g.p, g.r);
}

double hankel_weight(int k, int T) { return std::min({k, T, 2 * T - k}); }

MatrixXd hankel_adjoint_pinv(const MatrixXd& h, int T, int p, int r) {
  if (h.rows() != static_cast<Eigen::Index>(2 * T - 1) * r || h.cols() != p)
    throw std::invalid_argument("hankel_adjoint_pinv: h must be (2T-1)r x p");
  MatrixXd out(static_cast<Eigen::Index>(T) * p, static_cast<Eigen::Index>(T) * r);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < T; ++j) {
      const int k = i + j;  // 0-based Markov index, weight uses k+1
      out.block(i * p, j * r, p, r) =
          h.middleRows(k * r, r).transpose() / hankel_weight(k + 1, T);
    }
  return out;
}

MatrixXd hankel_pullback(const MatrixXd& M, int T, int p, int r) {
  if (M.rows() != static_cast<Eigen::Index>(T) * p ||
      M.cols() != static_cast<Eigen::Index>(T) * r)
    throw std::invalid_argument("hankel_pullback: M must be Tp x Tr");
  MatrixXd out = MatrixXd::Zero(static_cast<Eigen::Index>(2 * T - 1) * r, p);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < T; ++j)
      out.middleRows((i + j) * r, r) += M.block(i * p, j * r, p, r).transpose();
  return out;
}

MatrixXd observability(const StateSpace& sys, int T) {
  if (T < 1) throw std::invalid_argument("observability: T must be >= 1");
  MatrixXd O(static_cast<Eigen::Index>(T) * sys.p(), sys.d());
  MatrixXd row = sys.C;
  for (int k = 0; k < T; ++k) {
    O.middleRows(k * sys.p(), sys.p()) = row;
    if (k + 1 < T) row = row * sys.A;
  }
  return O;
}

MatrixXd controllability(const StateSpace& sys, int T) {
  if (T < 1) throw std::invalid_argument("controllability: T must be >= 1");
  MatrixXd Cm(sys.d(), static_cast<Eigen::Index>(T) * sys.r());
  MatrixXd col = sys.B;
  for (int k = 0; k < T; ++k) {
    Cm.middleCols(k * sys.r(), sys.r()) = col;
    if (k + 1 < T) col = sys.A * col;
  }
  return Cm;
}

int mcmillan_degree(const MarkovSeq& g, int T, double rank_tol) {
  if (rank_tol <= 0.0) throw std::invalid_argument("mcmillan_degree: rank_tol must be > 0");
  const HankelMatrix H = hankel_map(g, T);
  const VectorXd s = Eigen::BDCSVD<MatrixXd>(H.data).singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rank_tol * s(0)) ++rank;
  return rank;
}

double spectral_radius(const MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("spectral_radius: A must be square");
  if (A.rows() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> es(A, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double hinf_norm(const MarkovSeq& g, int grid) {
  if (grid < 64) throw std::invalid_argument("hinf_norm: grid must be >= 64");
  using CMat = Eigen::MatrixXcd;
  double best = 0.0;
  for (int q = 0; q < grid; ++q) {
    const double x = static_cast<double>(q) / grid;
    CMat M = CMat::Zero(g.p, g.r);
    for (int j = 0; j < g.size(); ++j) {
      const std::complex<double> z = std::polar(1.0, 2.0 * M_PI * j * x);
      M += z * g.blocks[j];
    }
    const double s = Eigen::JacobiSVD<CMat>(M).singularValues()(0);
    best = std::max(best, s);
  }
  return best;
}

bool is_stable(const StateSpace& sys) { return spectral_radius(sys.A) < 1.0; }

void fix_svd_signs(MatrixXd& U, MatrixXd& V) {
  for (Eigen::Index j = 0; j < U.cols() && j < V.cols(); ++j) {
    const double scale = U.col(j).cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      if (std::abs(U(i, j)) > 1e-12 * scale) {
        if (U(i, j) < 0.0) {
          U.col(j) = -U.col(j);
          V.col(j) = -V.col(j);
        }
        break;
      }
    }
  }
}

}  // namespace hsid
