#include "hsid/simulate.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "hsid/rng.hpp"

namespace hsid {

namespace {

constexpr double kOverflowGuard = 1e12;

double draw(CounterRng& rng, NoiseKind kind) {
  return kind == NoiseKind::kGaussian ? rng.next_gaussian() : rng.next_rademacher();
}

void fill_row(VectorXd& v, CounterRng& rng, NoiseKind kind, double sigma) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = sigma * draw(rng, kind);
}

}  // namespace

Trajectory simulate(const StateSpace& sys, const NoiseSpec& noise, int N,
                    std::uint64_t seed, NoiseKind kind, int diag_T) {
  noise.validate();
  if (N < 1) throw std::invalid_argument("simulate: N must be >= 1");
  const int d = sys.d(), r = sys.r(), p = sys.p();

  // independent streams so that toggling one noise source leaves the others
  // bit-identical
  CounterRng rng_u(seed, 0), rng_w(seed, 1), rng_v(seed, 2);

  Trajectory traj;
  traj.seed = seed;
  traj.u.resize(N, r);
  traj.y.resize(N, p);
  if (diag_T > 0) {
    traj.parts = NoiseParts{MatrixXd::Zero(N, p), MatrixXd::Zero(N, p),
                            MatrixXd::Zero(N, p)};
  }

  MatrixXd CA2T1;  // C A^{2T-1}, only for the tail diagnostic
  if (diag_T > 0) {
    CA2T1 = sys.C;
    for (int k = 0; k < 2 * diag_T - 1; ++k) CA2T1 = CA2T1 * sys.A;
  }

  VectorXd x = VectorXd::Zero(d);      // current state x_i
  VectorXd s = VectorXd::Zero(d);      // noise-driven part of the state
  VectorXd z = VectorXd::Zero(d);      // delayed input state for the tail term
  VectorXd ui(r), wi(d), vi(p);
  for (int i = 0; i < N; ++i) {
    fill_row(ui, rng_u, kind, noise.sigma_u);
    traj.u.row(i) = ui.transpose();
    if (noise.sigma_w > 0.0) {
      fill_row(wi, rng_w, kind, noise.sigma_w);
    } else {
      wi.setZero();
    }
    x = sys.A * x + sys.B * ui + wi;
    if (x.cwiseAbs().maxCoeff() > kOverflowGuard)
      throw OverflowError("simulate: state norm exceeded 1e12 at step " + std::to_string(i));
    if (noise.sigma_v > 0.0) {
      fill_row(vi, rng_v, kind, noise.sigma_v);
    } else {
      vi.setZero();
    }
    const int n = i + 1;  // output index of this step
    traj.y.row(i) = (sys.C * x + vi).transpose();
    if (traj.parts) {
      s = sys.A * s + wi;
      if (n >= 2 * diag_T) z = sys.A * z + sys.B * traj.u.row(n - 2 * diag_T).transpose();
      traj.parts->xbar_part.row(i) = (CA2T1 * z).transpose();
      traj.parts->w_part.row(i) = (sys.C * s).transpose();
      traj.parts->eps_part.row(i) = vi.transpose();
    }
  }
  traj.x_final = x;
  return traj;
}

RegressionData build_regression(const Trajectory& traj, int T) {
  const int N = traj.length();
  if (T < 1) throw std::invalid_argument("build_regression: T must be >= 1");
  if (N < 2 * T) throw std::invalid_argument("build_regression: need N >= 2T");
  const int r = traj.r(), p = traj.p();
  const int Nbar = N - 2 * T + 1;

  RegressionData data;
  data.T = T;
  data.N_bar = Nbar;
  data.Y.resize(Nbar, p);
  data.X.resize(Nbar, static_cast<Eigen::Index>(2 * T - 1) * r);
  for (int l = 2 * T; l <= N; ++l) {
    const int row = l - 2 * T;
    data.Y.row(row) = traj.y.row(l - 1);
    for (int j = 0; j < 2 * T - 1; ++j)
      data.X.block(row, j * r, 1, r) = traj.u.row(l - 1 - j);
  }
  return data;
}

namespace {

void append_double(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

}  // namespace

void trajectory_to_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("trajectory_to_csv: cannot open " + path);
  std::string line = "t";
  for (int j = 1; j <= traj.r(); ++j) line += ",u_" + std::to_string(j);
  for (int j = 1; j <= traj.p(); ++j) line += ",y_" + std::to_string(j);
  out << line << "\n";
  for (int i = 0; i < traj.length(); ++i) {
    line = std::to_string(i + 1);
    for (int j = 0; j < traj.r(); ++j) {
      line += ',';
      append_double(line, traj.u(i, j));
    }
    for (int j = 0; j < traj.p(); ++j) {
      line += ',';
      append_double(line, traj.y(i, j));
    }
    out << line << "\n";
  }
}

Trajectory trajectory_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trajectory_from_csv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("trajectory_from_csv: empty file");
  int r = 0, p = 0;
  {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.rfind("u_", 0) == 0) ++r;
      if (tok.rfind("y_", 0) == 0) ++p;
    }
  }
  if (r == 0 || p == 0)
    throw std::runtime_error("trajectory_from_csv: header must contain u_* and y_* columns");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (static_cast<int>(vals.size()) != 1 + r + p)
      throw std::runtime_error("trajectory_from_csv: bad column count in row " +
                               std::to_string(rows.size() + 1));
    rows.push_back(std::move(vals));
  }
  Trajectory traj;
  const int N = static_cast<int>(rows.size());
  traj.u.resize(N, r);
  traj.y.resize(N, p);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < r; ++j) traj.u(i, j) = rows[i][1 + j];
    for (int j = 0; j < p; ++j) traj.y(i, j) = rows[i][1 + r + j];
  }
  traj.x_final = VectorXd::Zero(0);
  return traj;
}

}  // namespace hsid
