#include "hsid/config.hpp"

#include <fstream>

namespace hsid {

json matrix_to_json(const MatrixXd& M) {
  json j;
  j["rows"] = M.rows();
  j["cols"] = M.cols();
  std::vector<double> data;
  data.reserve(M.size());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index k = 0; k < M.cols(); ++k) data.push_back(M(i, k));
  j["data"] = std::move(data);
  return j;
}

MatrixXd matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw ConfigError(field, field + ": matrix needs rows/cols/data keys");
  const Eigen::Index rows = j["rows"].get<Eigen::Index>();
  const Eigen::Index cols = j["cols"].get<Eigen::Index>();
  const auto& data = j["data"];
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw ConfigError(field, field + ": data length must be rows*cols");
  MatrixXd M(rows, cols);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = data[idx++].get<double>();
  return M;
}

StateSpace system_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, field + " must be an object");
  for (const char* key : {"A", "B", "C"})
    if (!j.contains(key)) throw ConfigError(field + "." + key, field + " is missing " + key);
  try {
    return StateSpace(matrix_from_json(j["A"], field + ".A"),
                      matrix_from_json(j["B"], field + ".B"),
                      matrix_from_json(j["C"], field + ".C"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

json system_to_json(const StateSpace& sys) {
  return json{{"A", matrix_to_json(sys.A)}, {"B", matrix_to_json(sys.B)},
              {"C", matrix_to_json(sys.C)}};
}

NoiseSpec noise_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, field + " must be an object");
  if (!j.contains("sigma_u"))
    throw ConfigError(field + ".sigma_u", field + " is missing sigma_u");
  NoiseSpec n;
  n.sigma_u = j["sigma_u"].get<double>();
  n.sigma_w = j.value("sigma_w", 0.0);
  n.sigma_v = j.value("sigma_v", 0.0);
  try {
    n.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
  return n;
}

namespace {

std::optional<double> lambda_entry(const json& j, const std::string& key,
                                   const std::string& field) {
  if (!j.contains(key)) return std::nullopt;
  const auto& v = j[key];
  if (v.is_string()) {
    if (v.get<std::string>() == "auto") return std::nullopt;
    throw ConfigError(field + "." + key, key + " must be a positive number or \"auto\"");
  }
  return v.get<double>();
}

}  // namespace

EstimationConfig estimation_from_json(const json& j, const StateSpace* truth,
                                      const NoiseSpec* noise, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, field + " must be an object");
  EstimationConfig cfg;
  if (!j.contains("T0")) throw ConfigError(field + ".T0", field + " is missing T0");
  cfg.T0 = j["T0"].get<int>();
  cfg.lambda0 = lambda_entry(j, "lambda0", field);
  cfg.lambda1 = lambda_entry(j, "lambda1", field);
  cfg.delta = j.value("delta", 0.05);
  cfg.c = j.value("c", 1.0);
  cfg.eta_check = j.value("eta_check", 0);
  if (noise) cfg.sigma_u = noise->sigma_u;
  if (j.contains("sigma_u")) cfg.sigma_u = j["sigma_u"].get<double>();

  if (j.contains("phi") && j["phi"].is_string()) {
    if (j["phi"].get<std::string>() != "oracle")
      throw ConfigError(field + ".phi", "phi must be a number or \"oracle\"");
    if (!truth || !noise)
      throw ConfigError(field + ".phi", "phi: \"oracle\" requires a ground-truth system");
    cfg.phi = phi_oracle(*truth, *noise, cfg.T0);
  } else {
    cfg.phi = j.value("phi", 1.0);
  }

  if (!j.contains("xi")) throw ConfigError(field + ".xi", field + " is missing xi");
  if (j["xi"].is_string()) {
    if (j["xi"].get<std::string>() != "oracle")
      throw ConfigError(field + ".xi", "xi must be a positive number or \"oracle\"");
    if (!truth)
      throw ConfigError(field + ".xi", "xi: \"oracle\" requires a ground-truth system");
    cfg.xi = xi_oracle(*truth);
  } else {
    cfg.xi = j["xi"].get<double>();
  }

  if (j.contains("solver")) {
    const auto& s = j["solver"];
    cfg.solver.rho = s.value("rho", cfg.solver.rho);
    cfg.solver.max_iter = s.value("max_iter", cfg.solver.max_iter);
    cfg.solver.tol_abs = s.value("tol_abs", cfg.solver.tol_abs);
    cfg.solver.tol_rel = s.value("tol_rel", cfg.solver.tol_rel);
    cfg.solver.allow_rank_deficient =
        s.value("allow_rank_deficient", cfg.solver.allow_rank_deficient);
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
  return cfg;
}

SimulateConfig simulate_config_from_json(const json& j) {
  SimulateConfig cfg;
  if (!j.contains("system")) throw ConfigError("system", "config is missing system");
  cfg.system = system_from_json(j["system"]);
  if (!j.contains("noise")) throw ConfigError("noise", "config is missing noise");
  cfg.noise = noise_from_json(j["noise"]);
  if (!j.contains("N")) throw ConfigError("N", "config is missing N");
  cfg.N = j["N"].get<int>();
  if (cfg.N < 1) throw ConfigError("N", "N must be >= 1");
  cfg.seed = j.value("seed", 0ULL);
  cfg.diag_T = j.value("diag_T", 0);
  const std::string kind = j.value("noise_kind", "gaussian");
  if (kind == "gaussian") {
    cfg.kind = NoiseKind::kGaussian;
  } else if (kind == "rademacher") {
    cfg.kind = NoiseKind::kRademacher;
  } else {
    throw ConfigError("noise_kind", "noise_kind must be gaussian or rademacher");
  }
  return cfg;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("JSON parse error: ") + e.what());
  }
}

std::string config_hash(const json& j) {
  const std::string dump = j.dump();  // object keys are stored sorted
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json RunManifest::to_json() const {
  return json{{"config_hash", config_hash},
              {"seeds", seeds},
              {"outputs", outputs},
              {"wall_ms", wall_ms},
              {"tool_version", tool_version}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << content;
}

}  // namespace hsid
