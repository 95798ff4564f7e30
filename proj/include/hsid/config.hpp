#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hsid/pipeline.hpp"
#include "hsid/simulate.hpp"
#include "hsid/types.hpp"

namespace hsid {

using nlohmann::json;

/// Schema violation; `field` names the offending key for the CLI message.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& what)
      : std::runtime_error(what), field(std::move(field_)) {}
};

/// Trajectory/config dimension disagreement (CLI exit 5).
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Matrices travel as {"rows": n, "cols": m, "data": [row-major]}.
json matrix_to_json(const MatrixXd& M);
MatrixXd matrix_from_json(const json& j, const std::string& field);

StateSpace system_from_json(const json& j, const std::string& field = "system");
json system_to_json(const StateSpace& sys);

NoiseSpec noise_from_json(const json& j, const std::string& field = "noise");

/// Estimation block; "auto" (or omission) defers lambda0/lambda1 to the rule,
/// and "oracle" for phi/xi resolves them from the ground-truth system.
EstimationConfig estimation_from_json(const json& j, const StateSpace* truth,
                                      const NoiseSpec* noise,
                                      const std::string& field = "estimation");

struct SimulateConfig {
  StateSpace system;
  NoiseSpec noise;
  int N = 0;
  std::uint64_t seed = 0;
  NoiseKind kind = NoiseKind::kGaussian;
  int diag_T = 0;
};

SimulateConfig simulate_config_from_json(const json& j);

json load_json_file(const std::string& path);

/// FNV-1a over the canonical (sorted-key) dump, hex encoded; insensitive to
/// key ordering in the source file.
std::string config_hash(const json& j);

struct RunManifest {
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
  double wall_ms = 0.0;
  std::string tool_version;

  json to_json() const;
};

void write_text_file(const std::string& path, const std::string& content);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace hsid
