#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpct/pendulum.hpp"

namespace mpct::cli {

/// Malformed or semantically invalid configuration. The message starts with
/// the JSON pointer of the offending field (or the line/column of a syntax
/// error).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RhoSpec {
  enum class Kind { kScalar, kBaseBoost, kExplicit };
  Kind kind = Kind::kBaseBoost;
  double scalar = 0.0;
  double base = 20.0;
  double boosted = 1000.0;
  BoostPattern pattern = BoostPattern::kConstraintList;
  PenaltyParams explicit_values;

  bool operator==(const RhoSpec& o) const;
};

struct RunConfig {
  SystemModel model;
  CostWeights costs;
  MpctConfig mpc;
  RhoSpec rho;

  pendulum::SimConfig sim;
  VectorXd x0;         // physical units, simulate
  VectorXd reference;  // physical units for simulate, controller units for solve

  bool warmstart = false;
  std::uint64_t seed = 1;
  int trials = 20;
  int compare_iterations = 50;
  std::vector<int> horizons{5, 10, 20, 40};
  int bench_repeats = 20;

  std::string artifact_out;
  std::string trajectory_out;
  std::string bench_out;
  std::string report_out;
  std::optional<std::string> offline_artifact;

  bool operator==(const RunConfig& o) const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Inverse of parse_config; bounds at +-big_bound are written as null.
std::string serialize_config(const RunConfig& cfg);

/// Penalty for the configured horizon.
PenaltyParams resolve_rho(const RunConfig& cfg);
ValidatedProblem make_problem(const RunConfig& cfg);

}  // namespace mpct::cli
