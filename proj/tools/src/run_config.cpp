#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mpct::cli {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string child(const std::string& path, const std::string& key) {
  return path + "/" + key;
}
std::string child(const std::string& path, std::size_t i) {
  return path + "/" + std::to_string(i);
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number, got " + std::string(j.type_name()));
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

int as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) fail(path, "integer out of range");
  return static_cast<int>(v);
}

bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

// null entries map to +-big (sign given by `null_value`).
VectorXd as_vector(const Json& j, const std::string& path,
                   std::optional<double> null_value = std::nullopt) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_null() && null_value) {
      v(static_cast<Eigen::Index>(i)) = *null_value;
    } else {
      v(static_cast<Eigen::Index>(i)) = as_number(j[i], child(path, i));
    }
  }
  return v;
}

MatrixXd as_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) fail(child(path, 0), "expected a non-empty row");
  const std::size_t cols = j[0].size();
  MatrixXd M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = child(path, r);
    if (!j[r].is_array()) fail(rp, "expected an array");
    if (j[r].size() != cols) {
      fail(rp, "row has " + std::to_string(j[r].size()) + " entries, expected " +
                   std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_number(j[r][c], child(rp, c));
    }
  }
  return M;
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(child(path, key), "missing required field");
  return *it;
}

void check_keys(const Json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "/" : path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(child(path, it.key()), "unknown field");
  }
}

void check_size(const VectorXd& v, Eigen::Index expected, const std::string& path) {
  if (v.size() != expected) {
    fail(path, "has " + std::to_string(v.size()) + " entries, expected " +
                   std::to_string(expected));
  }
}

void check_shape(const MatrixXd& M, Eigen::Index rows, Eigen::Index cols,
                 const std::string& path) {
  if (M.rows() != rows || M.cols() != cols) {
    fail(path, "is " + std::to_string(M.rows()) + "x" + std::to_string(M.cols()) +
                   ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Json vector_json(const VectorXd& v, std::optional<double> big = std::nullopt) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (big && std::abs(v(i)) >= *big) {
      a.push_back(nullptr);
    } else {
      a.push_back(v(i));
    }
  }
  return a;
}

Json matrix_json(const MatrixXd& M) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

std::string_view pattern_name(BoostPattern p) {
  return p == BoostPattern::kWholeColumn ? "whole_column" : "constraint_list";
}

RunConfig from_json(const Json& root) {
  check_keys(root, "",
             {"model", "costs", "horizon", "rho", "epsilon", "max_iter",
              "big_bound", "simulation", "reference", "warmstart", "seed",
              "compare", "bench", "output", "offline_artifact"});
  RunConfig cfg;

  if (auto it = root.find("big_bound"); it != root.end()) {
    cfg.mpc.big_bound = as_number(*it, "/big_bound");
    if (!(cfg.mpc.big_bound > 0.0)) fail("/big_bound", "must be positive");
  } else {
    cfg.mpc.big_bound = kDefaultBigBound;
  }
  const double big = cfg.mpc.big_bound;

  // model
  const Json& jm = require(root, "", "model");
  check_keys(jm, "/model", {"A", "B", "x_lb", "x_ub", "u_lb", "u_ub", "eps_x", "eps_u"});
  SystemModel& model = cfg.model;
  model.A = as_matrix(require(jm, "/model", "A"), "/model/A");
  const Eigen::Index n = model.A.rows();
  check_shape(model.A, n, n, "/model/A");
  model.B = as_matrix(require(jm, "/model", "B"), "/model/B");
  if (model.B.rows() != n) check_shape(model.B, n, model.B.cols(), "/model/B");
  const Eigen::Index m = model.B.cols();
  model.x_lb = as_vector(require(jm, "/model", "x_lb"), "/model/x_lb", -big);
  model.x_ub = as_vector(require(jm, "/model", "x_ub"), "/model/x_ub", big);
  model.u_lb = as_vector(require(jm, "/model", "u_lb"), "/model/u_lb", -big);
  model.u_ub = as_vector(require(jm, "/model", "u_ub"), "/model/u_ub", big);
  check_size(model.x_lb, n, "/model/x_lb");
  check_size(model.x_ub, n, "/model/x_ub");
  check_size(model.u_lb, m, "/model/u_lb");
  check_size(model.u_ub, m, "/model/u_ub");
  if (auto it = jm.find("eps_x"); it != jm.end()) {
    model.eps_x = as_vector(*it, "/model/eps_x");
    check_size(model.eps_x, n, "/model/eps_x");
  }
  if (auto it = jm.find("eps_u"); it != jm.end()) {
    model.eps_u = as_vector(*it, "/model/eps_u");
    check_size(model.eps_u, m, "/model/eps_u");
  }

  // costs
  const Json& jc = require(root, "", "costs");
  check_keys(jc, "/costs", {"Q", "R", "T", "S"});
  cfg.costs.Q_diag = as_vector(require(jc, "/costs", "Q"), "/costs/Q");
  cfg.costs.R_diag = as_vector(require(jc, "/costs", "R"), "/costs/R");
  cfg.costs.T = as_matrix(require(jc, "/costs", "T"), "/costs/T");
  cfg.costs.S = as_matrix(require(jc, "/costs", "S"), "/costs/S");
  check_size(cfg.costs.Q_diag, n, "/costs/Q");
  check_size(cfg.costs.R_diag, m, "/costs/R");
  check_shape(cfg.costs.T, n, n, "/costs/T");
  check_shape(cfg.costs.S, m, m, "/costs/S");

  cfg.mpc.N = as_int(require(root, "", "horizon"), "/horizon");
  if (cfg.mpc.N < 2) fail("/horizon", "must be >= 2");
  if (auto it = root.find("epsilon"); it != root.end()) {
    cfg.mpc.epsilon = as_number(*it, "/epsilon");
    if (!(cfg.mpc.epsilon > 0.0)) fail("/epsilon", "must be positive");
  }
  cfg.mpc.max_iter = kDefaultMaxIter;
  if (auto it = root.find("max_iter"); it != root.end()) {
    cfg.mpc.max_iter = as_int(*it, "/max_iter");
    if (cfg.mpc.max_iter < 1) fail("/max_iter", "must be >= 1");
  }

  // rho
  const Json& jr = require(root, "", "rho");
  if (jr.is_number()) {
    cfg.rho.kind = RhoSpec::Kind::kScalar;
    cfg.rho.scalar = as_number(jr, "/rho");
    if (!(cfg.rho.scalar > 0.0)) fail("/rho", "must be positive");
  } else if (jr.is_object() && jr.contains("base")) {
    check_keys(jr, "/rho", {"base", "boosted", "pattern"});
    cfg.rho.kind = RhoSpec::Kind::kBaseBoost;
    cfg.rho.base = as_number(jr["base"], "/rho/base");
    cfg.rho.boosted = as_number(require(jr, "/rho", "boosted"), "/rho/boosted");
    if (!(cfg.rho.base > 0.0)) fail("/rho/base", "must be positive");
    if (!(cfg.rho.boosted > 0.0)) fail("/rho/boosted", "must be positive");
    if (auto it = jr.find("pattern"); it != jr.end()) {
      const std::string p = as_string(*it, "/rho/pattern");
      if (p == "constraint_list") {
        cfg.rho.pattern = BoostPattern::kConstraintList;
      } else if (p == "whole_column") {
        cfg.rho.pattern = BoostPattern::kWholeColumn;
      } else {
        fail("/rho/pattern", "expected \"constraint_list\" or \"whole_column\"");
      }
    }
  } else if (jr.is_object()) {
    check_keys(jr, "/rho", {"rho0", "rho_s", "rho_hat"});
    cfg.rho.kind = RhoSpec::Kind::kExplicit;
    auto& e = cfg.rho.explicit_values;
    e.rho0 = as_vector(require(jr, "/rho", "rho0"), "/rho/rho0");
    e.rho_s = as_vector(require(jr, "/rho", "rho_s"), "/rho/rho_s");
    e.rho_hat = as_matrix(require(jr, "/rho", "rho_hat"), "/rho/rho_hat");
    check_size(e.rho0, n, "/rho/rho0");
    check_size(e.rho_s, n + m, "/rho/rho_s");
    check_shape(e.rho_hat, n + m, cfg.mpc.N + 1, "/rho/rho_hat");
  } else {
    fail("/rho", "expected a number or an object");
  }

  // simulation
  cfg.x0 = VectorXd::Zero(n);
  if (n == 3) cfg.x0 << 0.0, 0.0, 20.0;
  if (auto it = root.find("simulation"); it != root.end()) {
    check_keys(*it, "/simulation", {"Ts", "steps", "substeps", "scale", "x0"});
    const Json& js = *it;
    if (js.contains("Ts")) cfg.sim.Ts = as_number(js["Ts"], "/simulation/Ts");
    if (js.contains("steps")) cfg.sim.steps = as_int(js["steps"], "/simulation/steps");
    if (js.contains("substeps")) {
      cfg.sim.substeps = as_int(js["substeps"], "/simulation/substeps");
    }
    if (js.contains("scale")) cfg.sim.scale = as_number(js["scale"], "/simulation/scale");
    if (js.contains("x0")) {
      cfg.x0 = as_vector(js["x0"], "/simulation/x0");
      check_size(cfg.x0, n, "/simulation/x0");
    }
    if (!(cfg.sim.Ts > 0.0)) fail("/simulation/Ts", "must be positive");
    if (cfg.sim.steps < 0) fail("/simulation/steps", "must be >= 0");
    if (cfg.sim.substeps < 1) fail("/simulation/substeps", "must be >= 1");
    if (!(cfg.sim.scale > 0.0)) fail("/simulation/scale", "must be positive");
  }

  cfg.reference = VectorXd::Zero(n + m);
  if (auto it = root.find("reference"); it != root.end()) {
    cfg.reference = as_vector(*it, "/reference");
    check_size(cfg.reference, n + m, "/reference");
  }
  if (auto it = root.find("warmstart"); it != root.end()) {
    cfg.warmstart = as_bool(*it, "/warmstart");
  }
  if (auto it = root.find("seed"); it != root.end()) {
    if (!it->is_number_unsigned()) fail("/seed", "expected a non-negative integer");
    cfg.seed = it->get<std::uint64_t>();
  }

  if (auto it = root.find("compare"); it != root.end()) {
    check_keys(*it, "/compare", {"trials", "iterations"});
    if (it->contains("trials")) cfg.trials = as_int((*it)["trials"], "/compare/trials");
    if (it->contains("iterations")) {
      cfg.compare_iterations = as_int((*it)["iterations"], "/compare/iterations");
    }
    if (cfg.trials < 0) fail("/compare/trials", "must be >= 0");
    if (cfg.compare_iterations < 1) fail("/compare/iterations", "must be >= 1");
  }

  if (auto it = root.find("bench"); it != root.end()) {
    check_keys(*it, "/bench", {"horizons", "repeats"});
    if (it->contains("horizons")) {
      const Json& jh = (*it)["horizons"];
      if (!jh.is_array()) fail("/bench/horizons", "expected an array of integers");
      cfg.horizons.clear();
      for (std::size_t i = 0; i < jh.size(); ++i) {
        const int h = as_int(jh[i], child("/bench/horizons", i));
        if (h < 2) fail(child("/bench/horizons", i), "must be >= 2");
        cfg.horizons.push_back(h);
      }
    }
    if (it->contains("repeats")) {
      cfg.bench_repeats = as_int((*it)["repeats"], "/bench/repeats");
      if (cfg.bench_repeats < 1) fail("/bench/repeats", "must be >= 1");
    }
  }

  if (auto it = root.find("output"); it != root.end()) {
    check_keys(*it, "/output", {"artifact", "trajectory", "bench", "report"});
    if (it->contains("artifact")) {
      cfg.artifact_out = as_string((*it)["artifact"], "/output/artifact");
    }
    if (it->contains("trajectory")) {
      cfg.trajectory_out = as_string((*it)["trajectory"], "/output/trajectory");
    }
    if (it->contains("bench")) cfg.bench_out = as_string((*it)["bench"], "/output/bench");
    if (it->contains("report")) {
      cfg.report_out = as_string((*it)["report"], "/output/report");
    }
  }
  if (auto it = root.find("offline_artifact"); it != root.end() && !it->is_null()) {
    cfg.offline_artifact = as_string(*it, "/offline_artifact");
  }
  return cfg;
}

bool same(const MatrixXd& a, const MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

}  // namespace

bool RhoSpec::operator==(const RhoSpec& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::kScalar:
      return scalar == o.scalar;
    case Kind::kBaseBoost:
      return base == o.base && boosted == o.boosted && pattern == o.pattern;
    case Kind::kExplicit:
      return same(explicit_values.rho0, o.explicit_values.rho0) &&
             same(explicit_values.rho_s, o.explicit_values.rho_s) &&
             same(explicit_values.rho_hat, o.explicit_values.rho_hat);
  }
  return false;
}

bool RunConfig::operator==(const RunConfig& o) const {
  const auto& a = model;
  const auto& b = o.model;
  return same(a.A, b.A) && same(a.B, b.B) && same(a.x_lb, b.x_lb) &&
         same(a.x_ub, b.x_ub) && same(a.u_lb, b.u_lb) && same(a.u_ub, b.u_ub) &&
         same(a.eps_x, b.eps_x) && same(a.eps_u, b.eps_u) &&
         same(costs.Q_diag, o.costs.Q_diag) && same(costs.R_diag, o.costs.R_diag) &&
         same(costs.T, o.costs.T) && same(costs.S, o.costs.S) && mpc.N == o.mpc.N &&
         mpc.epsilon == o.mpc.epsilon && mpc.max_iter == o.mpc.max_iter &&
         mpc.big_bound == o.mpc.big_bound && rho == o.rho && sim.Ts == o.sim.Ts &&
         sim.steps == o.sim.steps && sim.substeps == o.sim.substeps &&
         sim.scale == o.sim.scale && same(x0, o.x0) && same(reference, o.reference) &&
         warmstart == o.warmstart && seed == o.seed && trials == o.trials &&
         compare_iterations == o.compare_iterations && horizons == o.horizons &&
         bench_repeats == o.bench_repeats && artifact_out == o.artifact_out &&
         trajectory_out == o.trajectory_out && bench_out == o.bench_out &&
         report_out == o.report_out && offline_artifact == o.offline_artifact;
}

RunConfig parse_config(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into line:column.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": invalid JSON (" + e.what() + ")");
  }
  return from_json(root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string serialize_config(const RunConfig& cfg) {
  const double big = cfg.mpc.big_bound;
  Json root;
  Json model;
  model["A"] = matrix_json(cfg.model.A);
  model["B"] = matrix_json(cfg.model.B);
  model["x_lb"] = vector_json(cfg.model.x_lb, big);
  model["x_ub"] = vector_json(cfg.model.x_ub, big);
  model["u_lb"] = vector_json(cfg.model.u_lb, big);
  model["u_ub"] = vector_json(cfg.model.u_ub, big);
  if (cfg.model.eps_x.size() > 0) model["eps_x"] = vector_json(cfg.model.eps_x);
  if (cfg.model.eps_u.size() > 0) model["eps_u"] = vector_json(cfg.model.eps_u);
  root["model"] = std::move(model);

  root["costs"] = {{"Q", vector_json(cfg.costs.Q_diag)},
                   {"R", vector_json(cfg.costs.R_diag)},
                   {"T", matrix_json(cfg.costs.T)},
                   {"S", matrix_json(cfg.costs.S)}};
  root["horizon"] = cfg.mpc.N;

  switch (cfg.rho.kind) {
    case RhoSpec::Kind::kScalar:
      root["rho"] = cfg.rho.scalar;
      break;
    case RhoSpec::Kind::kBaseBoost:
      root["rho"] = {{"base", cfg.rho.base},
                     {"boosted", cfg.rho.boosted},
                     {"pattern", pattern_name(cfg.rho.pattern)}};
      break;
    case RhoSpec::Kind::kExplicit:
      root["rho"] = {{"rho0", vector_json(cfg.rho.explicit_values.rho0)},
                     {"rho_s", vector_json(cfg.rho.explicit_values.rho_s)},
                     {"rho_hat", matrix_json(cfg.rho.explicit_values.rho_hat)}};
      break;
  }
  root["epsilon"] = cfg.mpc.epsilon;
  root["max_iter"] = cfg.mpc.max_iter;
  root["big_bound"] = cfg.mpc.big_bound;
  root["simulation"] = {{"Ts", cfg.sim.Ts},
                        {"steps", cfg.sim.steps},
                        {"substeps", cfg.sim.substeps},
                        {"scale", cfg.sim.scale},
                        {"x0", vector_json(cfg.x0)}};
  root["reference"] = vector_json(cfg.reference);
  root["warmstart"] = cfg.warmstart;
  root["seed"] = cfg.seed;
  root["compare"] = {{"trials", cfg.trials}, {"iterations", cfg.compare_iterations}};
  root["bench"] = {{"horizons", cfg.horizons}, {"repeats", cfg.bench_repeats}};
  Json out = Json::object();
  if (!cfg.artifact_out.empty()) out["artifact"] = cfg.artifact_out;
  if (!cfg.trajectory_out.empty()) out["trajectory"] = cfg.trajectory_out;
  if (!cfg.bench_out.empty()) out["bench"] = cfg.bench_out;
  if (!cfg.report_out.empty()) out["report"] = cfg.report_out;
  root["output"] = std::move(out);
  if (cfg.offline_artifact) root["offline_artifact"] = *cfg.offline_artifact;
  return root.dump(2) + "\n";
}

PenaltyParams resolve_rho(const RunConfig& cfg) {
  const int n = static_cast<int>(cfg.model.A.rows());
  const int m = static_cast<int>(cfg.model.B.cols());
  switch (cfg.rho.kind) {
    case RhoSpec::Kind::kScalar:
      return uniform_rho(n, m, cfg.mpc.N, cfg.rho.scalar);
    case RhoSpec::Kind::kBaseBoost:
      return build_rho(cfg.model, cfg.mpc, cfg.rho.base, cfg.rho.boosted,
                       cfg.rho.pattern);
    case RhoSpec::Kind::kExplicit:
      return cfg.rho.explicit_values;
  }
  return {};
}

ValidatedProblem make_problem(const RunConfig& cfg) {
  try {
    return validate_problem(cfg.model, cfg.costs, cfg.mpc, resolve_rho(cfg));
  } catch (const MpctError& e) {
    throw ConfigError(std::string("invalid problem (") +
                      std::string(to_string(e.code())) + "): " + e.what());
  }
}

}  // namespace mpct::cli
