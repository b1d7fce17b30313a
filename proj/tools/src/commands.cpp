#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "artifact.hpp"
#include "mpct/oracle.hpp"

namespace mpct::cli {

using Json = nlohmann::ordered_json;

namespace {

bool pendulum_shaped(const RunConfig& cfg) {
  return cfg.model.A.rows() == 3 && cfg.model.B.cols() == 1;
}

VectorXd from_list(const std::vector<double>& v, Eigen::Index expected,
                   const char* flag) {
  if (static_cast<Eigen::Index>(v.size()) != expected) {
    throw ConfigError(fmt::format("{}: expected {} values, got {}", flag, expected,
                                  v.size()));
  }
  return Eigen::Map<const VectorXd>(v.data(), expected);
}

Json to_json(const VectorXd& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

struct Prepared {
  ValidatedProblem problem;
  OfflineData offline;
  WarmstartGain gain;
};

void check_artifact_matches(const Artifact& a, const ValidatedProblem& p) {
  const OfflineData& d = a.offline;
  const PenaltyParams& rho = p.rho();
  if (d.n != p.n() || d.m != p.m() || d.N != p.horizon()) {
    throw ArtifactError(fmt::format(
        "artifact dimensions (n={}, m={}, N={}) do not match the config (n={}, m={}, N={})",
        d.n, d.m, d.N, p.n(), p.m(), p.horizon()));
  }
  if (d.A != p.model().A || d.B != p.model().B || d.rho0 != rho.rho0 ||
      d.rho_s != rho.rho_s || d.rho_hat != rho.rho_hat || d.T != p.costs().T ||
      d.S != p.costs().S) {
    throw ArtifactError("artifact was built from a different model or penalty");
  }
}

// Offline data from the configured artifact, or computed inline.
Prepared prepare(const RunConfig& cfg, bool need_gain) {
  ValidatedProblem problem = make_problem(cfg);
  if (cfg.offline_artifact) {
    spdlog::info("loading offline data from {}", *cfg.offline_artifact);
    Artifact a = read_artifact(*cfg.offline_artifact);
    check_artifact_matches(a, problem);
    return {std::move(problem), std::move(a.offline), std::move(a.gain)};
  }
  OfflineData offline = build_offline(problem);
  WarmstartGain gain;
  if (need_gain) gain = compute_warmstart_gain(problem);
  return {std::move(problem), std::move(offline), std::move(gain)};
}

std::string output_path(const Options& opts, const std::string& configured) {
  return opts.out ? *opts.out : configured;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw ConfigError(path + ": cannot open for writing");
  f << text;
  if (!f) throw ConfigError(path + ": write failed");
}

double max_penalty_of(const ValidatedProblem& p) { return max_penalty(p.rho()); }

// Uniform sample from the box; components with an effectively infinite
// bound are drawn from [-1, 1] instead.
VectorXd sample_box(const VectorXd& lo, const VectorXd& hi, double big,
                    std::mt19937_64& rng) {
  VectorXd v(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    const double a = std::abs(lo(i)) >= big ? -1.0 : lo(i);
    const double b = std::abs(hi(i)) >= big ? 1.0 : hi(i);
    v(i) = std::uniform_real_distribution<double>(a, b)(rng);
  }
  return v;
}

// Fixed 12 decimals; values that round to zero print as 0, not -0.
std::string fixed12(double v) {
  if (std::abs(v) < 5e-13) v = 0.0;
  return fmt::format("{:.12f}", v);
}

}  // namespace

VectorXd controller_state(const RunConfig& cfg, const VectorXd& physical) {
  return pendulum_shaped(cfg) ? pendulum::scale_state(physical, cfg.sim.scale) : physical;
}

VectorXd controller_reference(const RunConfig& cfg, const VectorXd& physical) {
  if (!pendulum_shaped(cfg)) return physical;
  VectorXd r(4);
  r << pendulum::scale_state(physical.head(3), cfg.sim.scale),
      pendulum::scale_input(physical.tail(1), cfg.sim.scale);
  return r;
}

std::string trajectory_csv_header(int n, int m) {
  std::string h = "step,time_s,phi,phi_dot,theta_dot,u";
  for (int i = 1; i <= n; ++i) h += fmt::format(",xs_{}", i);
  for (int i = 1; i <= m; ++i) h += fmt::format(",us_{}", i);
  h += ",iterations,residual,solve_time_us";
  return h;
}

void write_trajectory_csv(std::ostream& os, const pendulum::Trajectory& traj,
                          const pendulum::SimConfig& sim) {
  const int n = traj.artificial_refs.empty()
                    ? 3
                    : static_cast<int>(traj.artificial_refs.front().size()) - 1;
  os << trajectory_csv_header(n, 1) << '\n';
  for (std::size_t k = 0; k < traj.inputs.size(); ++k) {
    const VectorXd& x = traj.states[k];
    std::string line = fmt::format("{},{},{},{},{},{}", k, fixed12(static_cast<double>(k) * sim.Ts),
                                   fixed12(x(0)), fixed12(x(1)), fixed12(x(2)),
                                   fixed12(traj.inputs[k](0)));
    for (Eigen::Index i = 0; i < traj.artificial_refs[k].size(); ++i) {
      line += "," + fixed12(traj.artificial_refs[k](i));
    }
    const double us = std::chrono::duration<double, std::micro>(traj.wall_times[k]).count();
    line += fmt::format(",{},{},{:.3f}", traj.iterations[k], fixed12(traj.residuals[k]), us);
    os << line << '\n';
  }
}

int cmd_precompute(const RunConfig& cfg, const Options& opts, std::ostream& out) {
  const std::string path = output_path(opts, cfg.artifact_out);
  if (path.empty()) {
    throw ConfigError("/output/artifact: no artifact path (set it or pass --out)");
  }
  const ValidatedProblem problem = make_problem(cfg);
  const OfflineData offline = build_offline(problem);
  const WarmstartGain gain = compute_warmstart_gain(problem);
  write_artifact(path, offline, gain);

  const double bound = offline.rho_upper_bound;
  const double rho_max = max_penalty_of(problem);
  out << fmt::format("rho upper bound: {:.12e}\n", bound);
  out << fmt::format("max rho: {:.12e}\n", rho_max);
  if (rho_max > bound) {
    out << fmt::format(
        "warning: rho {:g} exceeds the convergence bound {:.6g}; convergence is "
        "not guaranteed\n",
        rho_max, bound);
    spdlog::warn("rho {} exceeds the convergence bound {}", rho_max, bound);
  }
  out << fmt::format("scalars: {}\n", artifact_scalar_count(offline, gain));
  out << fmt::format("warmstart support residual: {:.3e}\n", gain.support_residual);
  out << fmt::format("artifact: {}\n", path);
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, const Options& opts, std::ostream& out) {
  const Prepared prep = prepare(cfg, false);
  const int n = prep.problem.n();
  const int m = prep.problem.m();
  const VectorXd x = opts.x ? from_list(*opts.x, n, "--x") : VectorXd::Zero(n);
  const VectorXd r = opts.r ? from_list(*opts.r, n + m, "--r") : VectorXd::Zero(n + m);

  const SolverSettings settings{cfg.mpc.epsilon, cfg.mpc.max_iter};
  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult res =
      eadmm_solve(prep.offline, settings, x, r, cold_start(n, m, prep.problem.horizon()));
  const auto t1 = std::chrono::steady_clock::now();
  spdlog::info("solve: {} iterations in {:.1f} us", res.iterations,
               std::chrono::duration<double, std::micro>(t1 - t0).count());

  Json report;
  report["u0"] = to_json(res.u0);
  report["xs"] = to_json(res.xs_us.head(n));
  report["us"] = to_json(res.xs_us.tail(m));
  report["iterations"] = res.iterations;
  report["residual"] = res.residual_inf;
  report["converged"] = res.converged;
  report["rho_above_bound"] = res.rho_above_bound;
  const std::string text = report.dump(2) + "\n";
  out << text;
  if (opts.out) write_text(*opts.out, text);
  return res.converged ? kExitOk : kExitNotConverged;
}

int cmd_simulate(const RunConfig& cfg, const Options& opts, std::ostream& out) {
  if (!pendulum_shaped(cfg)) {
    throw ConfigError("/model: simulate needs the 3-state, 1-input pendulum model");
  }
  const bool warm = cfg.warmstart || opts.warmstart;
  const Prepared prep = prepare(cfg, warm);
  const pendulum::Trajectory traj =
      pendulum::closed_loop(prep.problem, prep.offline, warm ? &prep.gain : nullptr,
                            cfg.sim, cfg.x0, cfg.reference, warm);

  const std::string path = output_path(opts, cfg.trajectory_out);
  if (path.empty()) {
    write_trajectory_csv(out, traj, cfg.sim);
  } else {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ConfigError(path + ": cannot open for writing");
    write_trajectory_csv(f, traj, cfg.sim);
    spdlog::info("wrote {} rows to {}", traj.inputs.size(), path);
  }
  spdlog::info("simulate: warmstart={} total iterations={}", warm,
               traj.total_iterations());

  if (traj.abort_reason) {
    spdlog::error("simulation aborted: {}", *traj.abort_reason);
    return kExitBreakdown;
  }
  const bool all_converged =
      std::all_of(traj.residuals.begin(), traj.residuals.end(),
                  [&](double r) { return r <= cfg.mpc.epsilon; });
  if (!all_converged) spdlog::warn("some steps stopped at max_iter");
  return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_compare(const RunConfig& cfg, const Options& opts, std::ostream& out) {
  const int trials = opts.trials ? *opts.trials : cfg.trials;
  if (trials < 0) throw ConfigError("--trials: must be >= 0");
  const std::uint64_t seed = opts.seed ? *opts.seed : cfg.seed;
  const Prepared prep = prepare(cfg, false);
  const ValidatedProblem& problem = prep.problem;
  const SystemModel& model = problem.model();
  const int n = problem.n();
  const int m = problem.m();
  const int N = problem.horizon();
  const double big = cfg.mpc.big_bound;
  constexpr double kTolerance = 1e-8;

  std::mt19937_64 rng(seed);
  double max_dev = 0.0;
  double max_drift = 0.0;
  double max_kkt = 0.0;
  Json per_trial = Json::array();
  for (int t = 0; t < trials; ++t) {
    const VectorXd x = sample_box(model.x_lb, model.x_ub, big, rng);
    VectorXd r(n + m);
    r << sample_box(model.x_lb, model.x_ub, big, rng),
        sample_box(model.u_lb, model.u_ub, big, rng);

    const oracle::DenseExtendedProblem dense = oracle::assemble_dense(problem, x, r);
    // Interleaved: each dense step restarts from the current sparse iterate.
    // The free-running dense replay is reported as drift.
    SolverState s = cold_start(n, m, N);
    oracle::DenseIterate free = oracle::to_dense(s, n);
    double dev = 0.0;
    double drift = 0.0;
    for (int k = 0; k < cfg.compare_iterations; ++k) {
      const oracle::DenseIterate before = oracle::to_dense(s, n);
      eadmm_iteration(s, prep.offline, x, r);
      const oracle::DenseIterate after = oracle::to_dense(s, n);
      dev = std::max(dev, oracle::max_abs_deviation(
                              after, oracle::dense_eadmm_step(dense, before)));
      free = oracle::dense_eadmm_step(dense, free);
      drift = std::max(drift, oracle::max_abs_deviation(after, free));
    }

    const SolveResult res = eadmm_solve(prep.offline, {cfg.mpc.epsilon, cfg.mpc.max_iter},
                                        x, r, std::move(s));
    const oracle::DenseIterate fin = oracle::to_dense(res.state, n);
    const double kkt = oracle::kkt_residual(dense, fin.z1, fin.z2, fin.z3, fin.lambda);
    spdlog::debug("trial {}: deviation {:.3e}, kkt {:.3e}, converged {}", t, dev, kkt,
                  res.converged);

    max_dev = std::max(max_dev, dev);
    max_drift = std::max(max_drift, drift);
    max_kkt = std::max(max_kkt, kkt);
    per_trial.push_back({{"trial", t},
                         {"max_deviation", dev},
                         {"free_running_drift", drift},
                         {"kkt_residual", kkt},
                         {"converged", res.converged},
                         {"iterations", res.iterations}});
  }

  Json report;
  report["trials"] = trials;
  report["iterations"] = cfg.compare_iterations;
  report["seed"] = seed;
  report["max_deviation"] = max_dev;
  report["max_free_running_drift"] = max_drift;
  report["max_kkt_residual"] = max_kkt;
  report["tolerance"] = kTolerance;
  report["per_trial"] = std::move(per_trial);
  const std::string text = report.dump(2) + "\n";
  out << text;
  if (opts.out) write_text(*opts.out, text);
  if (max_dev > kTolerance) {
    spdlog::error("sparse and dense iterates differ by {:.3e}", max_dev);
    return kExitMismatch;
  }
  return kExitOk;
}

int cmd_bench(const RunConfig& cfg, const Options& opts, std::ostream& out) {
  const std::vector<int> horizons = opts.horizons ? *opts.horizons : cfg.horizons;
  if (cfg.rho.kind == RhoSpec::Kind::kExplicit) {
    throw ConfigError("/rho: bench rebuilds the penalty per horizon; explicit arrays "
                      "are tied to one horizon");
  }
  const VectorXd x = controller_state(cfg, cfg.x0);
  const VectorXd r = controller_reference(cfg, cfg.reference);

  std::string csv = "horizon,scalar_count,iterations,median_us,worst_us\n";
  for (int N : horizons) {
    if (N < 2) throw ConfigError(fmt::format("--horizons: {} is below 2", N));
    RunConfig c = cfg;
    c.mpc.N = N;
    const ValidatedProblem problem = make_problem(c);
    const OfflineData offline = build_offline(problem);
    const WarmstartGain gain = compute_warmstart_gain(problem);

    std::vector<double> times;
    int iterations = -1;
    for (int rep = 0; rep < cfg.bench_repeats; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const SolveResult res = eadmm_solve(offline, {c.mpc.epsilon, c.mpc.max_iter}, x, r,
                                          cold_start(problem.n(), problem.m(), N));
      const auto t1 = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
      if (iterations >= 0 && res.iterations != iterations) {
        spdlog::warn("N={}: iteration count changed between repeats", N);
      }
      iterations = res.iterations;
    }
    std::sort(times.begin(), times.end());
    const std::size_t k = times.size();
    const double median =
        k % 2 == 1 ? times[k / 2] : 0.5 * (times[k / 2 - 1] + times[k / 2]);
    csv += fmt::format("{},{},{},{:.3f},{:.3f}\n", N, artifact_scalar_count(offline, gain),
                       iterations, median, times.back());
  }

  const std::string path = output_path(opts, cfg.bench_out);
  if (path.empty()) {
    out << csv;
  } else {
    write_text(path, csv);
    spdlog::info("wrote {}", path);
  }
  return kExitOk;
}

int run_command(const Options& opts, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(opts.config_path);
    if (opts.command == "precompute") return cmd_precompute(cfg, opts, out);
    if (opts.command == "solve") return cmd_solve(cfg, opts, out);
    if (opts.command == "simulate") return cmd_simulate(cfg, opts, out);
    if (opts.command == "compare") return cmd_compare(cfg, opts, out);
    if (opts.command == "bench") return cmd_bench(cfg, opts, out);
    err << "error: unknown command '" << opts.command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ArtifactError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const MpctError& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    if (e.code() == ErrorCode::kNumericalBreakdown ||
        e.code() == ErrorCode::kSingularConfiguration) {
      return kExitBreakdown;
    }
    return kExitConfig;
  }
}

}  // namespace mpct::cli
