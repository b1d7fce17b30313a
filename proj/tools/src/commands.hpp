#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace mpct::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitBreakdown = 2,
  kExitNotConverged = 3,
  kExitMismatch = 4,  // compare: sparse and dense iterates disagree
};

struct Options {
  std::string command;
  std::string config_path;
  std::optional<std::string> out;
  bool warmstart = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> x;
  std::optional<std::vector<double>> r;
  std::optional<std::vector<int>> horizons;
  std::optional<int> trials;
};

/// Runs one command; never throws. Reports go to `out`, diagnostics to `err`.
int run_command(const Options& opts, std::ostream& out, std::ostream& err);

int cmd_precompute(const RunConfig& cfg, const Options& opts, std::ostream& out);
int cmd_solve(const RunConfig& cfg, const Options& opts, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, const Options& opts, std::ostream& out);
int cmd_compare(const RunConfig& cfg, const Options& opts, std::ostream& out);
int cmd_bench(const RunConfig& cfg, const Options& opts, std::ostream& out);

/// Header of the simulate CSV for an n-state, m-input problem.
std::string trajectory_csv_header(int n, int m);
void write_trajectory_csv(std::ostream& os, const pendulum::Trajectory& traj,
                          const pendulum::SimConfig& sim);

/// Controller-coordinate state and reference for the pendulum-shaped
/// problem (theta_dot and the input divided by the scale); other shapes are
/// passed through unchanged.
VectorXd controller_state(const RunConfig& cfg, const VectorXd& physical);
VectorXd controller_reference(const RunConfig& cfg, const VectorXd& physical);

}  // namespace mpct::cli
