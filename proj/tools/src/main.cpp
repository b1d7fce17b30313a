#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("mpct");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("MPCT_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    spdlog::set_level(spdlog::level::err);
    if (level != "error") spdlog::error("MPCT_LOG={} not recognised, using error", level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Sparse extended-ADMM solver for MPC for tracking"};
  mpct::cli::Options opts;
  app.add_option("command", opts.command, "precompute | solve | simulate | compare | bench")
      ->required()
      ->check(CLI::IsMember({"precompute", "solve", "simulate", "compare", "bench"}));
  app.add_option("--config", opts.config_path, "JSON run configuration")->required();

  std::string out;
  std::uint64_t seed = 0;
  std::vector<double> x, r;
  std::vector<int> horizons;
  int trials = 0;
  auto* o_out = app.add_option("--out", out, "output path");
  app.add_flag("--warmstart", opts.warmstart, "warmstart the closed loop");
  auto* o_seed = app.add_option("--seed", seed, "seed for random trials");
  auto* o_x = app.add_option("--x", x, "state, comma separated")->delimiter(',');
  auto* o_r = app.add_option("--r", r, "reference (x, u), comma separated")->delimiter(',');
  auto* o_h = app.add_option("--horizons", horizons, "horizons, comma separated")
                  ->delimiter(',');
  auto* o_t = app.add_option("--trials", trials, "number of random trials")
                  ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mpct::cli::kExitConfig;
  }
  if (*o_out) opts.out = out;
  if (*o_seed) opts.seed = seed;
  if (*o_x) opts.x = x;
  if (*o_r) opts.r = r;
  if (*o_h) opts.horizons = horizons;
  if (*o_t) opts.trials = trials;

  return mpct::cli::run_command(opts, std::cout, std::cerr);
}
