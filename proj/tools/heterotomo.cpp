// Command line front end: simulate | estimate | pca | invariant-mean | report.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heterotomo/config.hpp"
#include "heterotomo/errors.hpp"
#include "heterotomo/pipeline.hpp"

namespace fs = std::filesystem;
using namespace heterotomo;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  bool trace = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Configuration file (key-value or JSON)");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--seed", c.seed, "Override design.seed");
  cmd->add_flag("--trace", c.trace, "Write solver telemetry (cg_trace.csv)");
}

// Explicit --config wins; otherwise a config.json stored next to the inputs.
RunConfig resolve_config(const Common& c, const fs::path& fallback_dir = {}) {
  RunConfig cfg;
  if (!c.config.empty()) cfg = load_config(c.config);
  else if (!fallback_dir.empty() && fs::exists(fallback_dir / "config.json")) cfg = load_config(fallback_dir / "config.json");
  if (c.seed) cfg.design.seed = *c.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean and covariance estimation of random fields from sparse tomographic projections"};
  app.require_subcommand(1);

  Common sim, est, pca, inv, rep;
  std::string data_dir, estimate_dir, inv_data_dir;
  std::vector<std::string> run_dirs;

  auto* c_sim = app.add_subcommand("simulate", "Draw random phantoms and their noisy projections");
  add_common(c_sim, sim);
  auto* c_est = app.add_subcommand("estimate", "Mean and second-moment estimation from a dataset");
  add_common(c_est, est);
  c_est->add_option("--data", data_dir, "Dataset directory written by simulate")->required();
  auto* c_pca = app.add_subcommand("pca", "Principal components of an estimated covariance");
  add_common(c_pca, pca);
  c_pca->add_option("--estimate", estimate_dir, "Directory written by estimate")->required();
  auto* c_inv = app.add_subcommand("invariant-mean", "Rotation-invariant mean from a dataset");
  add_common(c_inv, inv);
  c_inv->add_option("--data", inv_data_dir, "Dataset directory written by simulate")->required();
  auto* c_rep = app.add_subcommand("report", "Aggregate metrics across runs");
  add_common(c_rep, rep);
  c_rep->add_option("runs", run_dirs, "Run directories")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_sim) {
      cmd_simulate(resolve_config(sim), sim.out);
    } else if (*c_est) {
      cmd_estimate(resolve_config(est, data_dir), data_dir, est.out, est.trace);
    } else if (*c_pca) {
      cmd_pca(resolve_config(pca, estimate_dir), estimate_dir, pca.out);
    } else if (*c_inv) {
      cmd_invariant_mean(resolve_config(inv, inv_data_dir), inv_data_dir, inv.out);
    } else if (*c_rep) {
      std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
      std::cout << cmd_report(dirs, rep.out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
