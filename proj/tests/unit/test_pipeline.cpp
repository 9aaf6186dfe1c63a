#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "heterotomo/errors.hpp"
#include "heterotomo/io.hpp"
#include "heterotomo/pipeline.hpp"

using namespace heterotomo;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_config() {
  RunConfig c;
  c.design.n = 6;
  c.design.r = 3;
  c.design.s = 4;
  c.design.seed = 11;
  c.grid.resolution = 12;
  c.grid.cov_resolution = 6;
  c.solver.k_components = 3;
  c.invariant.angular_nodes = 64;
  c.invariant.radial_points = 8;
  return c;
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(read_text(p)); }

}  // namespace

TEST(DiskGrid, LayoutAndCsv) {
  const DiskGrid g = make_disk_grid(4);
  EXPECT_EQ(g.points.size(), 12u);
  EXPECT_EQ(g.cells.front(), 1);
  EXPECT_DOUBLE_EQ(g.points.front().x(), -0.25);
  EXPECT_DOUBLE_EQ(g.points.front().y(), -0.75);
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(12, 0, 11);
  const auto dir = fixture::scratch("grid");
  write_text(dir / "g.csv", grid_csv(g, {"v"}, {v}));
  EXPECT_EQ(read_grid_column(dir / "g.csv", g, "v"), v);
  fs::remove_all(dir);
  EXPECT_THROW(make_disk_grid(1), ParameterError);
}

TEST(Metrics, Basics) {
  const Eigen::Vector3d a(1, 2, 3), b(2, 4, 6);
  EXPECT_DOUBLE_EQ(rmse(a, a), 0.0);
  EXPECT_DOUBLE_EQ(rms(Eigen::Vector2d(3, 4)), std::sqrt(12.5));
  EXPECT_NEAR(correlation(a, b), 1.0, 1e-15);
  EXPECT_NEAR(correlation(a, -b), -1.0, 1e-15);
}

TEST(Pipeline, EndToEnd) {
  const RunConfig cfg = tiny_config();
  const auto root = fixture::scratch("pipeline");
  cmd_simulate(cfg, root / "sim");
  for (const char* f : {"observations.csv", "dataset.json", "truth_mean.csv", "run_manifest.json"})
    EXPECT_TRUE(fs::exists(root / "sim" / f)) << f;

  cmd_simulate(cfg, root / "sim2");
  EXPECT_EQ(read_text(root / "sim" / "observations.csv"), read_text(root / "sim2" / "observations.csv"));

  cmd_estimate(cfg, root / "sim", root / "est", true);
  for (const char* f : {"alpha.csv", "mean_grid.csv", "secmom_diag.csv", "cov_grid.csv", "ahat.bin", "metrics.json",
                        "cg_trace.csv"})
    EXPECT_TRUE(fs::exists(root / "est" / f)) << f;
  const nlohmann::json metrics = load_json(root / "est" / "metrics.json");
  EXPECT_TRUE(metrics["rmse_mean"].is_number());
  EXPECT_TRUE(metrics["rmse_cov_diag"].is_number());
  EXPECT_DOUBLE_EQ(metrics["effective_tilt"]["r_bar"].get<double>(), 3.0);

  // the written mean grid equals the in-process estimate
  const Dataset data = read_dataset(root / "sim");
  const EstimateResult est = run_estimate(cfg, data);
  const Eigen::VectorXd written = read_grid_column(root / "est" / "mean_grid.csv", est.grid, "mean");
  EXPECT_LT((written - est.mean_grid).cwiseAbs().maxCoeff(), 1e-14);

  cmd_estimate(cfg, root / "sim", root / "est2");
  EXPECT_EQ(read_text(root / "est" / "mean_grid.csv"), read_text(root / "est2" / "mean_grid.csv"));

  cmd_pca(cfg, root / "est", root / "pca");
  const nlohmann::json pca = load_json(root / "pca" / "pca.json");
  EXPECT_TRUE(pca.contains("negative_count"));
  EXPECT_TRUE(fs::exists(root / "pca" / "scree.csv"));

  cmd_invariant_mean(cfg, root / "sim", root / "inv");
  EXPECT_TRUE(fs::exists(root / "inv" / "radial_profile.csv"));

  std::vector<std::string> warnings;
  cmd_report({root / "est", root / "pca"}, root / "report", &warnings);
  const nlohmann::json report = load_json(root / "report" / "report.json");
  EXPECT_EQ(report["runs"].size(), 2u);
  EXPECT_FALSE(warnings.empty());

  const nlohmann::json manifest = load_json(root / "est" / "run_manifest.json");
  EXPECT_EQ(manifest["command"], "estimate");
  fs::remove_all(root);
}

TEST(Pipeline, Refusals) {
  const auto root = fixture::scratch("refuse");
  fs::create_directories(root / "empty");
  EXPECT_ANY_THROW(cmd_estimate(tiny_config(), root / "empty", root / "out"));
  EXPECT_ANY_THROW(cmd_pca(tiny_config(), root / "empty", root / "out"));

  RunConfig single = tiny_config();
  single.design.r = 1;
  const Dataset data = generate_dataset(single.phantom.build(), single.design, 1);
  EXPECT_THROW(run_estimate(single, data), DesignError);
  single.solver.covariance = false;
  EXPECT_NO_THROW(run_estimate(single, data));
  fs::remove_all(root);
}

TEST(InvariantMean, AngleIndependentAndZeroData) {
  RunConfig cfg = tiny_config();
  cfg.invariant.angular_nodes = 256;
  const Dataset data = generate_dataset(cfg.phantom.build(), cfg.design, 4);
  std::vector<double> shuffled(data.angles().rbegin(), data.angles().rend());
  const InvariantMeanResult a = run_invariant_mean(cfg, data);
  const InvariantMeanResult b = run_invariant_mean(cfg, data.with_angles(shuffled));
  EXPECT_EQ(a.profile, b.profile);
  EXPECT_LT(a.angular_variation, 1e-6);

  const Dataset zeros(data.design(), std::vector<int>(6, 3), std::vector<int>(18, 4), data.angles(), data.locations(),
                      std::vector<double>(static_cast<std::size_t>(data.side()), 0.0));
  EXPECT_EQ(run_invariant_mean(cfg, zeros).profile.cwiseAbs().maxCoeff(), 0.0);
}
