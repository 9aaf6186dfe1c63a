#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "heterotomo/config.hpp"
#include "heterotomo/gram.hpp"
#include "heterotomo/solve.hpp"
#include "heterotomo/spectral.hpp"

namespace heterotomo {

/// Cell centers -1 + (a + 1/2) 2/T of a T x T grid over [-1, 1]^2 that lie in
/// the closed unit disk. Cell (a, b) has z = (center(b), center(a)) and flat
/// index a T + b.
struct DiskGrid {
  int resolution = 0;
  std::vector<Point2> points;
  std::vector<int> cells;
};

DiskGrid make_disk_grid(int resolution);

/// CSV over all T^2 cells with columns z1, z2 and the named values; cells
/// outside the disk get empty values.
std::string grid_csv(const DiskGrid& grid, const std::vector<std::string>& names,
                     const std::vector<Eigen::VectorXd>& columns);

/// Reads one named column of a grid CSV back onto the unmasked points.
Eigen::VectorXd read_grid_column(const std::filesystem::path& path, const DiskGrid& grid, const std::string& name);

double rms(const Eigen::VectorXd& v);
double rmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);
/// Pearson correlation over grid points.
double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct TruthGrids {
  Eigen::VectorXd mean;
  Eigen::VectorXd cov_diag;
  Eigen::VectorXd secmom_diag;
};

TruthGrids truth_on_grid(const PhantomModel& model, const DiskGrid& grid);

/// Leading principal component of the true covariance, evaluated on the grid
/// (eigenfunction of largest eigenvalue under the grid L2 inner product).
Eigen::VectorXd true_leading_component(const PhantomModel& model, const DiskGrid& grid);

struct EstimateResult {
  BlockedGramMatrix gram;
  MeanCoefficients mean;
  std::optional<CovarianceCoefficients> cov;
  DiskGrid grid;
  Eigen::MatrixXd frame;
  Eigen::VectorXd mean_grid;
  /// Empty when covariance was not requested.
  Eigen::VectorXd secmom_diag;
  Eigen::VectorXd cov_diag;
  double gram_seconds = 0.0;
  double mean_seconds = 0.0;
  double cov_seconds = 0.0;
  double eval_seconds = 0.0;
};

/// gram, mean solve, covariance solve (when configured), grid evaluation.
/// A precomputed Gram for the same dataset and gamma may be supplied.
/// Throws DesignError for covariance with fewer than two tilts per field.
EstimateResult run_estimate(const RunConfig& config, const Dataset& data,
                            const BlockedGramMatrix* gram = nullptr, bool throw_on_cg_failure = false);

struct InvariantMeanResult {
  MeanCoefficients mean;
  Eigen::VectorXd radii;
  Eigen::VectorXd profile;
  DiskGrid grid;
  Eigen::VectorXd mean_grid;
  /// max over radii of the spread across probe angles, relative to max |profile|.
  double angular_variation = 0.0;
};

InvariantMeanResult run_invariant_mean(const RunConfig& config, const Dataset& data);

/// CLI commands. Each writes its files plus run_manifest.json into `out`.
void cmd_simulate(const RunConfig& config, const std::filesystem::path& out);
void cmd_estimate(const RunConfig& config, const std::filesystem::path& dataset_dir,
                  const std::filesystem::path& out, bool trace = false);
void cmd_pca(const RunConfig& config, const std::filesystem::path& estimate_dir, const std::filesystem::path& out);
void cmd_invariant_mean(const RunConfig& config, const std::filesystem::path& dataset_dir,
                        const std::filesystem::path& out);
/// Aggregates metrics.json of each run directory into out/report.json and
/// returns its text. Missing metrics become null and add a warning.
std::string cmd_report(const std::vector<std::filesystem::path>& run_dirs, const std::filesystem::path& out,
                       std::vector<std::string>* warnings = nullptr);

/// Writes run_manifest.json listing every other file in `dir` with its size
/// and FNV-1a digest. `config` may be null (report).
void write_run_manifest(const std::filesystem::path& dir, const std::string& command, const RunConfig* config);

}  // namespace heterotomo
