#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heterotomo/observe.hpp"
#include "heterotomo/phantom.hpp"
#include "heterotomo/spectral.hpp"

namespace heterotomo {

struct PhantomConfig {
  /// "default" or "custom" (bumps/mean/cov given explicitly).
  std::string preset = "default";
  std::vector<BumpSpec> bumps;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  PhantomModel build() const;
};

struct KernelConfig {
  double gamma = 256.0;
};

struct SolverConfig {
  double nu = 1.0 / 256.0;
  double eta = 1.0 / 256.0;
  double tol = 1e-8;
  int max_iter = 2000;
  EigMethod eig_method = EigMethod::two_step;
  int k_components = 20;
  bool precond = false;
  /// Run the second-moment solve in `estimate`.
  bool covariance = true;
};

struct GridConfig {
  /// Cells per axis of the [-1, 1]^2 grid for mean and diagonal outputs.
  int resolution = 64;
  /// Cells per axis for the full covariance matrix output.
  int cov_resolution = 16;
};

struct InvariantConfig {
  int angular_nodes = 256;
  int radial_points = 64;
};

struct OutputConfig {
  /// Store the Gram matrix as gram.bin/gram.json next to the estimate.
  bool write_gram = false;
};

struct RunConfig {
  PhantomConfig phantom;
  DesignConfig design;
  KernelConfig kernel;
  SolverConfig solver;
  GridConfig grid;
  InvariantConfig invariant;
  OutputConfig output;
};

/// Parses either encoding of the schema. Key-value text:
///   [design]
///   n = 100
///   r = 5            # values are JSON literals; bare words are strings
/// JSON: {"design": {"n": 100, "r": 5}}. Missing keys keep their defaults.
/// Unknown sections or keys and invalid values throw ConfigError with the
/// key path ("design.sigma").
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON encoding of a configuration.
std::string config_to_json(const RunConfig& config);

}  // namespace heterotomo
