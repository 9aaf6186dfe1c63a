#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "heterotomo/kernel.hpp"
#include "heterotomo/observe.hpp"

namespace heterotomo {

/// Block boundaries of a per-field partition: block i spans
/// [offsets[i], offsets[i+1]).
struct BlockLayout {
  std::vector<int> offsets;

  int blocks() const noexcept { return static_cast<int>(offsets.size()) - 1; }
  int side() const noexcept { return offsets.empty() ? 0 : offsets.back(); }
  int offset(int i) const { return offsets[static_cast<std::size_t>(i)]; }
  int size(int i) const { return offsets[static_cast<std::size_t>(i) + 1] - offsets[static_cast<std::size_t>(i)]; }
  bool operator==(const BlockLayout&) const = default;
};

BlockLayout layout_of(const Dataset& data);

/// Dense symmetric Gram matrix with per-field block addressing.
class BlockedGramMatrix {
 public:
  BlockedGramMatrix() = default;
  /// Throws ParameterError when the matrix is not square of side layout.side().
  BlockedGramMatrix(BlockLayout layout, Eigen::MatrixXd entries);

  const BlockLayout& layout() const noexcept { return layout_; }
  int side() const noexcept { return layout_.side(); }
  const Eigen::MatrixXd& matrix() const noexcept { return entries_; }

  auto block(int i1, int i2) const {
    return entries_.block(layout_.offset(i1), layout_.offset(i2), layout_.size(i1), layout_.size(i2));
  }
  double operator()(int a, int b) const { return entries_(a, b); }

 private:
  BlockLayout layout_;
  Eigen::MatrixXd entries_;
};

/// Block-diagonal matrix; the off-diagonal blocks are implicitly zero.
class BlockDiagonal {
 public:
  BlockDiagonal() = default;
  /// All-zero blocks sized by the layout.
  explicit BlockDiagonal(const BlockLayout& layout);

  const BlockLayout& layout() const noexcept { return layout_; }
  int blocks() const noexcept { return layout_.blocks(); }
  Eigen::MatrixXd& block(int i) { return blocks_[static_cast<std::size_t>(i)]; }
  const Eigen::MatrixXd& block(int i) const { return blocks_[static_cast<std::size_t>(i)]; }

  /// Frobenius inner product and norm.
  double dot(const BlockDiagonal& other) const;
  double norm() const { return std::sqrt(dot(*this)); }
  double trace() const;
  double max_abs() const;

  /// this += scale * other
  void axpy(double scale, const BlockDiagonal& other);
  void scale(double factor);

  Eigen::MatrixXd dense() const;

 private:
  BlockLayout layout_;
  std::vector<Eigen::MatrixXd> blocks_;
};

/// Phi[a, b] = induced_kernel(index a, index b) over all observations.
/// Computes the upper triangle in parallel and mirrors it.
BlockedGramMatrix assemble_gram(const Dataset& data, const GaussianKernel& kernel);

/// 1 / sqrt(r_i s_ij) per observation; D Phi D is the sample-size adjusted Gram.
Eigen::VectorXd scaling_vector(const Dataset& data);

/// w in canonical flat order.
Eigen::VectorXd observation_vector(const Dataset& data);

/// Block i is w_i w_i^T for the i-th segment w_i of w.
BlockDiagonal block_outer_observations(const Eigen::VectorXd& w, const Dataset& data);

/// F[t, a] = feature_eval(index a, grid[t]).
Eigen::MatrixXd frame_matrix(const GaussianKernel& kernel, const Dataset& data,
                             const std::vector<Point2>& grid);

/// Gram of the orientation-averaged feature maps; uses only detector locations.
BlockedGramMatrix assemble_invariant_gram(const Dataset& data, const GaussianKernel& kernel,
                                          int angular_nodes = kDefaultAngularNodes);

/// Binary cache: gram.bin (little-endian float64, row-major upper and lower)
/// and gram.json {side, block_sizes, kernel_gamma, dataset_digest}.
void write_gram(const std::filesystem::path& dir, const BlockedGramMatrix& gram, double gamma,
                const std::string& dataset_digest);
/// Returns false when the cache is absent or does not match gamma/digest.
bool read_gram(const std::filesystem::path& dir, double gamma, const std::string& dataset_digest,
               BlockedGramMatrix& out);

}  // namespace heterotomo
