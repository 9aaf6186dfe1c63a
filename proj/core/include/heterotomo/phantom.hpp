#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "heterotomo/geometry.hpp"

namespace heterotomo {

/// Compactly supported bump profile
///   Psi(r) = tanh(5(1-r))^2 / (tanh(5(1-r))^2 + tanh(5r)^2),  r <= 1,
/// and 0 for r > 1. Psi(r) + Psi(1-r) = 1 on [0, 1].
double bump_profile(double r);

/// One ellipsoidal bump: Psi((z - center)^T dispersion^{-1} (z - center)).
struct BumpSpec {
  Point2 center;
  Eigen::Matrix2d dispersion;
};

/// Random field Y(z) = sum_q xi_q Psi_q(z) with xi ~ N(mean, cov).
/// Immutable after construction; all evaluations are pure.
class PhantomModel {
 public:
  /// Validates every invariant: symmetric positive-definite dispersions, each
  /// ellipse inside the unit disk (checked on 360 boundary samples), matching
  /// sizes, symmetric positive-semidefinite cov. Throws ParameterError.
  PhantomModel(std::vector<BumpSpec> bumps, Eigen::VectorXd mean, Eigen::MatrixXd cov);

  /// Six bumps on a radius-0.55 ring with a dominant rank-one covariance mode.
  static PhantomModel default_model();

  int size() const noexcept { return static_cast<int>(bumps_.size()); }
  const std::vector<BumpSpec>& bumps() const noexcept { return bumps_; }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& cov() const noexcept { return cov_; }
  /// Symmetric square root of cov (negative rounding eigenvalues clamped).
  const Eigen::MatrixXd& cov_sqrt() const noexcept { return cov_sqrt_; }

  double bump_value(int q, const Point2& z) const;
  Eigen::VectorXd bump_values(const Point2& z) const;

  /// Line integral of bump q along the chord: Gauss-Legendre over the exact
  /// intersection of the chord with the bump ellipse.
  double bump_projection(int q, const Chord& c, int nodes = 64) const;
  Eigen::VectorXd bump_projections(const Chord& c, int nodes = 64) const;

  /// FNV-1a digest of the canonical text form of the model.
  std::string digest() const;

 private:
  std::vector<BumpSpec> bumps_;
  std::vector<Eigen::Matrix2d> inverse_dispersions_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd cov_sqrt_;
};

/// Realized intensities of one field.
struct FieldSample {
  Eigen::VectorXd xi;
};

double field_eval(const PhantomModel& model, const FieldSample& sample, const Point2& z);

/// xi = mean + cov^{1/2} g, g standard normal from the stream (seed, index).
FieldSample sample_field(const PhantomModel& model, std::uint64_t seed, std::uint64_t index = 0);

/// Exact line integral of a sampled field along a chord.
double field_projection(const PhantomModel& model, const FieldSample& sample, const Chord& c,
                        int nodes = 64);

double true_mean_eval(const PhantomModel& model, const Point2& z);
double true_cov_eval(const PhantomModel& model, const Point2& z1, const Point2& z2);
double true_secmom_eval(const PhantomModel& model, const Point2& z1, const Point2& z2);

}  // namespace heterotomo
