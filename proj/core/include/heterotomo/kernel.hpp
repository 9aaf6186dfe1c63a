#pragma once

#include "heterotomo/geometry.hpp"

namespace heterotomo {

inline constexpr int kDefaultAngularNodes = 256;

/// K(z1, z2) = exp(-gamma |z1 - z2|^2) on the unit disk, together with the
/// closed forms it induces on sinogram space.
class GaussianKernel {
 public:
  /// Throws ParameterError unless gamma > 0.
  explicit GaussianKernel(double gamma);

  double gamma() const noexcept { return gamma_; }

  double operator()(const Point2& z1, const Point2& z2) const;

  /// Gauss-Legendre node count that resolves a kernel generator along a
  /// chord: max(32, ceil(6 sqrt(gamma))).
  int quadrature_nodes() const noexcept;

 private:
  double gamma_;
};

inline double kernel_eval(const GaussianKernel& k, const Point2& z1, const Point2& z2) {
  return k(z1, z2);
}

/// erf(b) - erf(a) for a <= b, evaluated through erfc on the tails so that
/// both-sided saturation does not cancel.
double gauss_interval(double a, double b);

/// Feature map of a projection index evaluated at z, i.e. the X-ray
/// transform of the generator k_z along the chord, in closed form:
///   exp(-gamma (x-u)^2) sqrt(pi/gamma)/2 [erf(sqrt(gamma)(L-v)) + erf(sqrt(gamma)(L+v))]
/// where (u, v) = E(phi) z and L is the chord half length.
double feature_eval(const GaussianKernel& k, const ProjectionIndex& p, const Point2& z);

/// Inner product of two feature maps: the double line integral of the kernel
/// over both chords. The integral along the first chord is done in closed
/// form with erf; the remaining one-dimensional integral along the second
/// chord uses composite Gauss-Legendre on panels split at the points where the
/// integrand changes shape. Symmetric in its arguments bit for bit.
double induced_kernel(const GaussianKernel& k, const ProjectionIndex& p1,
                      const ProjectionIndex& p2);

/// Orientation-averaged feature map at detector offset x, evaluated at z
/// (periodic trapezoid rule in the rotation angle). Depends only on |x| and |z|.
/// Throws ParameterError when angular_nodes < 4.
double averaged_feature_eval(const GaussianKernel& k, double x, const Point2& z,
                             int angular_nodes = kDefaultAngularNodes);

/// Inner product of two orientation-averaged feature maps,
///   (1/2pi) \int induced_kernel((theta, x1), (0, x2)) dtheta.
double averaged_pair_inner(const GaussianKernel& k, double x1, double x2,
                           int angular_nodes = kDefaultAngularNodes);

}  // namespace heterotomo
