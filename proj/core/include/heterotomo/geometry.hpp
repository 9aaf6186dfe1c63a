#pragma once

#include <cmath>

#include <Eigen/Core>

#include "heterotomo/quadrature.hpp"

namespace heterotomo {

/// A point of the closed unit disk.
using Point2 = Eigen::Vector2d;

/// Points may exceed the unit circle by this much before they are rejected.
inline constexpr double kDiskSlack = 1e-12;

/// Reduces an arbitrary angle to [0, pi). `flipped` reports whether an odd
/// multiple of pi was removed; the matching detector offset must then change
/// sign to describe the same line.
double canonical_tilt(double phi, bool* flipped = nullptr);

/// Returns E(phi) z with E(phi) = [[cos, -sin], [sin, cos]].
Point2 rotation_apply(double phi, const Point2& z);

/// The line {E(phi)^{-1} (x, t) : |t| <= L} through the unit disk, with
/// L = sqrt(1 - x^2). Rotation angle and detector offset together form the
/// projection index of one sinogram sample.
class Chord {
 public:
  /// Throws DomainError when |x| > 1 (beyond rounding slack).
  Chord(double phi, double x);

  double phi() const noexcept { return phi_; }
  double x() const noexcept { return x_; }
  double half_length() const noexcept { return half_length_; }

  /// Same line with phi in [0, pi).
  Chord canonical() const;

  /// Point at parameter t; throws DomainError when |t| > half_length().
  Point2 point(double t) const;

 private:
  double phi_;
  double x_;
  double half_length_;
};

/// Projection indices of the sinogram are chords.
using ProjectionIndex = Chord;

inline Point2 chord_point(const Chord& c, double t) { return c.point(t); }

/// Gauss-Legendre approximation of the line integral of f along the chord.
/// Degenerate chords (|x| = 1) integrate to exactly zero.
template <class F>
double xray_numeric(F&& f, const Chord& c, int nodes) {
  const double half = c.half_length();
  if (half == 0.0) {
    (void)gauss_legendre(nodes);  // still validates the node count
    return 0.0;
  }
  const double cs = std::cos(c.phi());
  const double sn = std::sin(c.phi());
  const double x = c.x();
  // E(phi)^{-1} (x, t) = (cos*x + sin*t, -sin*x + cos*t)
  return integrate_gauss_legendre(
      [&](double t) { return f(Point2(cs * x + sn * t, -sn * x + cs * t)); }, -half, half,
      nodes);
}

}  // namespace heterotomo
