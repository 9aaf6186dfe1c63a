#include "heterotomo/geometry.hpp"

#include <cmath>
#include <numbers>

#include "heterotomo/errors.hpp"

namespace heterotomo {

double canonical_tilt(double phi, bool* flipped) {
  constexpr double pi = std::numbers::pi;
  double turns = std::floor(phi / pi);
  double reduced = phi - turns * pi;
  if (reduced >= pi) {  // rounding at the upper edge
    reduced -= pi;
    turns += 1.0;
  }
  if (reduced < 0.0) reduced = 0.0;
  if (flipped) *flipped = std::fmod(std::abs(turns), 2.0) == 1.0;
  return reduced;
}

Point2 rotation_apply(double phi, const Point2& z) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return {c * z.x() - s * z.y(), s * z.x() + c * z.y()};
}

Chord::Chord(double phi, double x) : phi_(phi), x_(x) {
  if (!(std::abs(x) <= 1.0 + kDiskSlack)) {
    throw DomainError("Chord: detector offset outside [-1, 1]");
  }
  if (std::abs(x) >= 1.0) {
    x_ = x > 0 ? 1.0 : -1.0;
    half_length_ = 0.0;
  } else {
    half_length_ = std::sqrt((1.0 - x) * (1.0 + x));
  }
}

Chord Chord::canonical() const {
  bool flipped = false;
  const double phi = canonical_tilt(phi_, &flipped);
  return Chord(phi, flipped ? -x_ : x_);
}

Point2 Chord::point(double t) const {
  if (std::abs(t) > half_length_ * (1.0 + 1e-15) + 1e-15) {
    throw DomainError("chord_point: parameter outside the chord");
  }
  // E(phi)^{-1} (x, t)
  return rotation_apply(-phi_, Point2(x_, t));
}

}  // namespace heterotomo
