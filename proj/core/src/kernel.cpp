#include "heterotomo/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "heterotomo/errors.hpp"

namespace heterotomo {
namespace {

// Beyond kCut / sqrt(gamma) both the Gaussian factor and the erf window are
// below exp(-42) ~ 6e-19 of their peak.
constexpr double kCut = 6.5;
// Panel width in units of the integrand's length scale 1 / (sqrt(gamma) * m),
// m = max(|sin|, |cos|) of the relative tilt.
constexpr double kPanelWidth = 2.0;
constexpr int kPanelNodes = 12;

}  // namespace

GaussianKernel::GaussianKernel(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("GaussianKernel: gamma must be positive");
  }
}

double GaussianKernel::operator()(const Point2& z1, const Point2& z2) const {
  return std::exp(-gamma_ * (z1 - z2).squaredNorm());
}

int GaussianKernel::quadrature_nodes() const noexcept {
  return std::max(32, static_cast<int>(std::ceil(6.0 * std::sqrt(gamma_))));
}

double gauss_interval(double a, double b) {
  if (a >= 0.0) return std::erfc(a) - std::erfc(b);
  if (b <= 0.0) return std::erfc(-b) - std::erfc(-a);
  return std::erf(b) - std::erf(a);
}

double feature_eval(const GaussianKernel& k, const ProjectionIndex& p, const Point2& z) {
  const double half = p.half_length();
  if (half == 0.0) return 0.0;
  const double g = k.gamma();
  const double rg = std::sqrt(g);
  const Point2 uv = rotation_apply(p.phi(), z);
  const double dx = p.x() - uv.x();
  return std::exp(-g * dx * dx) * 0.5 * std::sqrt(std::numbers::pi / g) *
         gauss_interval(rg * (-half - uv.y()), rg * (half - uv.y()));
}

double induced_kernel(const GaussianKernel& k, const ProjectionIndex& p1_in,
                      const ProjectionIndex& p2_in) {
  // Fixed argument order makes the result exactly symmetric.
  const bool swap = p1_in.x() > p2_in.x() || (p1_in.x() == p2_in.x() && p1_in.phi() > p2_in.phi());
  const ProjectionIndex& p1 = swap ? p2_in : p1_in;
  const ProjectionIndex& p2 = swap ? p1_in : p2_in;

  const double half1 = p1.half_length();
  const double half2 = p2.half_length();
  if (half1 == 0.0 || half2 == 0.0) return 0.0;

  const double g = k.gamma();
  const double rg = std::sqrt(g);
  const double delta = p1.phi() - p2.phi();
  const double sd = std::sin(delta);
  const double cd = std::cos(delta);

  // Point s of chord 2 seen in the frame of chord 1 is (u(s), v(s)) with
  //   x1 - u(s) = a + s sd,   v(s) = v0 + s cd.
  const double a = p1.x() - p2.x() * cd;
  const double v0 = p2.x() * sd;
  const double reach = kCut / rg;

  double lo = -half2;
  double hi = half2;
  auto clip = [&](double offset, double slope, double bound) {
    // keep s with |offset + s slope| <= bound
    if (slope == 0.0) {
      if (std::abs(offset) > bound) hi = lo;
      return;
    }
    double s1 = (-bound - offset) / slope;
    double s2 = (bound - offset) / slope;
    if (s1 > s2) std::swap(s1, s2);
    lo = std::max(lo, s1);
    hi = std::min(hi, s2);
  };
  clip(a, sd, reach);
  clip(v0, cd, half1 + reach);
  if (!(hi > lo)) return 0.0;

  std::array<double, 5> cuts{};
  std::size_t ncuts = 0;
  cuts[ncuts++] = lo;
  auto add_break = [&](double s) {
    if (s > lo && s < hi) cuts[ncuts++] = s;
  };
  if (sd != 0.0) add_break(-a / sd);
  if (cd != 0.0) {
    add_break((half1 - v0) / cd);
    add_break((-half1 - v0) / cd);
  }
  cuts[ncuts++] = hi;
  std::sort(cuts.begin() + 1, cuts.begin() + static_cast<std::ptrdiff_t>(ncuts) - 1);

  static const GaussLegendreRule& rule = gauss_legendre(kPanelNodes);
  const double panel = kPanelWidth / (rg * std::max(std::abs(sd), std::abs(cd)));

  double total = 0.0;
  for (std::size_t c = 0; c + 1 < ncuts; ++c) {
    const double left = cuts[c];
    const double length = cuts[c + 1] - left;
    if (!(length > 0.0)) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil(length / panel)));
    const double width = length / panels;
    const double halfw = 0.5 * width;
    for (int pi = 0; pi < panels; ++pi) {
      const double mid = left + (pi + 0.5) * width;
      double sum = 0.0;
      for (int q = 0; q < kPanelNodes; ++q) {
        const double s = mid + halfw * rule.nodes[q];
        const double d = a + s * sd;
        const double v = v0 + s * cd;
        sum += rule.weights[q] * std::exp(-g * d * d) *
               gauss_interval(rg * (-half1 - v), rg * (half1 - v));
      }
      total += halfw * sum;
    }
  }
  return total * 0.5 * std::sqrt(std::numbers::pi / g);
}

double averaged_feature_eval(const GaussianKernel& k, double x, const Point2& z,
                             int angular_nodes) {
  if (angular_nodes < 4) throw ParameterError("averaged_feature_eval: need at least 4 angular nodes");
  const Chord probe(0.0, x);
  if (probe.half_length() == 0.0) return 0.0;
  const double step = 2.0 * std::numbers::pi / angular_nodes;
  double sum = 0.0;
  for (int j = 0; j < angular_nodes; ++j) {
    sum += feature_eval(k, Chord(j * step, x), z);
  }
  return sum / angular_nodes;
}

double averaged_pair_inner(const GaussianKernel& k, double x1, double x2, int angular_nodes) {
  if (angular_nodes < 4) throw ParameterError("averaged_pair_inner: need at least 4 angular nodes");
  if (x1 > x2) std::swap(x1, x2);
  const Chord fixed(0.0, x2);
  const Chord probe(0.0, x1);
  if (fixed.half_length() == 0.0 || probe.half_length() == 0.0) return 0.0;
  // The integrand is even in theta (reflection across the first axis), so
  // only nodes in [0, pi] are evaluated.
  const double step = 2.0 * std::numbers::pi / angular_nodes;
  double sum = induced_kernel(k, Chord(0.0, x1), fixed);
  const int upper = angular_nodes / 2;
  for (int j = 1; j <= upper; ++j) {
    const double value = induced_kernel(k, Chord(j * step, x1), fixed);
    const bool self_mirror = 2 * j == angular_nodes;
    sum += self_mirror ? value : 2.0 * value;
  }
  return sum / angular_nodes;
}

}  // namespace heterotomo
