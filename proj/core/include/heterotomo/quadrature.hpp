#pragma once

#include <vector>

namespace heterotomo {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Returns the n-point rule. Rules are computed once and cached; the
/// returned reference stays valid for the lifetime of the program.
/// Throws ParameterError when n < 2.
const GaussLegendreRule& gauss_legendre(int n);

/// Integrates f over [a, b] with the n-point Gauss-Legendre rule.
template <class F>
double integrate_gauss_legendre(F&& f, double a, double b, int n) {
  const GaussLegendreRule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    sum += rule.weights[q] * f(mid + half * rule.nodes[q]);
  }
  return half * sum;
}

}  // namespace heterotomo
