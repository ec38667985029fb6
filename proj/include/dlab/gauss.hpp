#pragma once

#include <vector>

namespace dlab {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule by Newton iteration on P_n; cached for n = 15 and n = 20.
GaussRule makeGaussLegendre(int n);
const GaussRule& gauss15();
const GaussRule& gauss20();

/// Composite n-point Gauss-Legendre integral of f over [a, b] with `panels`
/// equal panels.
template <class F>
double compositeGauss(const GaussRule& rule, F&& f, double a, double b, int panels) {
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w;
    double part = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      part += rule.weights[i] * f(mid + 0.5 * w * rule.nodes[i]);
    sum += 0.5 * w * part;
  }
  return sum;
}

}  // namespace dlab
