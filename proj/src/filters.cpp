#include "dlab/filters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dlab/errors.hpp"
#include "dlab/gauss.hpp"
#include "dlab/table.hpp"

namespace dlab {

namespace {

double bump(double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

// Piecewise Chebyshev table of the smooth step on [-1, 1].
class StepTable {
 public:
  static constexpr int kPanels = 128;
  static constexpr int kDegree = 10;

  StepTable() {
    const auto& g = gauss20();
    const double total = compositeGauss(g, bump, -1.0, 1.0, 64);
    const double w = 2.0 / kPanels;
    double accumulated = 0.0;
    constexpr int n = kDegree + 1;
    for (int p = 0; p < kPanels; ++p) {
      const double a = -1.0 + p * w;
      std::array<double, n> values{};
      for (int j = 0; j < n; ++j) {
        const double theta = std::numbers::pi * (j + 0.5) / n;
        const double u = a + 0.5 * w * (1.0 + std::cos(theta));
        values[static_cast<std::size_t>(j)] =
            (accumulated + compositeGauss(g, bump, a, u, 4)) / total;
      }
      for (int m = 0; m < n; ++m) {
        double c = 0.0;
        for (int j = 0; j < n; ++j)
          c += values[static_cast<std::size_t>(j)] * std::cos(m * std::numbers::pi * (j + 0.5) / n);
        coeffs_[static_cast<std::size_t>(p)][static_cast<std::size_t>(m)] =
            (m == 0 ? 1.0 : 2.0) * c / n;
      }
      accumulated += compositeGauss(g, bump, a, a + w, 4);
    }
  }

  double operator()(double u) const {
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return 1.0;
    constexpr double w = 2.0 / kPanels;
    const int p = std::min(kPanels - 1, static_cast<int>((u + 1.0) / w));
    const double a = -1.0 + p * w;
    const double x = 2.0 * (u - a) / w - 1.0;
    const auto& c = coeffs_[static_cast<std::size_t>(p)];
    double b1 = 0.0, b2 = 0.0;
    for (int m = kDegree; m >= 1; --m) {
      const double b0 = 2.0 * x * b1 - b2 + c[static_cast<std::size_t>(m)];
      b2 = b1;
      b1 = b0;
    }
    return std::clamp(x * b1 - b2 + c[0], 0.0, 1.0);
  }

 private:
  std::array<std::array<double, kDegree + 1>, kPanels> coeffs_{};
};

const StepTable& stepTable() {
  static const StepTable table;
  return table;
}

}  // namespace

double smoothStep(double u) { return stepTable()(u); }

double DyadicFilterBank::psi0(double xi) {
  const double a = std::abs(xi);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  return 1.0 - smoothStep(4.0 * a - 3.0);
}

double DyadicFilterBank::psi(double xi) {
  const double a = std::abs(xi);
  if (a <= 0.5 || a >= 2.0) return 0.0;
  if (a <= 1.0) return smoothStep(4.0 * a - 3.0);
  return 1.0 - smoothStep(2.0 * a - 3.0);
}

double DyadicFilterBank::psiWide(double xi) {
  const double a = std::abs(xi);
  if (a <= 0.25 || a >= 4.0) return 0.0;
  if (a < 0.5) return smoothStep(8.0 * a - 3.0);
  if (a <= 2.0) return 1.0;
  return 1.0 - smoothStep(a - 3.0);
}

DyadicFilterBank::DyadicFilterBank(int maxBand) : maxBand_(maxBand) {
  if (maxBand < 1 || maxBand > 30)
    throw std::invalid_argument("filter bank needs 1 <= K <= 30, got " + std::to_string(maxBand));
  const auto sq = [](double xi) {
    const double v = psi(xi);
    return v * v;
  };
  // Panels aligned with the breakpoints of psi.
  psiSquaredMass_ = 2.0 * (compositeGauss(gauss20(), sq, 0.5, 1.0, 32) +
                           compositeGauss(gauss20(), sq, 1.0, 2.0, 64));
}

double DyadicFilterBank::psiK(int k, double xi) const {
  if (k < 0) throw std::invalid_argument("psiK: negative band");
  if (k == 0) return psi0(xi);
  if (k > maxBand_) return 0.0;
  return psi(std::ldexp(xi, 1 - k));
}

double DyadicFilterBank::psiWideK(int k, double xi) const {
  if (k < 1) throw std::invalid_argument("psiWideK: band must be >= 1");
  if (k > maxBand_) return 0.0;
  return psiWide(std::ldexp(xi, 1 - k));
}

void DyadicFilterBank::writeCsv(std::ostream& os, double xiMax, std::size_t samples) const {
  os << "xi,psi0";
  for (int k = 1; k <= maxBand_; ++k) os << ",psi" << k;
  os << '\n';
  for (std::size_t i = 0; i < samples; ++i) {
    const double xi =
        samples == 1 ? 0.0 : -xiMax + 2.0 * xiMax * static_cast<double>(i) / static_cast<double>(samples - 1);
    os << formatReal(xi);
    for (int k = 0; k <= maxBand_; ++k) os << ',' << formatReal(psiK(k, xi));
    os << '\n';
  }
}

double bandUpperEdge(int k) { return k == 0 ? 1.0 : std::ldexp(1.0, k); }

namespace {

void guardAliasing(double nyquist, double edge, int k) {
  if (edge > nyquist)
    throw ResolutionError("band " + std::to_string(k) + " reaches |xi| = " + formatReal(edge) +
                          " beyond the grid Nyquist frequency " + formatReal(nyquist));
}

void checkBand(int k, const DyadicFilterBank& bank) {
  if (k < 0 || k > bank.maxBand())
    throw std::invalid_argument("band " + std::to_string(k) + " outside [0, " +
                                std::to_string(bank.maxBand()) + "]");
}

}  // namespace

SpectralCoefficients project(const SpectralCoefficients& c, int k, const DyadicFilterBank& bank) {
  checkBand(k, bank);
  guardAliasing(c.nyquist(), bandUpperEdge(k), k);
  return applyMultiplier(c, [&](double xi) { return cplx(bank.psiK(k, xi), 0.0); });
}

SampledSignal project(const SampledSignal& f, int k, const DyadicFilterBank& bank) {
  return inverseTransform(project(forwardTransform(f), k, bank));
}

SpectralCoefficients projectWide(const SpectralCoefficients& c, int k,
                                 const DyadicFilterBank& bank) {
  checkBand(k, bank);
  if (k < 1) throw std::invalid_argument("projectWide: band must be >= 1");
  guardAliasing(c.nyquist(), 2.0 * bandUpperEdge(k), k);
  return applyMultiplier(c, [&](double xi) { return cplx(bank.psiWideK(k, xi), 0.0); });
}

SampledSignal projectWide(const SampledSignal& f, int k, const DyadicFilterBank& bank) {
  return inverseTransform(projectWide(forwardTransform(f), k, bank));
}

}  // namespace dlab
