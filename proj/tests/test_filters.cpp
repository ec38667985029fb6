#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "dlab/errors.hpp"
#include "dlab/filters.hpp"

using namespace dlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

SampledSignal mode(double halfWidth, std::size_t n, double xi, cplx amp = 1.0) {
  return SampledSignal::sample(halfWidth, n, [&](double x) { return amp * std::polar(1.0, xi * x); });
}

double maxAbsDiff(const SampledSignal& a, const SampledSignal& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Random data on modes |xi_j| <= limit of the grid.
SampledSignal bandLimited(std::uint64_t seed, double halfWidth, std::size_t n, double limit) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> c(n);
  const double dxi = kPi / halfWidth;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = (static_cast<double>(i) - static_cast<double>(n / 2)) * dxi;
    const cplx z(g(rng), g(rng));
    if (std::abs(xi) <= limit) c[i] = z;
  }
  return inverseTransform(SpectralCoefficients(halfWidth, std::move(c)));
}

// Normalized primitive of exp(-1/(1-u^2)) by composite Simpson.
double stepOracle(double u) {
  auto bump = [](double v) { return std::abs(v) < 1.0 ? std::exp(-1.0 / (1.0 - v * v)) : 0.0; };
  auto integral = [&](double a, double b) {
    const int m = 200000;
    const double h = (b - a) / m;
    double acc = bump(a) + bump(b);
    for (int i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * bump(a + i * h);
    return acc * h / 3.0;
  };
  return integral(-1.0, u) / integral(-1.0, 1.0);
}

}  // namespace

TEST_CASE("smooth step matches the normalized bump primitive") {
  CHECK(smoothStep(-1.5) == 0.0);
  CHECK(smoothStep(1.5) == 1.0);
  for (double u : {-0.9, -0.5, -0.1, 0.0, 0.3, 0.7, 0.95}) CHECK(std::abs(smoothStep(u) - stepOracle(u)) < 1e-10);
}

TEST_CASE("partition of unity on a log grid") {
  const int K = 12;
  const DyadicFilterBank bank(K);
  const int n = 10000;
  const double lo = std::log(1e-3), hi = std::log(std::ldexp(1.0, K - 1));
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = std::exp(lo + (hi - lo) * i / (n - 1));
    for (double xi : {r, -r}) {
      double sum = 0.0;
      for (int k = 0; k <= K; ++k) sum += bank.psiK(k, xi);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("filter supports and plateaus") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int i = 0; i < 20000; ++i) {
    const double xi = u(rng);
    const double a = std::abs(xi);
    if (a >= 1.0) CHECK(DyadicFilterBank::psi0(xi) < 1e-15);
    if (a <= 0.5) CHECK(DyadicFilterBank::psi0(xi) == doctest::Approx(1.0).epsilon(1e-15));
    if (a <= 0.5 || a >= 2.0) CHECK(DyadicFilterBank::psi(xi) < 1e-15);
    if (a <= 0.25 || a >= 4.0) CHECK(DyadicFilterBank::psiWide(xi) < 1e-15);
    if (a >= 0.5 && a <= 2.0) CHECK(DyadicFilterBank::psiWide(xi) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(DyadicFilterBank::psiWide(xi) * DyadicFilterBank::psi(xi) - DyadicFilterBank::psi(xi)) < 1e-15);
    for (double v : {DyadicFilterBank::psi0(xi), DyadicFilterBank::psi(xi), DyadicFilterBank::psiWide(xi)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("bank values at sample frequencies") {
  const DyadicFilterBank bank(5);
  CHECK(bank.psiK(0, 0.0) == 1.0);
  for (int k = 1; k <= 5; ++k) CHECK(bank.psiK(k, 0.0) == 0.0);

  CHECK(bank.psiK(0, 1.0) < 1e-15);
  CHECK(bank.psiK(2, 1.0) < 1e-15);
  CHECK(bank.psiK(1, 1.0) == doctest::Approx(DyadicFilterBank::psi(1.0)));
  double sum = 0.0;
  for (int k = 0; k <= 5; ++k) sum += bank.psiK(k, 1.0);
  CHECK(std::abs(sum - 1.0) < 1e-12);

  CHECK(std::abs(bank.psiK(2, 3.3) + bank.psiK(3, 3.3) - 1.0) < 1e-12);
  CHECK(bank.psiK(0, 3.3) < 1e-15);
  CHECK(bank.psiK(1, 3.3) < 1e-15);
  CHECK(bank.psiK(6, 3.3) == 0.0);
  CHECK(bandUpperEdge(0) == 1.0);
  CHECK(bandUpperEdge(4) == 16.0);
  CHECK_THROWS_AS(DyadicFilterBank(0), std::invalid_argument);
  CHECK_THROWS_AS(DyadicFilterBank(31), std::invalid_argument);
}

TEST_CASE("psi squared mass against an independent quadrature") {
  const DyadicFilterBank bank(4);
  const int m = 200000;
  const double a = 0.5, b = 2.0, h = (b - a) / m;
  double acc = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double v = DyadicFilterBank::psi(a + i * h);
    acc += ((i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * v * v;
  }
  CHECK(std::abs(bank.psiSquaredMass() - 2.0 * acc * h / 3.0) < 1e-10);
}

TEST_CASE("projection of a pure mode") {
  const DyadicFilterBank bank(6);
  const int k = 3;
  const double xi0 = std::ldexp(1.0, k - 1) * 1.2;
  const auto f = mode(5.0 * kPi, 512, xi0);
  const auto p = project(f, k, bank);
  const double m = DyadicFilterBank::psi(1.2);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(p[i] - m * f[i]) < 1e-12);
}

TEST_CASE("projections sum to the band-limited datum") {
  const int K = 7;
  const DyadicFilterBank bank(K);
  const auto f = bandLimited(4, kPi, 256, 64.0);
  std::vector<cplx> sum(f.size());
  for (int k = 0; k <= K; ++k) {
    const auto p = project(f, k, bank);
    for (std::size_t i = 0; i < f.size(); ++i) sum[i] += p[i];
  }
  const SampledSignal s(f.halfWidth(), sum);
  double scale = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) scale = std::max(scale, std::abs(f[i]));
  CHECK(maxAbsDiff(s, f) < 1e-10 * scale);
}

TEST_CASE("projections to distant shells are orthogonal") {
  const DyadicFilterBank bank(7);
  const auto f = bandLimited(6, kPi, 256, 100.0);
  for (int k = 0; k <= 7; ++k)
    for (int kp = 0; kp <= 7; ++kp) {
      if (std::abs(k - kp) < 2) continue;
      const auto pp = project(project(f, k, bank), kp, bank);
      for (std::size_t i = 0; i < pp.size(); ++i) CHECK(std::abs(pp[i]) < 1e-12);
    }
}

TEST_CASE("projections are contractions and commute with evolution") {
  const DyadicFilterBank bank(7);
  const auto f = bandLimited(8, kPi, 256, 120.0);
  const auto profile = DispersionProfile::power(1.7);
  for (int k = 0; k <= 6; ++k) {
    const auto p = project(f, k, bank);
    CHECK(p.l2Norm() <= f.l2Norm());
    const auto a = project(evolve(f, 0.37, profile), k, bank);
    const auto b = evolve(p, 0.37, profile);
    CHECK(maxAbsDiff(a, b) < 1e-12 * f.l2Norm());
  }
}

TEST_CASE("wide projection") {
  const DyadicFilterBank bank(6);
  const auto f = bandLimited(10, kPi, 256, 120.0);
  for (int k = 1; k <= 5; ++k) {
    const auto p = project(f, k, bank);
    CHECK(maxAbsDiff(projectWide(p, k, bank), p) < 1e-12 * f.l2Norm());
  }

  const int k = 3;
  const auto at = mode(kPi, 128, std::ldexp(1.0, k - 1));
  const auto kept = projectWide(at, k, bank);
  for (std::size_t i = 0; i < at.size(); ++i) CHECK(std::abs(kept[i] - at[i]) < 1e-13);
  const auto far = projectWide(mode(kPi, 128, std::ldexp(1.0, k - 1) * 5.0), k, bank);
  for (std::size_t i = 0; i < far.size(); ++i) CHECK(std::abs(far[i]) < 1e-13);
}

TEST_CASE("aliasing guard") {
  const DyadicFilterBank bank(8);
  const auto f = mode(kPi, 64, 3.0);
  CHECK_NOTHROW(project(f, 5, bank));
  CHECK_THROWS_AS(project(f, 6, bank), ResolutionError);
  CHECK_THROWS_AS(projectWide(f, 5, bank), ResolutionError);
  CHECK_THROWS_AS(project(f, 9, bank), std::invalid_argument);
}

TEST_CASE("filter CSV layout") {
  const DyadicFilterBank bank(3);
  std::ostringstream os;
  bank.writeCsv(os, 8.0, 5);
  const std::string text = os.str();
  CHECK(text.rfind("xi,psi0,psi1,psi2,psi3\n", 0) == 0);
}
