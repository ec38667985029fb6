#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dlab/errors.hpp"
#include "dlab/filters.hpp"
#include "dlab/kernel.hpp"

using namespace dlab;

namespace {

double psiMass() { return DyadicFilterBank(1).psiSquaredMass(); }

SpaceTimePoint randomPoint(std::mt19937_64& rng, double thetaWidth) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpaceTimePoint p;
  p.x = u(rng);
  p.t = u(rng);
  p.theta = 0.5 * thetaWidth * u(rng);
  return p;
}

// Composite Simpson of exp(i lambda phi) psi on (a, b).
cplx simpsonOscillatory(const OscillatoryIntegrand& f, double lambda, int m) {
  const double h = (f.b - f.a) / m;
  cplx acc = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double x = f.a + i * h;
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * f.amplitude(x) * std::polar(1.0, lambda * f.phase(x));
  }
  return acc * h / 3.0;
}

SpaceTimeField constantField(std::size_t nx, std::size_t nt, double v) {
  return {nx, nt, std::vector<double>(nx * nt, v)};
}

}  // namespace

TEST_CASE("phase values") {
  const auto p = DispersionProfile::power(2.0);
  const SpaceTimePoint w{0.3, -0.4, 0.1};
  for (double xi : {-3.0, 0.0, 1.7}) CHECK(phaseValue(xi, w, w, p) == 0.0);
  const SpaceTimePoint a{1.0, 0.2, 0.05}, b{0.0, 0.2, 0.05};
  for (double xi : {-3.0, 0.5, 1.7}) CHECK(phaseValue(xi, a, b, p) == doctest::Approx(xi).epsilon(1e-14));
  CHECK(phaseValue(2.0, {0.1, 0.5, 0.0}, {0.0, 0.0, 0.0}, p) == doctest::Approx(2.2).epsilon(1e-14));
  CHECK(phaseValue(2.0, {0.1, 0.5, 0.2}, {0.0, -0.5, 0.4}, p) ==
        doctest::Approx((0.1 + 0.5 * 0.2 + 0.5 * 0.4) * 2.0 + 1.0 * 4.0).epsilon(1e-14));
}

TEST_CASE("region labels") {
  CHECK(classifyRegion({0.1, 0.5, 0.0}, {0.0, 0.0, 0.0}, 16.0, 0.5) == RegionLabel::V1);
  CHECK(classifyRegion({0.5, 0.1, 0.0}, {0.0, 0.0, 0.0}, 16.0, 1.0) == RegionLabel::V2);
  CHECK(classifyRegion({0.1, 0.01, 0.0}, {0.0, 0.0, 0.0}, 16.0, 1.0) == RegionLabel::V3);
  CHECK(std::string(regionName(RegionLabel::V2)) == "V2");

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lam(2.0, 4096.0), sig(0.25, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const double lambda = lam(rng), sigma = sig(rng);
    const auto w = randomPoint(rng, 0.1), wp = randomPoint(rng, 0.1);
    const double dx = std::abs(w.x - wp.x), dt = std::abs(w.t - wp.t);
    const bool v1 = dx < 4.0 * dt;
    const bool v2 = !v1 && dx >= 4.0 * std::pow(lambda, -sigma);
    const bool v3 = !v1 && dx < 4.0 * std::pow(lambda, -sigma);
    REQUIRE(int(v1) + int(v2) + int(v3) == 1);
    const auto label = classifyRegion(w, wp, lambda, sigma);
    CHECK(label == (v1 ? RegionLabel::V1 : v2 ? RegionLabel::V2 : RegionLabel::V3));
  }
}

TEST_CASE("kernel at coincident points is the psi squared mass") {
  const SpaceTimePoint w{0.2, 0.3, 0.01};
  for (double a : {2.0, 1.2}) {
    const auto k = kernelValue({w, w, 64.0, 0.5}, DispersionProfile::power(a));
    CHECK(std::abs(k.value.imag()) < 1e-14);
    CHECK(k.value.real() > 0.0);
    CHECK(std::abs(k.value.real() - psiMass()) < 1e-8);
  }
}

TEST_CASE("kernel symmetry, trivial bound and quadrature self-consistency") {
  std::mt19937_64 rng(5);
  for (double a : {2.0, 1.2, 3.0}) {
    const auto p = DispersionProfile::power(a);
    const int span = a == 3.0 ? 3 : 7;
    for (int i = 0; i < 40; ++i) {
      const double lambda = std::ldexp(1.0, 4 + i % span);
      const auto w = randomPoint(rng, std::pow(lambda, -0.5));
      const auto wp = randomPoint(rng, std::pow(lambda, -0.5));
      const auto k = kernelValue({w, wp, lambda, 0.5}, p);
      const auto ks = kernelValue({wp, w, lambda, 0.5}, p);
      CHECK(std::abs(k.value - std::conj(ks.value)) < 2e-8);
      CHECK(std::abs(k.value) <= psiMass() + 1e-8);
      const auto doubled = kernelValue({w, wp, lambda, 0.5}, p, QuadratureOptions{}.refined(2.0));
      CHECK(std::abs(k.value - doubled.value) < 1e-8);
      if (i % 4 == 0 && lambda <= 256.0) {
        const auto oracle = kernelValue({w, wp, lambda, 0.5}, p, QuadratureOptions{}.refined(10.0));
        CHECK(std::abs(k.value - oracle.value) < 1e-8);
        CHECK(oracle.panels > k.panels);
      }
    }
  }
}

TEST_CASE("kernel quadrature budget") {
  QuadratureOptions tight;
  tight.maxPanels = 10;
  const KernelQuery q{{0.9, 1.0, 0.0}, {-0.9, -1.0, 0.0}, 1024.0, 0.5};
  CHECK_THROWS_AS(kernelValue(q, DispersionProfile::power(2.0), tight), QuadratureError);
}

TEST_CASE("far V1 kernel is small against the scan constant") {
  const auto p = DispersionProfile::power(2.0);
  const std::vector<double> lambdas{16.0, 32.0, 64.0};
  const auto report = decayBoundScan(p, 0.5, lambdas, 20, 3);
  double constant = 0.0;
  for (std::size_t l = 0; l < lambdas.size(); ++l) constant = std::max(constant, report.maxDecayV12(l));
  const double lambda = 8192.0;
  const SpaceTimePoint w{0.6103515625, 0.16, 0.0}, wp{-0.6103515625, -0.15, 0.0};
  REQUIRE(classifyRegion(w, wp, lambda, 0.5) == RegionLabel::V1);
  REQUIRE(lambda * std::abs(w.x - wp.x) == doctest::Approx(1e4).epsilon(1e-3));
  QuadratureOptions large;
  large.maxPanels = 20'000'000;
  const auto k = kernelValue({w, wp, lambda, 0.5}, p, large);
  const auto oracle = kernelValue({w, wp, lambda, 0.5}, p, large.refined(10.0));
  CHECK(std::abs(k.value - oracle.value) < 1e-8);
  CHECK(std::abs(k.value) <= constant * 1e-2);
}

TEST_CASE("U1/U2 splits") {
  const auto p = DispersionProfile::power(2.0);
  const auto all = splitU1U2({0.3, 0.2, 0.0}, {-0.1, 0.2, 0.0}, 16.0, p);
  REQUIRE(all.size() == 2);
  for (const auto& piece : all) CHECK(piece.label == SplitLabel::U1);
  CHECK(all[0].span == Interval{-2.0, -0.5});
  CHECK(all[1].span == Interval{0.5, 2.0});

  const auto none = splitU1U2({0.0, 0.5, 0.0}, {0.0, -0.3, 0.0}, 16.0, p);
  REQUIRE(none.size() == 2);
  for (const auto& piece : none) CHECK(piece.label == SplitLabel::U2);

  const auto cut = splitU1U2({1.0, 0.1, 0.0}, {-1.0, 0.0, 0.0}, 8.0, p);
  REQUIRE(cut.size() == 4);
  CHECK(cut[0].label == SplitLabel::U2);
  CHECK(cut[1].label == SplitLabel::U1);
  CHECK(cut[2].label == SplitLabel::U1);
  CHECK(cut[3].label == SplitLabel::U2);
  CHECK(std::abs(cut[0].span.hi + 0.625) < 1e-10);
  CHECK(std::abs(cut[2].span.hi - 0.625) < 1e-10);
  CHECK(cut[1].span.hi == -0.5);
  CHECK(cut[2].span.lo == 0.5);

  const auto wobbly = DispersionProfile::custom(
      "wobbly", [](double xi) { return xi * xi + std::sin(xi); }, [](double xi) { return 2.0 * xi + 40.0 * std::cos(xi); },
      [](double xi) { return 2.0 - 40.0 * std::sin(xi); });
  CHECK_THROWS_AS(splitU1U2({0.0, 0.5, 0.0}, {0.0, 0.0, 0.0}, 16.0, wobbly), HypothesisError);
}

TEST_CASE("decay scan bookkeeping") {
  const auto p = DispersionProfile::power(2.0);
  const std::vector<double> lambdas{16.0, 64.0};
  const auto report = decayBoundScan(p, 0.5, lambdas, 15, 11);
  CHECK(report.samples.size() == 2 * 3 * 15);
  CHECK(report.psiSquaredMass == psiMass());
  for (const auto& s : report.samples) {
    CHECK(classifyRegion(s.w, s.wPrime, s.lambda, 0.5) == s.region);
    const double width = std::pow(s.lambda, -0.5);
    CHECK(std::abs(s.w.theta) <= 0.5 * width);
    CHECK(std::abs(s.wPrime.theta) <= 0.5 * width);
    CHECK(s.decayProduct == doctest::Approx(s.absK * std::sqrt(s.lambda * s.xDist)));
    const auto k = kernelValue({s.w, s.wPrime, s.lambda, 0.5}, p);
    CHECK(std::abs(std::abs(k.value) - s.absK) < 1e-14);
  }
  CHECK(report.comparabilityHolds());
  CHECK(report.trivialBoundHolds());
  CHECK(report.growthFactor() >= 1.0);

  const auto threaded = decayBoundScan(p, 0.5, lambdas, 15, 11, 4);
  REQUIRE(threaded.samples.size() == report.samples.size());
  for (std::size_t i = 0; i < report.samples.size(); ++i) CHECK(threaded.samples[i].absK == report.samples[i].absK);

  const std::vector<double> descending{64.0, 16.0};
  CHECK_THROWS_AS(decayBoundScan(p, 0.5, descending, 5, 1), std::invalid_argument);
}

TEST_CASE("oscillatory integrals against Simpson") {
  for (const auto& f : {linearPhaseIntegrand(), quadraticPhaseIntegrand(), stationaryPhaseIntegrand()}) {
    for (double lambda : {16.0, 256.0, 2048.0}) {
      const auto v = oscillatoryIntegral(f, lambda);
      const auto ref = simpsonOscillatory(f, lambda, 400000);
      CHECK(std::abs(v - ref) < 1e-9);
    }
  }
}

TEST_CASE("van der Corput normalized ratios") {
  std::vector<double> lambdas;
  for (int e = 4; e <= 12; ++e) lambdas.push_back(std::ldexp(1.0, e));
  const auto lin = vanDerCorputCheck(linearPhaseIntegrand(), lambdas, 1);
  REQUIRE(lin.rows.size() == lambdas.size());
  CHECK(lin.maxRatio() / lin.minRatio() < 10.0);
  const auto stat = vanDerCorputCheck(stationaryPhaseIntegrand(), lambdas, 2);
  CHECK(stat.maxRatio() / stat.minRatio() < 10.0);
  for (const auto& row : stat.rows)
    CHECK(row.normalizedRatio / (row.absIntegral * std::sqrt(row.lambda)) ==
          doctest::Approx(stat.rows[0].normalizedRatio / (stat.rows[0].absIntegral * 4.0)));
  const auto quad = vanDerCorputCheck(quadraticPhaseIntegrand(), lambdas, 2);
  for (const auto& row : quad.rows) CHECK(row.normalizedRatio > 0.0);
  CHECK_THROWS_AS(vanDerCorputCheck(stationaryPhaseIntegrand(), lambdas, 1), HypothesisError);
  CHECK_THROWS_AS(vanDerCorputCheck(linearPhaseIntegrand(), lambdas, 2), HypothesisError);
}

TEST_CASE("HLS check on the indicator converges to the closed form") {
  const double exact = 4.0 * 16.0 * std::sqrt(2.0) / 3.0;
  std::vector<double> errors;
  for (std::size_t nx : {100u, 400u, 1600u}) {
    const auto one = constantField(nx, 8, 1.0);
    const auto r = hlsBilinearCheck(one, one, 2.0);
    CHECK(r.rhs == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r.lhs < exact);
    errors.push_back(exact - r.lhs);
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double rate = errors[i - 1] / errors[i];
    CHECK(rate > 1.8);
    CHECK(rate < 2.2);
  }
}

TEST_CASE("HLS check on separated and empty data") {
  const std::size_t nx = 200, nt = 10;
  SpaceTimeField g{nx, nt, std::vector<double>(nx * nt, 0.0)};
  SpaceTimeField h = g;
  const std::size_t ig = 5, ih = nx - 6;
  for (std::size_t j = 0; j < nt; ++j) {
    g.values[ig * nt + j] = 1.0;
    h.values[ih * nt + j] = 1.0;
  }
  const double mass = 2.0 / nx * 2.0;
  const auto r = hlsBilinearCheck(g, h, 2.0);
  CHECK(r.lhs == doctest::Approx(mass * mass / std::sqrt(g.x(ih) - g.x(ig))).epsilon(1e-12));
  CHECK(r.ratio < 0.1);

  const auto zero = constantField(nx, nt, 0.0);
  const auto z = hlsBilinearCheck(g, zero, 4.0);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK_THROWS_AS(hlsBilinearCheck(g, h, 5.0), std::invalid_argument);
}
