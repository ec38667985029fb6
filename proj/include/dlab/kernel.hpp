#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dlab/directions.hpp"
#include "dlab/spectral.hpp"

namespace dlab {

/// w = (x, t, theta) in W = I x [-1, 1] x Omega.
struct SpaceTimePoint {
  double x = 0.0;
  double t = 0.0;
  double theta = 0.0;
};

struct KernelQuery {
  SpaceTimePoint w;
  SpaceTimePoint wPrime;
  double lambda = 16.0;
  double sigma = 0.5;
};

enum class RegionLabel { V1, V2, V3 };
const char* regionName(RegionLabel r);

/// phi(xi; w, w') = (x - x' + t theta - t' theta') xi + (t - t') Phi(xi).
double phaseValue(double xi, const SpaceTimePoint& w, const SpaceTimePoint& wPrime,
                  const DispersionProfile& profile);

/// V1: |x-x'| < 4|t-t'|; otherwise V2 if |x-x'| >= 4 lambda^{-sigma}, else V3.
RegionLabel classifyRegion(const SpaceTimePoint& w, const SpaceTimePoint& wPrime, double lambda,
                           double sigma);

struct QuadratureOptions {
  /// Upper bound on the phase variation across one Gauss panel.
  double maxPanelPhase = 6.0 * 3.14159265358979323846;
  /// Base panels per dyadic piece ([1/2, 1] and [1, 2]) resolving psi^2.
  int basePanels = 32;
  std::size_t maxPanels = 1'000'000;

  /// Same scheme at `factor` times the panel density.
  QuadratureOptions refined(double factor) const;
};

struct KernelValue {
  cplx value;
  std::size_t panels = 0;
};

/// K_lambda(w, w') = int exp(i phi(lambda xi)) psi(xi)^2 dxi over the support
/// of psi, by 15-point Gauss panels whose phase variation is bounded.
/// Throws QuadratureError past the panel budget.
KernelValue kernelValue(const KernelQuery& query, const DispersionProfile& profile,
                        const QuadratureOptions& options = {});

enum class SplitLabel { U1, U2 };

struct LabeledInterval {
  Interval span;
  SplitLabel label;
};

/// Partition of supp psi into U1 = {|x-x'+t theta-t' theta'| >= 2|t-t'||Phi'(lambda xi)|}
/// and its complement U2, as labeled intervals in increasing order.
/// Throws HypothesisError if Phi' is not monotone on either half of the shell.
std::vector<LabeledInterval> splitU1U2(const SpaceTimePoint& w, const SpaceTimePoint& wPrime,
                                       double lambda, const DispersionProfile& profile,
                                       std::size_t nSamples = 512);

struct DecaySample {
  double lambda = 0.0;
  RegionLabel region = RegionLabel::V1;
  SpaceTimePoint w, wPrime;
  double xDist = 0.0;
  double tDist = 0.0;
  double absK = 0.0;
  /// |K| (lambda |x-x'|)^{1/2}
  double decayProduct = 0.0;
  /// |x-x'+t theta-t' theta'| / |x-x'|
  double comparability = 0.0;
};

struct DecayReport {
  std::vector<double> lambdas;
  double sigma = 0.5;
  std::vector<DecaySample> samples;
  /// Per lambda: max decay product over V1 and V2 samples.
  std::vector<double> maxDecayV1, maxDecayV2;
  double psiSquaredMass = 0.0;

  double maxDecayV12(std::size_t lambdaIndex) const;
  /// max over lambda of the V1 u V2 maximum divided by its value at the first lambda.
  double growthFactor() const;
  bool comparabilityHolds() const;
  bool trivialBoundHolds(double tolerance = 1e-8) const;
};

/// Seeded rejection sampling of (w, w') pairs with theta, theta' in
/// Omega = [-lambda^{-sigma}/2, lambda^{-sigma}/2], `samplesPerRegion` per
/// region V1/V2/V3 and lambda.
DecayReport decayBoundScan(const DispersionProfile& profile, double sigma,
                           std::span<const double> lambdas, std::size_t samplesPerRegion,
                           std::uint64_t seed, unsigned threads = 1,
                           const QuadratureOptions& options = {});

/// Phase and amplitude on (a, b) for the van der Corput check.
struct OscillatoryIntegrand {
  std::string name;
  double a = 0.0;
  double b = 1.0;
  std::function<double(double)> phase;
  std::function<double(double)> phasePrime;
  std::function<double(double)> phasePrime2;
  std::function<double(double)> amplitude;
  std::function<double(double)> amplitudePrime;
};

/// phi(x) = x on (0, 1) with amplitude exp(-x^2).
OscillatoryIntegrand linearPhaseIntegrand();
/// phi(x) = x^2/2 on (1, 2) with unit amplitude.
OscillatoryIntegrand quadraticPhaseIntegrand();
/// phi(x) = x^2/2 on (-1, 1), stationary at 0, amplitude exp(-x^2).
OscillatoryIntegrand stationaryPhaseIntegrand();

struct VanDerCorputRow {
  double lambda = 0.0;
  double absIntegral = 0.0;
  /// |integral| lambda^{1/k} / (int |psi'| + sup |psi|)
  double normalizedRatio = 0.0;
};

struct VanDerCorputReport {
  int order = 1;
  std::vector<VanDerCorputRow> rows;

  double maxRatio() const;
  double minRatio() const;
};

/// Throws HypothesisError when |phi^{(k)}| >= 1 (and, for k = 1, monotone
/// phi') fails on sampled points of (a, b).
VanDerCorputReport vanDerCorputCheck(const OscillatoryIntegrand& integrand,
                                     std::span<const double> lambdas, int order);

/// |int_a^b exp(i lambda phi) psi| by phase-controlled Gauss panels.
cplx oscillatoryIntegral(const OscillatoryIntegrand& integrand, double lambda,
                         const QuadratureOptions& options = {});

/// Nonnegative samples on the midpoint grid of I x [-1, 1], x-major.
struct SpaceTimeField {
  std::size_t nx = 0;
  std::size_t nt = 0;
  std::vector<double> values;

  double at(std::size_t ix, std::size_t it) const { return values[ix * nt + it]; }
  double x(std::size_t ix) const { return -1.0 + (2.0 * static_cast<double>(ix) + 1.0) / static_cast<double>(nx); }
};

struct BilinearCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// lhs = sum over x != x' of G(x) H(x') |x-x'|^{-1/2} dx dx' with G, H the
/// t-integrals; rhs = ||g||_{L^{q'}_x L^1_t} ||h||_{L^{q'}_x L^1_t}.
BilinearCheck hlsBilinearCheck(const SpaceTimeField& g, const SpaceTimeField& h, double q);

}  // namespace dlab
