#include "dlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "dlab/errors.hpp"
#include "dlab/filters.hpp"
#include "dlab/gauss.hpp"
#include "dlab/maximal.hpp"
#include "dlab/parallel.hpp"
#include "dlab/table.hpp"

namespace dlab {

namespace {

constexpr double kShellInner = 0.5;
constexpr double kShellMiddle = 1.0;
constexpr double kShellOuter = 2.0;
constexpr std::size_t kMaxDraws = 200'000'000;
constexpr std::size_t kHypothesisSamples = 1001;

struct PhaseData {
  double drift;  // x - x' + t theta - t' theta'
  double dt;     // t - t'
};

PhaseData phaseData(const SpaceTimePoint& w, const SpaceTimePoint& wp) {
  return {w.x - wp.x + w.t * w.theta - wp.t * wp.theta, w.t - wp.t};
}

// Pieces of supp psi on which psi is given by a single formula.
constexpr double kPieces[4][2] = {{-kShellOuter, -kShellMiddle},
                                  {-kShellMiddle, -kShellInner},
                                  {kShellInner, kShellMiddle},
                                  {kShellMiddle, kShellOuter}};

std::size_t subPanels(double maxSlope, double width, double maxPhase) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(maxSlope * width / maxPhase)));
}

// Integral of exp(i g) amp over [a, b] split into n equal 15-point Gauss panels.
template <class Phase, class Amp>
cplx gaussPanels(Phase&& g, Amp&& amp, double a, double b, std::size_t n) {
  const auto& rule = gauss15();
  const double w = (b - a) / static_cast<double>(n);
  cplx sum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * w;
    // Node phases are taken relative to the midpoint to keep sin/cos arguments small.
    const double g0 = g(mid);
    cplx part = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double xi = mid + 0.5 * w * rule.nodes[i];
      const double ph = g(xi) - g0;
      part += rule.weights[i] * amp(xi) * cplx(std::cos(ph), std::sin(ph));
    }
    sum += 0.5 * w * part * cplx(std::cos(g0), std::sin(g0));
  }
  return sum;
}

double bisectRoot(const std::function<double(double)>& h, double lo, double hi) {
  double hlo = h(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if ((hm > 0.0) == (hlo > 0.0)) {
      lo = mid;
      hlo = hm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Splits [a, b] into maximal runs where inU1(xi) is constant, locating the
// switches by bisection on `margin` (positive inside U1).
void splitHalf(const std::function<double(double)>& margin, double a, double b, std::size_t n,
               std::vector<LabeledInterval>& out) {
  std::vector<double> cuts{a};
  double prevX = a;
  bool prevIn = margin(a) >= 0.0;
  const bool startIn = prevIn;
  for (std::size_t i = 1; i <= n; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
    const bool in = margin(x) >= 0.0;
    if (in != prevIn) cuts.push_back(bisectRoot(margin, prevX, x));
    prevX = x;
    prevIn = in;
  }
  cuts.push_back(b);
  bool label = startIn;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i])
      out.push_back({{cuts[i], cuts[i + 1]}, label ? SplitLabel::U1 : SplitLabel::U2});
    label = !label;
  }
}

void requireMonotone(const DispersionProfile& profile, double lambda, double a, double b,
                     std::size_t n) {
  int sign = 0;
  double prev = profile.phiPrime(lambda * a);
  for (std::size_t i = 1; i <= n; ++i) {
    const double v = profile.phiPrime(lambda * (a + (b - a) * static_cast<double>(i) / static_cast<double>(n)));
    const double d = v - prev;
    const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (s != 0) {
      if (sign != 0 && s != sign)
        throw HypothesisError("Phi' is not monotone on the shell half [" + formatReal(a) + ", " +
                              formatReal(b) + "]");
      sign = s;
    }
    prev = v;
  }
}

}  // namespace

const char* regionName(RegionLabel r) {
  switch (r) {
    case RegionLabel::V1: return "V1";
    case RegionLabel::V2: return "V2";
    case RegionLabel::V3: return "V3";
  }
  return "?";
}

double phaseValue(double xi, const SpaceTimePoint& w, const SpaceTimePoint& wPrime,
                  const DispersionProfile& profile) {
  const auto pd = phaseData(w, wPrime);
  return pd.drift * xi + pd.dt * profile.phi(xi);
}

RegionLabel classifyRegion(const SpaceTimePoint& w, const SpaceTimePoint& wPrime, double lambda,
                           double sigma) {
  const double dx = std::abs(w.x - wPrime.x);
  if (dx < 4.0 * std::abs(w.t - wPrime.t)) return RegionLabel::V1;
  if (dx >= 4.0 * std::pow(lambda, -sigma)) return RegionLabel::V2;
  return RegionLabel::V3;
}

QuadratureOptions QuadratureOptions::refined(double factor) const {
  if (!(factor >= 1.0)) throw std::invalid_argument("refined: factor must be >= 1");
  QuadratureOptions out = *this;
  out.maxPanelPhase /= factor;
  out.basePanels = static_cast<int>(std::ceil(basePanels * factor));
  out.maxPanels = static_cast<std::size_t>(std::ceil(static_cast<double>(maxPanels) * factor));
  return out;
}

KernelValue kernelValue(const KernelQuery& query, const DispersionProfile& profile,
                        const QuadratureOptions& options) {
  if (!(query.lambda >= 2.0)) throw std::invalid_argument("kernelValue: lambda must be >= 2");
  if (options.basePanels < 1 || !(options.maxPanelPhase > 0.0))
    throw std::invalid_argument("kernelValue: bad quadrature options");
  const auto pd = phaseData(query.w, query.wPrime);
  const double lambda = query.lambda;
  const auto slope = [&](double xi) {
    return std::abs(lambda * (pd.drift + pd.dt * profile.phiPrime(lambda * xi)));
  };
  const auto phase = [&](double xi) { return pd.drift * lambda * xi + pd.dt * profile.phi(lambda * xi); };
  const auto amp = [](double xi) {
    const double p = DyadicFilterBank::psi(xi);
    return p * p;
  };

  // Phi' is monotone on each piece, so |g'| peaks at a panel end.
  std::vector<std::size_t> counts;
  counts.reserve(4 * static_cast<std::size_t>(options.basePanels));
  std::size_t total = 0;
  for (const auto& piece : kPieces) {
    const double w = (piece[1] - piece[0]) / options.basePanels;
    for (int p = 0; p < options.basePanels; ++p) {
      const double a = piece[0] + p * w;
      const auto n = subPanels(std::max(slope(a), slope(a + w)), w, options.maxPanelPhase);
      counts.push_back(n);
      total += n;
    }
  }
  if (total > options.maxPanels)
    throw QuadratureError("kernel quadrature needs " + std::to_string(total) + " panels (budget " +
                          std::to_string(options.maxPanels) + ") at lambda=" + formatReal(lambda));

  KernelValue out;
  out.panels = total;
  std::size_t idx = 0;
  for (const auto& piece : kPieces) {
    const double w = (piece[1] - piece[0]) / options.basePanels;
    for (int p = 0; p < options.basePanels; ++p) {
      const double a = piece[0] + p * w;
      out.value += gaussPanels(phase, amp, a, a + w, counts[idx++]);
    }
  }
  return out;
}

std::vector<LabeledInterval> splitU1U2(const SpaceTimePoint& w, const SpaceTimePoint& wPrime,
                                       double lambda, const DispersionProfile& profile,
                                       std::size_t nSamples) {
  if (nSamples < 2) throw std::invalid_argument("splitU1U2: nSamples >= 2");
  requireMonotone(profile, lambda, -kShellOuter, -kShellInner, nSamples);
  requireMonotone(profile, lambda, kShellInner, kShellOuter, nSamples);
  const auto pd = phaseData(w, wPrime);
  const std::function<double(double)> margin = [&](double xi) {
    return std::abs(pd.drift) - 2.0 * std::abs(pd.dt) * std::abs(profile.phiPrime(lambda * xi));
  };
  std::vector<LabeledInterval> out;
  splitHalf(margin, -kShellOuter, -kShellInner, nSamples, out);
  splitHalf(margin, kShellInner, kShellOuter, nSamples, out);
  return out;
}

double DecayReport::maxDecayV12(std::size_t lambdaIndex) const {
  return std::max(maxDecayV1.at(lambdaIndex), maxDecayV2.at(lambdaIndex));
}

double DecayReport::growthFactor() const {
  if (lambdas.empty()) return 0.0;
  double worst = 0.0;
  for (std::size_t l = 0; l < lambdas.size(); ++l) worst = std::max(worst, maxDecayV12(l));
  return worst / maxDecayV12(0);
}

bool DecayReport::comparabilityHolds() const {
  return std::all_of(samples.begin(), samples.end(), [](const DecaySample& s) {
    return s.region != RegionLabel::V2 || (s.comparability >= 0.5 && s.comparability <= 1.5);
  });
}

bool DecayReport::trivialBoundHolds(double tolerance) const {
  return std::all_of(samples.begin(), samples.end(),
                     [&](const DecaySample& s) { return s.absK <= psiSquaredMass + tolerance; });
}

DecayReport decayBoundScan(const DispersionProfile& profile, double sigma,
                           std::span<const double> lambdas, std::size_t samplesPerRegion,
                           std::uint64_t seed, unsigned threads, const QuadratureOptions& options) {
  if (lambdas.empty()) throw std::invalid_argument("decayBoundScan: empty lambda list");
  if (!std::is_sorted(lambdas.begin(), lambdas.end()))
    throw std::invalid_argument("decayBoundScan: lambda list must be ascending");
  if (samplesPerRegion == 0) throw std::invalid_argument("decayBoundScan: samplesPerRegion >= 1");

  DecayReport report;
  report.lambdas.assign(lambdas.begin(), lambdas.end());
  report.sigma = sigma;
  report.psiSquaredMass = DyadicFilterBank(1).psiSquaredMass();

  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const double lambda = lambdas[l];
    const double width = std::pow(lambda, -sigma);
    std::mt19937_64 rng(mixSeed(seed, l));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto draw = [&] {
      SpaceTimePoint p;
      p.x = unit(rng);
      p.t = unit(rng);
      p.theta = 0.5 * width * unit(rng);
      return p;
    };
    std::vector<DecaySample> buckets[3];
    std::size_t draws = 0;
    while (buckets[0].size() < samplesPerRegion || buckets[1].size() < samplesPerRegion ||
           buckets[2].size() < samplesPerRegion) {
      if (++draws > kMaxDraws)
        throw NumericalError("decayBoundScan: region quotas not met after " + std::to_string(kMaxDraws) +
                             " draws at lambda=" + formatReal(lambda));
      DecaySample s;
      s.lambda = lambda;
      s.w = draw();
      s.wPrime = draw();
      s.region = classifyRegion(s.w, s.wPrime, lambda, sigma);
      auto& bucket = buckets[static_cast<int>(s.region)];
      if (bucket.size() < samplesPerRegion) bucket.push_back(s);
    }
    for (auto& b : buckets) report.samples.insert(report.samples.end(), b.begin(), b.end());
  }

  parallelFor(report.samples.size(), threads, [&](std::size_t i) {
    auto& s = report.samples[i];
    s.xDist = std::abs(s.w.x - s.wPrime.x);
    s.tDist = std::abs(s.w.t - s.wPrime.t);
    s.absK = std::abs(kernelValue({s.w, s.wPrime, s.lambda, sigma}, profile, options).value);
    s.decayProduct = s.absK * std::sqrt(s.lambda * s.xDist);
    s.comparability = s.xDist > 0.0 ? std::abs(phaseData(s.w, s.wPrime).drift) / s.xDist
                                    : std::numeric_limits<double>::infinity();
  });

  report.maxDecayV1.assign(lambdas.size(), 0.0);
  report.maxDecayV2.assign(lambdas.size(), 0.0);
  for (const auto& s : report.samples) {
    const auto l = static_cast<std::size_t>(
        std::lower_bound(lambdas.begin(), lambdas.end(), s.lambda) - lambdas.begin());
    if (s.region == RegionLabel::V1) report.maxDecayV1[l] = std::max(report.maxDecayV1[l], s.decayProduct);
    if (s.region == RegionLabel::V2) report.maxDecayV2[l] = std::max(report.maxDecayV2[l], s.decayProduct);
  }
  return report;
}

OscillatoryIntegrand linearPhaseIntegrand() {
  OscillatoryIntegrand f;
  f.name = "linear";
  f.a = 0.0;
  f.b = 1.0;
  f.phase = [](double x) { return x; };
  f.phasePrime = [](double) { return 1.0; };
  f.phasePrime2 = [](double) { return 0.0; };
  f.amplitude = [](double x) { return std::exp(-x * x); };
  f.amplitudePrime = [](double x) { return -2.0 * x * std::exp(-x * x); };
  return f;
}

OscillatoryIntegrand quadraticPhaseIntegrand() {
  OscillatoryIntegrand f;
  f.name = "quadratic";
  f.a = 1.0;
  f.b = 2.0;
  f.phase = [](double x) { return 0.5 * x * x; };
  f.phasePrime = [](double x) { return x; };
  f.phasePrime2 = [](double) { return 1.0; };
  f.amplitude = [](double) { return 1.0; };
  f.amplitudePrime = [](double) { return 0.0; };
  return f;
}

OscillatoryIntegrand stationaryPhaseIntegrand() {
  OscillatoryIntegrand f = quadraticPhaseIntegrand();
  f.name = "stationary";
  f.a = -1.0;
  f.b = 1.0;
  f.amplitude = [](double x) { return std::exp(-x * x); };
  f.amplitudePrime = [](double x) { return -2.0 * x * std::exp(-x * x); };
  return f;
}

cplx oscillatoryIntegral(const OscillatoryIntegrand& f, double lambda, const QuadratureOptions& options) {
  if (!(f.a < f.b)) throw std::invalid_argument("oscillatoryIntegral: need a < b");
  const int base = 2 * options.basePanels;
  const double w = (f.b - f.a) / base;
  const auto phase = [&](double x) { return lambda * f.phase(x); };
  cplx sum = 0.0;
  std::size_t total = 0;
  for (int p = 0; p < base; ++p) {
    const double a = f.a + p * w;
    double slope = 0.0;
    for (int i = 0; i <= 4; ++i) slope = std::max(slope, std::abs(f.phasePrime(a + 0.25 * i * w)));
    const auto n = subPanels(std::abs(lambda) * slope, w, options.maxPanelPhase);
    total += n;
    if (total > options.maxPanels) throw QuadratureError("oscillatoryIntegral: panel budget exceeded");
    sum += gaussPanels(phase, f.amplitude, a, a + w, n);
  }
  return sum;
}

double VanDerCorputReport::maxRatio() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.normalizedRatio);
  return m;
}

double VanDerCorputReport::minRatio() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::min(m, r.normalizedRatio);
  return m;
}

VanDerCorputReport vanDerCorputCheck(const OscillatoryIntegrand& f, std::span<const double> lambdas,
                                     int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("vanDerCorputCheck: order must be 1 or 2");
  const auto& deriv = order == 1 ? f.phasePrime : f.phasePrime2;
  double prev = 0.0;
  int trend = 0;
  for (std::size_t i = 0; i < kHypothesisSamples; ++i) {
    const double x = f.a + (f.b - f.a) * (static_cast<double>(i) + 0.5) / kHypothesisSamples;
    const double d = deriv(x);
    if (std::abs(d) < 1.0 - 1e-12)
      throw HypothesisError("vanDerCorputCheck(" + f.name + "): |phi^(" + std::to_string(order) +
                            ")| = " + formatReal(std::abs(d)) + " < 1 at x=" + formatReal(x));
    if (order == 1 && i > 0) {
      const int s = d > prev ? 1 : (d < prev ? -1 : 0);
      if (s != 0 && trend != 0 && s != trend)
        throw HypothesisError("vanDerCorputCheck(" + f.name + "): phi' not monotone");
      if (s != 0) trend = s;
    }
    prev = d;
  }

  const double variation =
      compositeGauss(gauss20(), [&](double x) { return std::abs(f.amplitudePrime(x)); }, f.a, f.b, 256);
  double supAmp = 0.0;
  for (int i = 0; i <= 4096; ++i) supAmp = std::max(supAmp, std::abs(f.amplitude(f.a + (f.b - f.a) * i / 4096.0)));
  const double scale = variation + supAmp;

  VanDerCorputReport report;
  report.order = order;
  for (double lambda : lambdas) {
    VanDerCorputRow row;
    row.lambda = lambda;
    row.absIntegral = std::abs(oscillatoryIntegral(f, lambda));
    row.normalizedRatio = row.absIntegral * std::pow(lambda, 1.0 / order) / scale;
    report.rows.push_back(row);
  }
  return report;
}

BilinearCheck hlsBilinearCheck(const SpaceTimeField& g, const SpaceTimeField& h, double q) {
  if (!(q >= 1.0 && q <= 4.0)) throw std::invalid_argument("hlsBilinearCheck: q in [1, 4]");
  if (g.nx != h.nx || g.nx == 0 || g.nt == 0 || h.nt == 0 || g.values.size() != g.nx * g.nt ||
      h.values.size() != h.nx * h.nt)
    throw std::invalid_argument("hlsBilinearCheck: fields must share the x grid");
  const std::size_t nx = g.nx;
  const double hx = 2.0 / static_cast<double>(nx);
  const auto timeIntegral = [&](const SpaceTimeField& f) {
    std::vector<double> out(nx, 0.0);
    const double ht = 2.0 / static_cast<double>(f.nt);
    for (std::size_t i = 0; i < nx; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < f.nt; ++j) s += std::abs(f.at(i, j));
      out[i] = s * ht;
    }
    return out;
  };
  const auto G = timeIntegral(g);
  const auto H = timeIntegral(h);

  BilinearCheck out;
  double lhs = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    if (G[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < nx; ++j)
      if (j != i) row += H[j] / std::sqrt(std::abs(g.x(i) - g.x(j)));
    lhs += G[i] * row;
  }
  out.lhs = lhs * hx * hx;

  const auto mixedNorm = [&](const std::vector<double>& F) {
    if (q == 1.0) return *std::max_element(F.begin(), F.end());
    const double qp = q / (q - 1.0);
    double s = 0.0;
    for (double v : F) s += std::pow(v, qp);
    return std::pow(s * hx, 1.0 / qp);
  };
  out.rhs = mixedNorm(G) * mixedNorm(H);
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

}  // namespace dlab
