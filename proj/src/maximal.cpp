#include "dlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "dlab/errors.hpp"
#include "dlab/fft.hpp"
#include "dlab/parallel.hpp"
#include "dlab/table.hpp"

namespace dlab {

namespace {

constexpr double kPhaseQuantum = 0.25;
constexpr double kRuleTolerance = 1e-12;
constexpr double kWrapMargin = 1.25;
// Time slices of the a=2, k=6 scan.
constexpr std::size_t kDeskSlices = (std::size_t{1} << 15) + 1;

unsigned effectiveThreads(std::size_t n, unsigned threads) {
  if (threads == 0) threads = defaultThreads();
  return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
}

std::vector<double> thetaSamples(const DirectionSet& theta, std::size_t perComponent) {
  std::vector<double> out;
  for (const auto& part : theta.components()) {
    if (part.length() <= 0.0 || perComponent < 2) {
      out.push_back(part.lo);
      continue;
    }
    for (std::size_t i = 0; i < perComponent; ++i)
      out.push_back(part.lo + part.length() * static_cast<double>(i) / static_cast<double>(perComponent - 1));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double maxComponentLength(const DirectionSet& theta) {
  double m = 0.0;
  for (const auto& part : theta.components()) m = std::max(m, part.length());
  return m;
}

}  // namespace

std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Grid and resolution rule

MaximalGridSpec MaximalGridSpec::forBand(double xiMax, const DispersionProfile& profile,
                                         const DirectionSet& theta, double timeHorizon) {
  if (!(timeHorizon > 0.0)) throw std::invalid_argument("forBand: time horizon must be positive");
  MaximalGridSpec g;
  g.timeHorizon = timeHorizon;
  const double supPhi = profile.supAbs(xiMax);
  const double halfSlices = supPhi > 0.0 ? std::ceil(timeHorizon * supPhi / kPhaseQuantum) : 1.0;
  g.tCount = 2 * static_cast<std::size_t>(std::max(1.0, halfSlices)) + 1;
  const double len = maxComponentLength(theta);
  g.thetaCount = len > 0.0 ? static_cast<std::size_t>(std::ceil(len * xiMax / kPhaseQuantum)) + 1 : 1;
  g.thetaCount = std::max<std::size_t>(g.thetaCount, 2);
  g.xCount = std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(2.0 * xiMax / kPhaseQuantum)));
  return g;
}

void checkResolution(const MaximalGridSpec& grid, double xiMax, const DispersionProfile& profile,
                     const DirectionSet& theta) {
  if (grid.tCount % 2 == 0) throw ResolutionError("t-grid must have an odd sample count so t = 0 is included");
  if (grid.xCount == 0) throw ResolutionError("x-grid is empty");
  if (!(grid.timeHorizon > 0.0)) throw ResolutionError("time horizon must be positive");
  if (xiMax <= 0.0) return;
  const double supPhi = profile.supAbs(xiMax);
  if (supPhi > 0.0) {
    const double tStep = grid.tCount > 1 ? 2.0 * grid.timeHorizon / static_cast<double>(grid.tCount - 1)
                                         : std::numeric_limits<double>::infinity();
    const double limit = kPhaseQuantum / supPhi;
    if (tStep > limit * (1.0 + kRuleTolerance))
      throw ResolutionError("t-step " + formatReal(tStep) + " exceeds (1/4)/sup|Phi| = " + formatReal(limit) +
                            " for band limit " + formatReal(xiMax) + " (need tCount >= " +
                            std::to_string(2 * static_cast<std::size_t>(std::ceil(grid.timeHorizon / limit)) + 1) +
                            ")");
  }
  const double len = maxComponentLength(theta);
  if (len > 0.0) {
    const double thetaStep = grid.thetaCount > 1 ? len / static_cast<double>(grid.thetaCount - 1)
                                                 : std::numeric_limits<double>::infinity();
    const double limit = kPhaseQuantum / xiMax;
    if (thetaStep > limit * (1.0 + kRuleTolerance))
      throw ResolutionError("theta-step " + formatReal(thetaStep) + " exceeds (1/4)/xiMax = " + formatReal(limit));
  }
}

// ---------------------------------------------------------------------------
// Slice engine

namespace {

std::ptrdiff_t floorMod(std::ptrdiff_t a, std::ptrdiff_t m) { return ((a % m) + m) % m; }

// exp(2 pi i r / m) for an integer numerator reduced exactly.
cplx unitRoot(std::ptrdiff_t r, std::ptrdiff_t m) {
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(floorMod(r, m)) / static_cast<double>(m));
}

}  // namespace

// Bluestein factors for X_k = sum_m u_m w^{(o+k)(j0+m)}, w = exp(2 pi i / M):
// X_k = post_k * sum_m (u_m pre_m) v_{k-m}, v_n = w^{-n^2/2}.
struct SpaceTimeScan::Chirp {
  std::size_t fftSize = 0;
  std::vector<cplx> pre;
  std::vector<cplx> kernelHat;
  std::vector<cplx> post;
};

SpaceTimeScan::Chirp SpaceTimeScan::makeChirp() const {
  Chirp ch;
  const std::size_t B = amplitudes_.size();
  const std::size_t W = windowSize_;
  const auto M = static_cast<std::ptrdiff_t>(latticeSize_);
  const std::ptrdiff_t o = windowOrigin_;
  const std::ptrdiff_t j0 = firstMode_;
  const double scale = 1.0 / (2.0 * halfWidth_);
  ch.fftSize = 1;
  while (ch.fftSize < B + W - 1) ch.fftSize *= 2;
  const auto P = ch.fftSize;
  // w^{n^2/2} = exp(2 pi i n^2 / (2M)).
  const auto halfSquare = [&](std::ptrdiff_t n) { return unitRoot(floorMod(n * n, 2 * M), 2 * M); };

  ch.pre.resize(B);
  for (std::size_t m = 0; m < B; ++m) {
    const auto mm = static_cast<std::ptrdiff_t>(m);
    const std::ptrdiff_t j = j0 + mm;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    ch.pre[m] = sign * scale * unitRoot(floorMod(o, M) * floorMod(j, M) % M, M) * halfSquare(mm) *
                amplitudes_[m];
  }
  ch.kernelHat.assign(P, cplx(0.0, 0.0));
  for (std::size_t n = 0; n < W; ++n) ch.kernelHat[n] = std::conj(halfSquare(static_cast<std::ptrdiff_t>(n)));
  for (std::size_t n = 1; n < B; ++n) ch.kernelHat[P - n] = std::conj(halfSquare(static_cast<std::ptrdiff_t>(n)));
  FftPlan(P, FftPlan::Direction::forward).execute(ch.kernelHat);
  const double inv = 1.0 / static_cast<double>(P);
  for (auto& v : ch.kernelHat) v *= inv;
  ch.post.resize(W);
  for (std::size_t k = 0; k < W; ++k) {
    const auto kk = static_cast<std::ptrdiff_t>(k);
    ch.post[k] = unitRoot(kk * floorMod(j0, M) % M, M) * halfSquare(kk);
  }
  return ch;
}

SpaceTimeScan::SpaceTimeScan(const SpectralCoefficients& c, const DirectionSet& theta,
                             const MaximalGridSpec& grid, const DispersionProfile& profile)
    : halfWidth_(c.halfWidth()), profile_(&profile) {
  const double xiMax = c.spectralExtent();
  checkResolution(grid, xiMax, profile, theta);

  const double L = c.halfWidth();
  std::size_t n = c.size();
  const double latticeLimit = xiMax > 0.0 ? kPhaseQuantum / xiMax : std::numeric_limits<double>::infinity();
  const double outputSpacing = 2.0 / static_cast<double>(grid.xCount);
  while (2.0 * L / static_cast<double>(n) > std::min(latticeLimit, outputSpacing)) n *= 2;
  latticeSize_ = n;

  const std::size_t half = grid.tCount / 2;
  times_.resize(grid.tCount);
  for (std::size_t j = 0; j < grid.tCount; ++j) {
    const auto offset = static_cast<double>(j) - static_cast<double>(half);
    times_[j] = half == 0 ? 0.0 : grid.timeHorizon * offset / static_cast<double>(half);
  }
  thetas_ = thetaSamples(theta, grid.thetaCount);

  const double h = latticeStep();
  xIndices_.resize(grid.xCount);
  for (std::size_t i = 0; i < grid.xCount; ++i) {
    const double target = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(grid.xCount);
    auto idx = static_cast<std::ptrdiff_t>(std::llround((target + L) / h));
    while (latticeX(idx) <= -1.0) ++idx;
    while (latticeX(idx) >= 1.0) --idx;
    xIndices_[i] = idx;
  }

  std::ptrdiff_t minShift = 0, maxShift = 0;
  for (double t : {-grid.timeHorizon, grid.timeHorizon})
    for (double th : thetas_) {
      const auto s = static_cast<std::ptrdiff_t>(std::llround(t * th / h));
      minShift = std::min(minShift, s);
      maxShift = std::max(maxShift, s);
    }
  const auto [lo, hi] = std::minmax_element(xIndices_.begin(), xIndices_.end());
  windowOrigin_ = *lo + minShift;
  windowSize_ = static_cast<std::size_t>(*hi + maxShift - windowOrigin_ + 1);

  const auto N = static_cast<std::ptrdiff_t>(c.size());
  std::ptrdiff_t first = -1, last = -1;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != cplx(0.0, 0.0)) {
      if (first < 0) first = static_cast<std::ptrdiff_t>(i);
      last = static_cast<std::ptrdiff_t>(i);
    }
  if (first >= 0) {
    firstMode_ = first - N / 2;
    for (auto i = first; i <= last; ++i) {
      amplitudes_.push_back(c[static_cast<std::size_t>(i)]);
      phis_.push_back(profile.phi(c.frequency(static_cast<std::size_t>(i))));
    }
  }
}

double SpaceTimeScan::latticeX(std::ptrdiff_t index) const {
  return -halfWidth_ + static_cast<double>(index) * latticeStep();
}

std::vector<double> SpaceTimeScan::xs() const {
  std::vector<double> out;
  out.reserve(xIndices_.size());
  for (auto idx : xIndices_) out.push_back(latticeX(idx));
  return out;
}

std::vector<cplx> SpaceTimeScan::initialField() const {
  std::vector<cplx> out(windowSize_);
  if (amplitudes_.empty()) return out;
  const auto ch = makeChirp();
  std::vector<cplx> buf(ch.fftSize);
  std::copy(ch.pre.begin(), ch.pre.end(), buf.begin());
  FftPlan(ch.fftSize, FftPlan::Direction::forward).execute(buf);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= ch.kernelHat[i];
  FftPlan(ch.fftSize, FftPlan::Direction::backward).execute(buf);
  for (std::size_t k = 0; k < windowSize_; ++k) out[k] = ch.post[k] * buf[k];
  return out;
}

unsigned SpaceTimeScan::run(unsigned threads, const SliceVisitor& visit) const {
  const unsigned workers = effectiveThreads(times_.size(), threads);
  const std::size_t W = windowSize_;
  const bool empty = amplitudes_.empty();
  const auto ch = empty ? Chirp{} : makeChirp();
  const std::size_t B = amplitudes_.size();

  struct Workspace {
    std::optional<FftPlan> forward, backward;
    std::vector<cplx> buf;
    std::vector<cplx> field;
    std::vector<Offset> offsets;
  };
  std::vector<Workspace> ws(workers);
  const double h = latticeStep();

  parallelForWorkers(times_.size(), workers, [&](unsigned w, std::size_t tIndex) {
    auto& s = ws[w];
    const double t = times_[tIndex];
    s.field.assign(W, cplx(0.0, 0.0));
    if (!empty) {
      if (!s.forward) {
        s.forward.emplace(ch.fftSize, FftPlan::Direction::forward);
        s.backward.emplace(ch.fftSize, FftPlan::Direction::backward);
        s.buf.resize(ch.fftSize);
      }
      auto& buf = s.buf;
      std::fill(buf.begin() + static_cast<std::ptrdiff_t>(B), buf.end(), cplx(0.0, 0.0));
      for (std::size_t m = 0; m < B; ++m)
        buf[m] = t == 0.0 ? ch.pre[m] : ch.pre[m] * std::polar(1.0, t * phis_[m]);
      s.forward->execute(buf);
      for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= ch.kernelHat[i];
      s.backward->execute(buf);
      for (std::size_t k = 0; k < W; ++k) s.field[k] = ch.post[k] * buf[k];
    }

    auto& offsets = s.offsets;
    offsets.clear();
    for (double th : thetas_) {
      const auto shift = static_cast<std::ptrdiff_t>(std::llround(t * th / h));
      if (offsets.empty() || offsets.back().shift != shift) offsets.push_back({shift, th});
    }
    visit(w, tIndex, s.field, offsets);
  });
  return workers;
}

// ---------------------------------------------------------------------------
// Maximal function

MaximalResult maximalFunction(const SpectralCoefficients& c, const DirectionSet& theta,
                              const MaximalGridSpec& grid, const DispersionProfile& profile,
                              unsigned threads) {
  const SpaceTimeScan scan(c, theta, grid, profile);
  const std::size_t nx = grid.xCount;
  const std::ptrdiff_t origin = scan.windowOrigin();
  const unsigned workers = effectiveThreads(scan.times().size(), threads);

  struct Best {
    std::vector<double> value;
    std::vector<std::size_t> tIndex;
    std::vector<double> theta;
    std::vector<std::ptrdiff_t> shift;
  };
  std::vector<Best> best(workers);
  for (auto& b : best) {
    b.value.assign(nx, -1.0);
    b.tIndex.assign(nx, std::numeric_limits<std::size_t>::max());
    b.theta.assign(nx, 0.0);
    b.shift.assign(nx, 0);
  }
  const auto& xIdx = scan.xIndices();

  scan.run(workers, [&](unsigned w, std::size_t tIndex, std::span<const cplx> field,
                        std::span<const SpaceTimeScan::Offset> offsets) {
    auto& b = best[w];
    for (std::size_t i = 0; i < nx; ++i) {
      const auto base = xIdx[i] - origin;
      for (const auto& off : offsets) {
        const double v = std::abs(field[static_cast<std::size_t>(base + off.shift)]);
        if (v > b.value[i]) {
          b.value[i] = v;
          b.tIndex[i] = tIndex;
          b.theta[i] = off.theta;
          b.shift[i] = off.shift;
        }
      }
    }
  });

  // Merge: larger value wins, ties go to the smaller time index.
  Best merged = std::move(best[0]);
  for (unsigned w = 1; w < workers; ++w) {
    for (std::size_t i = 0; i < nx; ++i) {
      const bool better = best[w].value[i] > merged.value[i] ||
                          (best[w].value[i] == merged.value[i] && best[w].tIndex[i] < merged.tIndex[i]);
      if (better) {
        merged.value[i] = best[w].value[i];
        merged.tIndex[i] = best[w].tIndex[i];
        merged.theta[i] = best[w].theta[i];
        merged.shift[i] = best[w].shift[i];
      }
    }
  }

  MaximalResult out;
  out.xs = scan.xs();
  out.values = std::move(merged.value);
  out.argT.resize(nx);
  out.argY.resize(nx);
  out.argTheta = std::move(merged.theta);
  for (std::size_t i = 0; i < nx; ++i) {
    out.argT[i] = scan.times()[merged.tIndex[i]];
    out.argY[i] = scan.latticeX(xIdx[i] + merged.shift[i]);
  }
  return out;
}

MaximalResult maximalFunction(const SampledSignal& f, const DirectionSet& theta,
                              const MaximalGridSpec& grid, const DispersionProfile& profile,
                              unsigned threads) {
  return maximalFunction(forwardTransform(f), theta, grid, profile, threads);
}

double lqNorm(std::span<const double> g, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("lqNorm: q must be in [1, inf)");
  if (g.empty()) return 0.0;
  const double w = 2.0 / static_cast<double>(g.size());
  double s = 0.0;
  for (double v : g) s += std::pow(std::abs(v), q);
  return std::pow(s * w, 1.0 / q);
}

ScalingFit fitScalingExponent(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw std::invalid_argument("fitScalingExponent: need at least 3 pairs");
  std::vector<double> xs, ys;
  for (const auto& [k, v] : pairs) {
    if (!(v > 0.0)) throw std::invalid_argument("fitScalingExponent: values must be positive");
    xs.push_back(k);
    ys.push_back(std::log2(v));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fitScalingExponent: k values must vary");
  ScalingFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

// ---------------------------------------------------------------------------
// Operator norm lower bounds

namespace {

// Shell data: coefficients on the modes where psi_k > 0.
struct Shell {
  double halfWidth;
  std::size_t gridSize;
  std::vector<std::size_t> index;  // into the full spectrum
  std::vector<double> xi;
  std::vector<double> weight;      // psi_k(xi)
  std::vector<double> phi;

  double norm(std::span<const cplx> c) const {
    double s = 0.0;
    for (const auto& v : c) s += std::norm(v);
    return std::sqrt(s / (2.0 * halfWidth));
  }

  SpectralCoefficients projected(std::span<const cplx> c) const {
    std::vector<cplx> full(gridSize);
    for (std::size_t m = 0; m < index.size(); ++m) full[index[m]] = weight[m] * c[m];
    return SpectralCoefficients(halfWidth, std::move(full));
  }
};

Shell makeShell(int k, const DyadicFilterBank& bank, const DispersionProfile& profile, double halfWidth) {
  // Nyquist >= 2^{k+1} so the wide shell is representable as well.
  const double need = std::ldexp(1.0, k + 1);
  std::size_t n = 2;
  while (std::numbers::pi * static_cast<double>(n) / (2.0 * halfWidth) < need) n *= 2;
  Shell s{halfWidth, n, {}, {}, {}, {}};
  const SpectralCoefficients grid(halfWidth, std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = grid.frequency(i);
    const double w = bank.psiK(k, xi);
    if (w <= 0.0) continue;
    s.index.push_back(i);
    s.xi.push_back(xi);
    s.weight.push_back(w);
    s.phi.push_back(profile.phi(xi));
  }
  return s;
}

std::vector<cplx> randomShellData(const Shell& shell, int k, std::mt19937_64& rng, bool packet) {
  std::vector<cplx> c(shell.xi.size());
  std::normal_distribution<double> gauss;
  if (!packet) {
    for (auto& v : c) v = cplx(gauss(rng), gauss(rng));
    return c;
  }
  // Coherent packet: a sub-band of width ~2^{k/2} focused at (x0, t0).
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = std::ldexp(1.0, k - 2) * 1.25;
  const double hi = std::ldexp(1.0, k) * 0.8;
  const double center = (unit(rng) < 0.5 ? -1.0 : 1.0) * (lo + (hi - lo) * unit(rng));
  const double halfBand = std::sqrt(std::ldexp(1.0, k)) * (0.25 + 0.75 * unit(rng));
  const double x0 = 2.0 * unit(rng) - 1.0;
  const double t0 = (2.0 * unit(rng) - 1.0) * std::ldexp(1.0, -k);
  bool any = false;
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (std::abs(shell.xi[m] - center) > halfBand) continue;
    c[m] = std::polar(1.0, -(shell.xi[m] * x0 + t0 * shell.phi[m]));
    any = true;
  }
  if (!any) c[shell.xi.size() / 2] = 1.0;
  return c;
}

// One ascent step for ||A c||_q / ||c|| with A the operator linearized at the
// current argmax: c <- psi * A^* (w |Ac|^{q-2} Ac).
std::vector<cplx> ascentStep(const Shell& shell, const MaximalResult& m, std::span<const cplx> c,
                             double q) {
  const std::size_t nx = m.xs.size();
  const std::size_t modes = c.size();
  const double scale = 1.0 / (2.0 * shell.halfWidth);
  const double w = 2.0 / static_cast<double>(nx);
  std::vector<cplx> u(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    cplx v(0.0, 0.0);
    for (std::size_t j = 0; j < modes; ++j)
      v += shell.weight[j] * c[j] * std::polar(1.0, m.argY[i] * shell.xi[j] + m.argT[i] * shell.phi[j]);
    v *= scale;
    const double mag = std::abs(v);
    u[i] = mag > 0.0 ? w * std::pow(mag, q - 2.0) * v : cplx(0.0, 0.0);
  }
  std::vector<cplx> g(modes);
  for (std::size_t j = 0; j < modes; ++j) {
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < nx; ++i)
      acc += u[i] * std::polar(1.0, -(m.argY[i] * shell.xi[j] + m.argT[i] * shell.phi[j]));
    g[j] = shell.weight[j] * scale * acc;
  }
  return g;
}

}  // namespace

NormEstimate estimateOperatorNorm(int k, Interval omega, double q, double sigma,
                                  const DispersionProfile& profile, int trials, std::uint64_t seed,
                                  const NormEstimateOptions& options) {
  if (k < 1) throw std::invalid_argument("estimateOperatorNorm: k >= 1");
  if (!(q >= 1.0 && q <= 4.0)) throw std::invalid_argument("estimateOperatorNorm: q in [1, 4]");
  if (trials < 1) throw std::invalid_argument("estimateOperatorNorm: trials >= 1");
  const double widthLimit = std::pow(2.0, -sigma * k);
  if (omega.length() > widthLimit * (1.0 + 1e-12) || omega.length() < 0.0)
    throw std::invalid_argument("estimateOperatorNorm: |Omega| = " + formatReal(omega.length()) +
                                " exceeds 2^{-sigma k} = " + formatReal(widthLimit));

  const DyadicFilterBank bank(std::max(k, 1));
  // Box wide enough that no shell packet wraps back into I for |t| <= 1.
  const double edge = bandUpperEdge(k);
  const double speed = std::max(std::abs(profile.phiPrime(edge)), std::abs(profile.phiPrime(-edge)));
  const double halfWidth = std::max(options.halfWidth, kWrapMargin * speed + 2.0);
  const Shell shell = makeShell(k, bank, profile, halfWidth);
  const auto dirs = omega.length() > 0.0 ? DirectionSet::makeIntervals({omega})
                                         : DirectionSet::makePoints({omega.lo});
  const auto grid = MaximalGridSpec::forBand(bandUpperEdge(k), profile, dirs);
  if (grid.tCount > kDeskSlices) {
    if (!options.allowLargeBand)
      throw ConfigError("k=" + std::to_string(k) + " needs " + std::to_string(grid.tCount) +
                        " time slices, beyond the desk-scale cap of " + std::to_string(kDeskSlices) +
                        "; enable large bands explicitly");
    std::clog << "warning: k=" << k << " scans " << grid.tCount << " time slices\n";
  }

  NormEstimate est;
  est.k = k;
  est.q = q;
  est.sigma = sigma;
  est.omega = omega;
  est.method = options.method;
  est.trials = trials;
  est.seed = seed;

  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(mixSeed(seed, static_cast<std::uint64_t>(trial)));
    auto c = randomShellData(shell, k, rng, trial % 2 == 1);
    auto m = maximalFunction(shell.projected(c), dirs, grid, profile, options.threads);
    double ratio = lqNorm(m.values, q) / shell.norm(c);
    double bestRatio = ratio;

    if (options.method == NormEstimate::Method::alternatingMax) {
      for (int round = 0; round < options.rounds; ++round) {
        auto next = ascentStep(shell, m, c, q);
        const double nn = shell.norm(next);
        if (!(nn > 0.0)) break;
        for (auto& v : next) v /= nn;
        auto mNext = maximalFunction(shell.projected(next), dirs, grid, profile, options.threads);
        const double r = lqNorm(mNext.values, q) / shell.norm(next);
        const bool improved = r > bestRatio * (1.0 + 1e-9);
        bestRatio = std::max(bestRatio, r);
        c = std::move(next);
        m = std::move(mNext);
        if (!improved) break;
      }
    }
    est.trialValues.push_back(bestRatio);
    est.value = std::max(est.value, bestRatio);
  }
  return est;
}

double lowFrequencyCheck(const SampledSignal& f, const DirectionSet& theta, const MaximalGridSpec& grid,
                         const DispersionProfile& profile, const DyadicFilterBank& bank, double q,
                         unsigned threads) {
  const auto low = project(forwardTransform(f), 0, bank);
  double mass = 0.0;
  for (std::size_t i = 0; i < low.size(); ++i) mass += std::abs(low[i]);
  mass *= low.frequencyStep();
  if (mass == 0.0) return 0.0;
  const auto m = maximalFunction(low, theta, grid, profile, threads);
  return lqNorm(m.values, q) / mass;
}

}  // namespace dlab
