#include "dlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dlab/errors.hpp"
#include "dlab/fft.hpp"
#include "dlab/table.hpp"

namespace dlab {

namespace {

constexpr double kPi = std::numbers::pi;

double signedPow(double xi, double a) {
  if (xi == 0.0) return 0.0;
  const double m = std::abs(xi);
  if (a == 2.0) return m * m;
  if (a == 3.0) return m * m * m;
  if (a == 1.0) return m;
  return std::exp(a * std::log(m));
}

// (-1)^j for the signed frequency index j.
double parity(std::ptrdiff_t j) { return (j % 2 == 0) ? 1.0 : -1.0; }

std::ptrdiff_t signedIndex(std::size_t i, std::size_t n) {
  return static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(n / 2);
}

std::size_t fftSlot(std::ptrdiff_t j, std::size_t n) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((j % sn) + sn) % sn);
}

}  // namespace

// ---------------------------------------------------------------------------
// DispersionProfile

DispersionProfile DispersionProfile::power(double a) {
  if (!(a > 1.0) || !std::isfinite(a))
    throw std::invalid_argument("power profile needs a > 1");
  DispersionProfile p;
  p.kind_ = Kind::power;
  p.exponent_ = a;
  std::ostringstream name;
  name << "|xi|^" << a;
  p.name_ = name.str();
  return p;
}

DispersionProfile DispersionProfile::custom(std::string name, Fn phi, Fn phiPrime, Fn phiPrime2) {
  if (!phi || !phiPrime || !phiPrime2)
    throw std::invalid_argument("custom profile needs Phi, Phi' and Phi''");
  DispersionProfile p;
  p.kind_ = Kind::custom;
  p.exponent_ = std::numeric_limits<double>::quiet_NaN();
  p.name_ = std::move(name);
  p.phi_ = std::move(phi);
  p.phiPrime_ = std::move(phiPrime);
  p.phiPrime2_ = std::move(phiPrime2);
  return p;
}

double DispersionProfile::phi(double xi) const {
  if (kind_ == Kind::custom) return phi_(xi);
  return signedPow(xi, exponent_);
}

double DispersionProfile::phiPrime(double xi) const {
  if (kind_ == Kind::custom) return phiPrime_(xi);
  if (xi == 0.0) return 0.0;
  const double v = exponent_ * signedPow(xi, exponent_ - 1.0);
  return xi > 0.0 ? v : -v;
}

double DispersionProfile::phiPrime2(double xi) const {
  if (kind_ == Kind::custom) return phiPrime2_(xi);
  // Phi'' at the origin is never sampled; report 0 there.
  if (xi == 0.0) return 0.0;
  return exponent_ * (exponent_ - 1.0) * signedPow(xi, exponent_ - 2.0);
}

double DispersionProfile::supAbs(double xiMax) const {
  if (kind_ == Kind::power) return signedPow(xiMax, exponent_);
  constexpr int kSamples = 4096;
  double m = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double xi = -xiMax + 2.0 * xiMax * i / kSamples;
    m = std::max(m, std::abs(phi_(xi)));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Containers

void requirePowerOfTwo(std::size_t n) {
  if (n < 2 || (n & (n - 1)) != 0)
    throw std::invalid_argument("grid size must be a power of two >= 2, got " +
                                std::to_string(n));
}

SampledSignal::SampledSignal(double halfWidth, std::vector<cplx> values)
    : halfWidth_(halfWidth), values_(std::move(values)) {
  if (!(halfWidth > 0.0) || !std::isfinite(halfWidth))
    throw std::invalid_argument("half width must be positive");
  requirePowerOfTwo(values_.size());
}

SampledSignal SampledSignal::sample(double halfWidth, std::size_t n,
                                    const std::function<cplx(double)>& f) {
  requirePowerOfTwo(n);
  std::vector<cplx> v(n);
  const double h = 2.0 * halfWidth / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f(-halfWidth + static_cast<double>(i) * h);
  return SampledSignal(halfWidth, std::move(v));
}

double SampledSignal::l2Norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s * gridStep());
}

SpectralCoefficients::SpectralCoefficients(double halfWidth, std::vector<cplx> coeffs)
    : halfWidth_(halfWidth), coeffs_(std::move(coeffs)) {
  if (!(halfWidth > 0.0) || !std::isfinite(halfWidth))
    throw std::invalid_argument("half width must be positive");
  requirePowerOfTwo(coeffs_.size());
}

double SpectralCoefficients::frequencyStep() const { return kPi / halfWidth_; }

double SpectralCoefficients::frequency(std::size_t i) const {
  return static_cast<double>(signedIndex(i, coeffs_.size())) * frequencyStep();
}

double SpectralCoefficients::nyquist() const {
  return static_cast<double>(coeffs_.size() / 2) * frequencyStep();
}

std::size_t SpectralCoefficients::indexOf(double xi) const {
  const double j = std::round(xi / frequencyStep());
  const double lo = -static_cast<double>(coeffs_.size() / 2);
  const double hi = static_cast<double>(coeffs_.size() / 2) - 1.0;
  return static_cast<std::size_t>(std::clamp(j, lo, hi) - lo);
}

double SpectralCoefficients::spectralExtent(double relTol) const {
  double peak = 0.0;
  for (const auto& c : coeffs_) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) return 0.0;
  double extent = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (std::abs(coeffs_[i]) > relTol * peak) extent = std::max(extent, std::abs(frequency(i)));
  return extent;
}

// ---------------------------------------------------------------------------
// Transforms

SpectralCoefficients forwardTransform(const SampledSignal& f) {
  const std::size_t n = f.size();
  std::vector<cplx> work(f.values().begin(), f.values().end());
  FftPlan(n, FftPlan::Direction::forward).execute(work);
  std::vector<cplx> out(n);
  const double h = f.gridStep();
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = signedIndex(i, n);
    out[i] = h * parity(j) * work[fftSlot(j, n)];
  }
  return SpectralCoefficients(f.halfWidth(), std::move(out));
}

SampledSignal inverseTransform(const SpectralCoefficients& c) {
  const std::size_t n = c.size();
  std::vector<cplx> work(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = signedIndex(i, n);
    work[fftSlot(j, n)] = parity(j) * c[i];
  }
  FftPlan(n, FftPlan::Direction::backward).execute(work);
  const double scale = 1.0 / (2.0 * c.halfWidth());
  for (auto& v : work) v *= scale;
  return SampledSignal(c.halfWidth(), std::move(work));
}

SpectralCoefficients applyMultiplier(const SpectralCoefficients& c,
                                     const std::function<cplx(double)>& m) {
  std::vector<cplx> out(c.coeffs().begin(), c.coeffs().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= m(c.frequency(i));
  return SpectralCoefficients(c.halfWidth(), std::move(out));
}

SampledSignal applyMultiplier(const SampledSignal& f, const std::function<cplx(double)>& m) {
  return inverseTransform(applyMultiplier(forwardTransform(f), m));
}

SpectralCoefficients zeroPad(const SpectralCoefficients& c, std::size_t n) {
  requirePowerOfTwo(n);
  if (n < c.size()) throw std::invalid_argument("zeroPad: target smaller than input");
  if (n == c.size()) return c;
  std::vector<cplx> out(n);
  const std::size_t offset = n / 2 - c.size() / 2;
  std::copy(c.coeffs().begin(), c.coeffs().end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
  return SpectralCoefficients(c.halfWidth(), std::move(out));
}

SpectralCoefficients evolve(const SpectralCoefficients& c, double t,
                            const DispersionProfile& profile) {
  if (!std::isfinite(t)) throw std::invalid_argument("evolve: time must be finite");
  if (std::abs(t) > 1.0) {
    static std::once_flag warned;
    std::call_once(warned, [] {
      std::clog << "warning: evolving beyond |t| <= 1; maximal estimates only cover [-1, 1]\n";
    });
  }
  if (t == 0.0) return c;
  return applyMultiplier(c, [&](double xi) { return std::polar(1.0, t * profile.phi(xi)); });
}

SampledSignal evolve(const SampledSignal& f, double t, const DispersionProfile& profile) {
  if (!std::isfinite(t)) throw std::invalid_argument("evolve: time must be finite");
  if (t == 0.0) return f;
  return inverseTransform(evolve(forwardTransform(f), t, profile));
}

double sobolevNorm(const SpectralCoefficients& c, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double xi = c.frequency(i);
    acc += std::pow(1.0 + xi * xi, s) * std::norm(c[i]);
  }
  // (1/2pi) * dxi = 1/(2L)
  return std::sqrt(acc / (2.0 * c.halfWidth()));
}

double sobolevNorm(const SampledSignal& f, double s) { return sobolevNorm(forwardTransform(f), s); }

SampledSignal makeSobolevData(double s, std::uint64_t seed, double halfWidth, std::size_t n) {
  if (!(s > 0.0)) throw std::invalid_argument("makeSobolevData: s must be positive");
  requirePowerOfTwo(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::vector<cplx> coeffs(n);
  const double decay = -(s + 0.5 + kSobolevMargin) / 2.0;
  const double dxi = kPi / halfWidth;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = static_cast<double>(signedIndex(i, n)) * dxi;
    coeffs[i] = std::polar(std::pow(1.0 + xi * xi, decay), phase(rng));
  }
  return inverseTransform(SpectralCoefficients(halfWidth, std::move(coeffs)));
}

// ---------------------------------------------------------------------------
// Conditions on Phi

namespace {
constexpr double kConformingTolerance = 1e-9;
}

bool DispersionCheck::conforming() const {
  return c1 > kConformingTolerance && c2 > kConformingTolerance && !signChangePositive &&
         !signChangeNegative;
}

std::string DispersionCheck::diagnosis() const {
  if (conforming()) return "conforming";
  std::ostringstream os;
  os << "nonconforming profile:";
  if (!(c1 > kConformingTolerance)) os << " |xi||Phi''| >= C1 fails (C1 ~ " << c1 << ")";
  if (!(c2 > kConformingTolerance)) os << " |xi||Phi''| >= C2|Phi'| fails (C2 ~ " << c2 << ")";
  if (signChangePositive) os << " Phi'' changes sign on [1, xiMax]";
  if (signChangeNegative) os << " Phi'' changes sign on [-xiMax, -1]";
  return os.str();
}

DispersionCheck checkDispersionConditions(const DispersionProfile& profile, double xiMax,
                                          std::size_t nSamples) {
  if (!(xiMax >= 2.0)) throw std::invalid_argument("checkDispersionConditions: xiMax >= 2");
  if (nSamples < 2) throw std::invalid_argument("checkDispersionConditions: nSamples >= 2");

  DispersionCheck out;
  out.c1 = std::numeric_limits<double>::infinity();
  out.c2 = std::numeric_limits<double>::infinity();
  const double logMax = std::log(xiMax);

  for (const double sign : {1.0, -1.0}) {
    int firstSign = 0;
    bool changed = false;
    for (std::size_t i = 0; i < nSamples; ++i) {
      const double r = std::exp(logMax * static_cast<double>(i) / static_cast<double>(nSamples - 1));
      const double xi = sign * r;
      const double d1 = profile.phiPrime(xi);
      const double d2 = profile.phiPrime2(xi);
      const double lhs = std::abs(xi) * std::abs(d2);
      out.c1 = std::min(out.c1, lhs);
      if (d1 != 0.0) out.c2 = std::min(out.c2, lhs / std::abs(d1));
      const int sg = (d2 > 0.0) - (d2 < 0.0);
      if (sg != 0) {
        if (firstSign == 0) firstSign = sg;
        else if (sg != firstSign) changed = true;
      }
    }
    (sign > 0 ? out.signChangePositive : out.signChangeNegative) = changed;
  }
  if (!std::isfinite(out.c2)) out.c2 = 0.0;
  return out;
}

DispersionCheck requireConforming(const DispersionProfile& profile, double xiMax,
                                  std::size_t nSamples) {
  auto check = checkDispersionConditions(profile, xiMax, nSamples);
  if (!check.conforming()) throw HypothesisError(check.diagnosis());
  return check;
}

// ---------------------------------------------------------------------------
// CSV

void writeSignalCsv(std::ostream& os, const SampledSignal& f) {
  os << "x,re,im\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    os << formatReal(f.x(i)) << ',' << formatReal(f[i].real()) << ',' << formatReal(f[i].imag())
       << '\n';
}

void writeSpectrumCsv(std::ostream& os, const SpectralCoefficients& c) {
  os << "xi,re,im\n";
  for (std::size_t i = 0; i < c.size(); ++i)
    os << formatReal(c.frequency(i)) << ',' << formatReal(c[i].real()) << ','
       << formatReal(c[i].imag()) << '\n';
}

}  // namespace dlab
