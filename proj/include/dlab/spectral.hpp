#pragma once

// Periodic spectral machinery on [-L, L): the Fourier transform convention
//
//   coeff(xi_j) = h * sum_n f(x_n) exp(-i x_n xi_j),     xi_j = pi j / L,
//   f(x_n)      = (1 / 2pi) * sum_j coeff_j exp(i x_n xi_j) * dxi,
//
// with h = 2L/N and dxi = pi/L, which is the trapezoidal discretization of
// the continuous pair f^(xi) = int e^{-ix xi} f dx, f = (1/2pi) int e^{ix xi} f^ dxi.
// The real line is replaced by the torus of length 2L.

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dlab {

using cplx = std::complex<double>;

/// The symbol Phi in exp(i(x xi + t Phi(xi))) together with its first two
/// derivatives. Power profiles Phi(xi) = |xi|^a are the fractional
/// Schrodinger case.
class DispersionProfile {
 public:
  enum class Kind { power, custom };
  using Fn = std::function<double(double)>;

  static DispersionProfile power(double a);
  static DispersionProfile custom(std::string name, Fn phi, Fn phiPrime, Fn phiPrime2);

  Kind kind() const { return kind_; }
  /// Exponent for power profiles, NaN for custom ones.
  double exponent() const { return exponent_; }
  const std::string& name() const { return name_; }

  double phi(double xi) const;
  double phiPrime(double xi) const;
  double phiPrime2(double xi) const;

  /// sup of |Phi| over [-xiMax, xiMax].
  double supAbs(double xiMax) const;

 private:
  DispersionProfile() = default;

  Kind kind_ = Kind::power;
  double exponent_ = 2.0;
  std::string name_;
  Fn phi_, phiPrime_, phiPrime2_;
};

/// Complex samples on the uniform periodic grid x_n = -L + n h, n < N.
class SampledSignal {
 public:
  SampledSignal(double halfWidth, std::vector<cplx> values);

  static SampledSignal sample(double halfWidth, std::size_t n,
                              const std::function<cplx(double)>& f);

  double halfWidth() const { return halfWidth_; }
  std::size_t size() const { return values_.size(); }
  double gridStep() const { return 2.0 * halfWidth_ / static_cast<double>(values_.size()); }
  double x(std::size_t n) const { return -halfWidth_ + static_cast<double>(n) * gridStep(); }

  std::span<const cplx> values() const { return values_; }
  cplx operator[](std::size_t n) const { return values_[n]; }

  /// L^2(-L, L) norm by the rectangle rule.
  double l2Norm() const;

 private:
  double halfWidth_;
  std::vector<cplx> values_;
};

/// Spectrum on xi_j = pi j / L, j = -N/2 .. N/2-1, stored in ascending
/// frequency order (index i holds j = i - N/2).
class SpectralCoefficients {
 public:
  SpectralCoefficients(double halfWidth, std::vector<cplx> coeffs);

  double halfWidth() const { return halfWidth_; }
  std::size_t size() const { return coeffs_.size(); }
  double frequencyStep() const;
  double frequency(std::size_t i) const;
  /// Largest representable |xi|, i.e. pi N / (2L).
  double nyquist() const;

  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  cplx operator[](std::size_t i) const { return coeffs_[i]; }

  /// Index of the grid frequency closest to xi.
  std::size_t indexOf(double xi) const;

  /// Largest |xi_j| whose coefficient exceeds relTol * max|coeff|, 0 for a
  /// zero spectrum.
  double spectralExtent(double relTol = 1e-13) const;

 private:
  double halfWidth_;
  std::vector<cplx> coeffs_;
};

/// Throws std::invalid_argument unless n >= 2 is a power of two.
void requirePowerOfTwo(std::size_t n);

SpectralCoefficients forwardTransform(const SampledSignal& f);
SampledSignal inverseTransform(const SpectralCoefficients& c);

/// Spectrum multiplied pointwise by m(xi_j).
SpectralCoefficients applyMultiplier(const SpectralCoefficients& c,
                                     const std::function<cplx(double)>& m);
SampledSignal applyMultiplier(const SampledSignal& f, const std::function<cplx(double)>& m);

/// Zero-pads (or returns unchanged) the spectrum to n >= c.size() modes.
SpectralCoefficients zeroPad(const SpectralCoefficients& c, std::size_t n);

/// S_t f: spectrum multiplied by exp(i t Phi(xi)). |t| > 1 is accepted but
/// reported once on std::clog.
SampledSignal evolve(const SampledSignal& f, double t, const DispersionProfile& profile);
SpectralCoefficients evolve(const SpectralCoefficients& c, double t,
                            const DispersionProfile& profile);

/// ||(1 - Delta)^{s/2} f||_2 evaluated on the spectrum.
double sobolevNorm(const SampledSignal& f, double s);
double sobolevNorm(const SpectralCoefficients& c, double s);

/// Margin added to s + 1/2 in the decay exponent of makeSobolevData.
inline constexpr double kSobolevMargin = 0.01;

/// Random-phase data with |coeff(xi)| = (1 + xi^2)^{-(s + 1/2 + margin)/2}.
SampledSignal makeSobolevData(double s, std::uint64_t seed, double halfWidth, std::size_t n);

struct DispersionCheck {
  double c1 = 0.0;
  double c2 = 0.0;
  bool signChangePositive = false;
  bool signChangeNegative = false;

  bool conforming() const;
  std::string diagnosis() const;
};

/// Sampled lower constants for |xi||Phi''| >= C1 and |xi||Phi''| >= C2|Phi'|
/// on +-[1, xiMax] (log-spaced, nSamples per half-line).
DispersionCheck checkDispersionConditions(const DispersionProfile& profile, double xiMax,
                                          std::size_t nSamples);

/// Throws HypothesisError when the sampled check fails.
DispersionCheck requireConforming(const DispersionProfile& profile, double xiMax,
                                  std::size_t nSamples);

// CSV: `x,re,im` for signals, `xi,re,im` for spectra.
void writeSignalCsv(std::ostream& os, const SampledSignal& f);
void writeSpectrumCsv(std::ostream& os, const SpectralCoefficients& c);

}  // namespace dlab
