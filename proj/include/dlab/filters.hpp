#pragma once

#include <iosfwd>
#include <vector>

#include "dlab/spectral.hpp"

namespace dlab {

/// C-infinity step: 0 for u <= -1, 1 for u >= 1, the normalized primitive of
/// exp(-1/(1-u^2)) in between. Tabulated once as piecewise Chebyshev series.
double smoothStep(double u);

/// Smooth dyadic partition of unity
///
///   psi0(xi) + sum_{k>=1} psi_k(xi) = 1,   psi_k = psi(. / 2^{k-1}),
///
/// built as psi(xi) = chi(xi/2) - chi(xi) from a single cutoff chi = psi0,
/// so the partition identity telescopes exactly.
class DyadicFilterBank {
 public:
  explicit DyadicFilterBank(int maxBand);

  int maxBand() const { return maxBand_; }

  /// Supported in (-1, 1), identically 1 on [-1/2, 1/2].
  static double psi0(double xi);
  /// Supported in (-2, -1/2) u (1/2, 2).
  static double psi(double xi);
  /// Supported in (-4, -1/4) u (1/4, 4), identically 1 on [1/2, 2] in |xi|.
  static double psiWide(double xi);

  /// psi_k for k >= 1, psi0 for k = 0. Zero for k > maxBand.
  double psiK(int k, double xi) const;
  double psiWideK(int k, double xi) const;

  /// int psi^2 over the real line.
  double psiSquaredMass() const { return psiSquaredMass_; }

  /// Dump `xi,psi0,psi1,...,psiK` on a uniform frequency grid.
  void writeCsv(std::ostream& os, double xiMax, std::size_t samples) const;

 private:
  int maxBand_;
  double psiSquaredMass_;
};

/// Upper edge of the frequency support of psi_k (2^k, or 1 for k = 0).
double bandUpperEdge(int k);

/// P_k f. Throws ResolutionError when the shell reaches past the grid
/// Nyquist frequency.
SampledSignal project(const SampledSignal& f, int k, const DyadicFilterBank& bank);
SpectralCoefficients project(const SpectralCoefficients& c, int k, const DyadicFilterBank& bank);

/// P~_k f with the wide multiplier psiWide(. / 2^{k-1}).
SampledSignal projectWide(const SampledSignal& f, int k, const DyadicFilterBank& bank);
SpectralCoefficients projectWide(const SpectralCoefficients& c, int k,
                                 const DyadicFilterBank& bank);

}  // namespace dlab
