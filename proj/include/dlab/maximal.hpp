#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dlab/directions.hpp"
#include "dlab/filters.hpp"
#include "dlab/spectral.hpp"

namespace dlab {

/// Sampling of the (x, t, theta) domain of the maximal scan.
///
/// Resolution rule for a band limit xiMax: t-step <= (1/4)/sup_{|xi|<=xiMax}|Phi|,
/// theta-step <= (1/4)/xiMax, evaluation-lattice step <= (1/4)/xiMax.
struct MaximalGridSpec {
  std::size_t xCount = 256;      ///< output samples in I = (-1, 1)
  std::size_t tCount = 257;      ///< samples of [-timeHorizon, timeHorizon]; odd
  std::size_t thetaCount = 2;    ///< samples per nondegenerate component of Theta
  double timeHorizon = 1.0;

  /// Smallest conforming grid for the given band limit.
  static MaximalGridSpec forBand(double xiMax, const DispersionProfile& profile,
                                 const DirectionSet& theta, double timeHorizon = 1.0);
};

/// Throws ResolutionError if `grid` violates the resolution rule at xiMax.
void checkResolution(const MaximalGridSpec& grid, double xiMax, const DispersionProfile& profile,
                     const DirectionSet& theta);

struct MaximalResult {
  std::vector<double> xs;        ///< output abscissae (lattice points in I)
  std::vector<double> values;    ///< M_Theta f at xs
  std::vector<double> argT;      ///< maximizing time per x
  std::vector<double> argTheta;  ///< maximizing direction per x
  std::vector<double> argY;      ///< snapped evaluation point x + t theta
};

/// M_Theta f on the x-grid: max over the (t, theta) grid of |S_t f(x + t theta)|,
/// one spectral synthesis per t-slice with x + t theta snapped to the
/// evaluation lattice. `threads` = 0 uses all hardware threads; results are
/// bit-identical for every thread count.
MaximalResult maximalFunction(const SampledSignal& f, const DirectionSet& theta,
                              const MaximalGridSpec& grid, const DispersionProfile& profile,
                              unsigned threads = 1);
MaximalResult maximalFunction(const SpectralCoefficients& c, const DirectionSet& theta,
                              const MaximalGridSpec& grid, const DispersionProfile& profile,
                              unsigned threads = 1);

/// Shared slice engine behind the maximal scan and the convergence
/// experiment: evaluates S_t f for each t of the grid on the window of the
/// evaluation lattice reachable as x + t theta, by a chirp-z transform over
/// the occupied modes.
class SpaceTimeScan {
 public:
  struct Offset {
    std::ptrdiff_t shift;  ///< lattice shift round(t theta / h)
    double theta;          ///< first direction producing the shift
  };
  /// Visitor called once per time slice with the worker id, time index,
  /// synthesized window (entry k is lattice point windowOrigin() + k) and
  /// the distinct direction shifts.
  using SliceVisitor = std::function<void(unsigned worker, std::size_t tIndex,
                                          std::span<const cplx> field,
                                          std::span<const Offset> offsets)>;

  SpaceTimeScan(const SpectralCoefficients& c, const DirectionSet& theta,
                const MaximalGridSpec& grid, const DispersionProfile& profile);

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& thetas() const { return thetas_; }
  /// Lattice indices of the output abscissae.
  const std::vector<std::ptrdiff_t>& xIndices() const { return xIndices_; }
  std::vector<double> xs() const;
  std::size_t latticeSize() const { return latticeSize_; }
  double latticeStep() const { return 2.0 * halfWidth_ / static_cast<double>(latticeSize_); }
  double latticeX(std::ptrdiff_t index) const;
  std::ptrdiff_t windowOrigin() const { return windowOrigin_; }
  std::size_t windowSize() const { return windowSize_; }
  /// Initial datum on the window.
  std::vector<cplx> initialField() const;

  /// Returns the number of workers used.
  unsigned run(unsigned threads, const SliceVisitor& visit) const;

 private:
  struct Chirp;
  Chirp makeChirp() const;

  double halfWidth_ = 1.0;
  std::size_t latticeSize_ = 0;
  std::ptrdiff_t windowOrigin_ = 0;
  std::size_t windowSize_ = 0;
  const DispersionProfile* profile_;
  std::vector<double> times_;
  std::vector<double> thetas_;
  std::vector<std::ptrdiff_t> xIndices_;
  std::ptrdiff_t firstMode_ = 0;   ///< signed index j of the first occupied mode
  std::vector<cplx> amplitudes_;   ///< c_j for j = firstMode_ + m
  std::vector<double> phis_;       ///< Phi(xi_j)
};

/// Riemann-sum L^q(-1, 1) norm of samples on the midpoint grid of I.
double lqNorm(std::span<const double> g, double q);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

/// Ordinary least squares of log2(value) against k.
ScalingFit fitScalingExponent(std::span<const std::pair<double, double>> pairs);

struct NormEstimate {
  enum class Method { randomFamily, alternatingMax };

  int k = 0;
  double q = 2.0;
  double sigma = 0.5;
  Interval omega;
  double value = 0.0;
  Method method = Method::alternatingMax;
  int trials = 0;
  std::uint64_t seed = 0;
  /// Best ratio per trial (value is their maximum).
  std::vector<double> trialValues;
};

struct NormEstimateOptions {
  /// Minimum box half-width; widened to 1.25 sup|Phi'| + 2 on the shell.
  double halfWidth = 32.0;
  int rounds = 20;
  NormEstimate::Method method = NormEstimate::Method::alternatingMax;
  unsigned threads = 1;
  /// Permits bands whose t-grid exceeds the k = 6, a = 2 desk-scale size.
  bool allowLargeBand = false;
};

/// Certified lower bound on ||M_Omega P_k||_{L^2 -> L^q(I)}: the best ratio
/// ||M_Omega P_k f||_q / ||f||_2 over seeded random shell data, each start
/// optionally refined by alternating maximization.
NormEstimate estimateOperatorNorm(int k, Interval omega, double q, double sigma,
                                  const DispersionProfile& profile, int trials, std::uint64_t seed,
                                  const NormEstimateOptions& options = {});

/// Ratio ||M_Theta P_0 f||_q / int psi0 |f^|.
double lowFrequencyCheck(const SampledSignal& f, const DirectionSet& theta,
                         const MaximalGridSpec& grid, const DispersionProfile& profile,
                         const DyadicFilterBank& bank, double q = 2.0, unsigned threads = 1);

/// splitmix64 mixing used to derive per-task seeds.
std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace dlab
