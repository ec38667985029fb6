#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dlab/directions.hpp"
#include "dlab/kernel.hpp"
#include "dlab/maximal.hpp"
#include "dlab/spectral.hpp"
#include "dlab/table.hpp"

namespace dlab {

/// Parameters shared by all experiment drivers. Keys of the config file are
/// the snake_case field names; lists are comma separated and reals may be
/// written as p/q or 2^e.
struct ExperimentConfig {
  double a = 2.0;                    ///< power profile |xi|^a
  std::string theta = "point:0";     ///< direction set spec
  double q = 2.0;
  double sigma = 0.5;                ///< defaults to q/4 when q is set alone
  int kMin = 2;
  int kMax = 6;
  int trials = 2;
  int rounds = 20;
  double halfWidth = 32.0;
  std::size_t gridSize = 1024;       ///< samples of the convergence datum
  std::vector<double> sList;         ///< empty: (beta + 1)/4 + 1/2
  std::vector<double> scales{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  int lambdaMinExp = 4;
  int lambdaMaxExp = 10;
  std::size_t samplesPerRegion = 200;
  double deltaMin = 1.0 / 19683.0;   ///< 3^-9
  double deltaMax = 1.0 / 9.0;       ///< 3^-2
  int nScales = 15;
  bool allowLargeK = false;          ///< lift the desk-scale band cap
  std::uint64_t seed = 1;
  std::string outDir = ".";
  unsigned threads = 1;

  DispersionProfile profile() const;
  DirectionSet directions() const;
  /// Canonical key=value rendering; its hash is the provenance config hash.
  std::string canonical() const;
  std::string hash() const;
  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Parses key=value lines with `#` comments. Unknown keys and malformed
/// values raise ConfigError naming the line.
ExperimentConfig parseConfig(const std::string& text);
ExperimentConfig loadConfig(const std::filesystem::path& path);
/// Applies one key=value assignment (used by the CLI overrides).
void applySetting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Per-k maximum over the cover pieces of the operator norm lower bound and
/// the fitted growth exponent (notes fit_slope, fit_intercept,
/// fit_residual, envelope_constant).
ResultTable runScalingExperiment(const ExperimentConfig& cfg);

/// E(r) = median over x in I of sup_{|t| <= r, theta in Theta} |S_t f(x + t theta) - f(x)|
/// for Sobolev data f of each regularity s.
ResultTable runConvergenceExperiment(const ExperimentConfig& cfg, std::vector<double> sList,
                                     std::vector<double> scales);
ResultTable runConvergenceExperiment(const ExperimentConfig& cfg);

/// Kernel decay scan over lambda = 2^lambdaMinExp .. 2^lambdaMaxExp.
ResultTable runKernelScan(const ExperimentConfig& cfg);
ResultTable kernelScanTable(const DecayReport& report);

/// Box counts of Theta over [deltaMin, deltaMax] with the fitted dimension.
ResultTable runDimensionReport(const ExperimentConfig& cfg);

/// Provenance block shared by every driver.
Provenance makeProvenance(const ExperimentConfig& cfg);

struct PlotSpec {
  std::string xColumn;
  std::string yColumn;
  bool logX = false;
  bool logY = false;
  std::string title;
};

/// Writes a gnuplot script plotting `spec.yColumn` against `spec.xColumn`
/// from the CSV file `csvName` (resolved relative to the script).
void emitPlotScript(const ResultTable& table, const std::string& csvName, const PlotSpec& spec,
                    const std::filesystem::path& path);

}  // namespace dlab
