#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace dlab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double v, double slack = 0.0) const { return v >= lo - slack && v <= hi + slack; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Compact direction set Theta inside [-1, 1].
class DirectionSet {
 public:
  struct Points {
    std::vector<double> values;
  };
  struct Intervals {
    std::vector<Interval> parts;
  };
  /// Self-similar set with `pieces` equally spaced copies scaled by `ratio`,
  /// truncated at `depth` levels.
  struct Cantor {
    int pieces = 2;
    double ratio = 1.0 / 3.0;
    int depth = 1;
    Interval anchor{0.0, 1.0};
  };
  using Variant = std::variant<Points, Intervals, Cantor>;

  static DirectionSet makePoints(std::vector<double> values);
  static DirectionSet makeIntervals(std::vector<Interval> parts);
  static DirectionSet makeCantor(int pieces, double ratio, int depth, Interval anchor = {0.0, 1.0});

  /// Parses `point:0`, `points:0,0.5,1`, `interval:0,1`, `cantor:m,r,depth`
  /// (ratio may be written as p/q). Throws ConfigError on bad input.
  static DirectionSet parse(const std::string& spec);

  const Variant& variant() const { return variant_; }

  /// Closed intervals (degenerate for points) in increasing order. Cantor
  /// sets expand to pieces^depth intervals.
  std::vector<Interval> components() const;

  /// Smallest closed interval containing the set.
  Interval hull() const;

  /// Exact Minkowski dimension for the self-similar variants (0 for points,
  /// 1 for nondegenerate intervals, log m / log(1/r) for Cantor sets).
  double analyticDimension() const;

  std::string describe() const;

 private:
  explicit DirectionSet(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

/// Upper bound on the Cantor expansion size.
inline constexpr std::size_t kMaxComponents = std::size_t{1} << 22;

/// N(Theta, delta): minimal number of closed length-delta intervals covering
/// Theta, by the left-to-right greedy sweep.
std::size_t boxCount(const DirectionSet& theta, double delta);

struct DimensionEstimate {
  double beta = 0.0;
  double fitResidual = 0.0;
  std::vector<double> deltas;
  std::vector<std::size_t> counts;
};

/// Least-squares slope of log N(Theta, delta) against log(1/delta) over
/// nScales log-spaced deltas in [deltaMin, deltaMax].
DimensionEstimate estimateMinkowskiDim(const DirectionSet& theta, double deltaMin, double deltaMax,
                                       int nScales);

struct CoverResult {
  std::vector<Interval> intervals;
  double width = 0.0;

  std::size_t count() const { return intervals.size(); }
};

/// Greedy cover by closed intervals of width lambda^{-sigma}.
CoverResult coverSet(const DirectionSet& theta, double lambda, double sigma);

/// Each cover interval shrunk to the hull of its intersection with Theta.
CoverResult tightenCover(const CoverResult& cover, const DirectionSet& theta);

}  // namespace dlab
