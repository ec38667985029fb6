#include "dlab/directions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dlab/errors.hpp"
#include "dlab/table.hpp"

namespace dlab {

namespace {

constexpr double kUnitBound = 1.0 + 1e-12;
// Relative slack on delta absorbing roundoff in endpoint arithmetic.
constexpr double kCoverSlack = 1e-9;

void requireInsideUnit(double v) {
  if (!std::isfinite(v) || std::abs(v) > kUnitBound)
    throw std::invalid_argument("direction " + formatReal(v) + " outside [-1, 1]");
}

std::vector<Interval> mergeTouching(std::vector<Interval> parts) {
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& p : parts) {
    if (!out.empty() && p.lo <= out.back().hi) out.back().hi = std::max(out.back().hi, p.hi);
    else out.push_back(p);
  }
  return out;
}

// Greedy left-to-right sweep; emits the left ends of the cover intervals.
template <class Emit>
std::size_t sweep(const std::vector<Interval>& parts, double width, Emit&& emit) {
  const double slack = kCoverSlack * width;
  double coveredEnd = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (const auto& part : parts) {
    if (part.hi <= coveredEnd + slack) continue;
    const double start = part.lo > coveredEnd + slack ? part.lo : coveredEnd;
    const double span = part.hi - start;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / width - kCoverSlack)));
    for (std::size_t i = 0; i < n; ++i) emit(start + static_cast<double>(i) * width);
    count += n;
    coveredEnd = start + static_cast<double>(n) * width;
  }
  return count;
}

double parseReal(const std::string& text, const std::string& spec) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const double num = std::stod(text.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument("trailing");
      const auto den_text = text.substr(slash + 1);
      const double den = std::stod(den_text, &used);
      if (used != den_text.size() || den == 0.0) throw std::invalid_argument("bad denominator");
      return num / den;
    }
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + text + "' in direction spec '" + spec + "'");
  }
}

std::vector<double> parseList(const std::string& body, const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parseReal(item, spec));
  return out;
}

}  // namespace

DirectionSet DirectionSet::makePoints(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("point set must be nonempty");
  for (double v : values) requireInsideUnit(v);
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end())
    throw std::invalid_argument("point set has duplicates");
  return DirectionSet(Points{std::move(values)});
}

DirectionSet DirectionSet::makeIntervals(std::vector<Interval> parts) {
  if (parts.empty()) throw std::invalid_argument("interval set must be nonempty");
  for (const auto& p : parts) {
    requireInsideUnit(p.lo);
    requireInsideUnit(p.hi);
    if (!(p.lo <= p.hi)) throw std::invalid_argument("interval with lo > hi");
  }
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < parts.size(); ++i)
    if (parts[i].lo <= parts[i - 1].hi) throw std::invalid_argument("intervals overlap");
  return DirectionSet(Intervals{std::move(parts)});
}

DirectionSet DirectionSet::makeCantor(int pieces, double ratio, int depth, Interval anchor) {
  if (pieces < 2) throw std::invalid_argument("Cantor set needs at least 2 pieces");
  if (!(ratio > 0.0) || ratio * pieces > 1.0 + 1e-12)
    throw std::invalid_argument("Cantor ratio must satisfy 0 < r <= 1/m");
  if (depth < 0) throw std::invalid_argument("Cantor depth must be >= 0");
  if (std::pow(static_cast<double>(pieces), depth) > static_cast<double>(kMaxComponents))
    throw std::invalid_argument("Cantor expansion too large");
  requireInsideUnit(anchor.lo);
  requireInsideUnit(anchor.hi);
  if (!(anchor.lo < anchor.hi)) throw std::invalid_argument("Cantor anchor must have positive length");
  return DirectionSet(Cantor{pieces, ratio, depth, anchor});
}

DirectionSet DirectionSet::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("direction spec '" + spec + "' lacks ':'");
  const auto kind = spec.substr(0, colon);
  const auto values = parseList(spec.substr(colon + 1), spec);
  try {
    if (kind == "point") {
      if (values.size() != 1) throw ConfigError("point: takes one value");
      return makePoints(values);
    }
    if (kind == "points") return makePoints(values);
    if (kind == "interval") {
      if (values.size() != 2) throw ConfigError("interval: takes lo,hi");
      return makeIntervals({{values[0], values[1]}});
    }
    if (kind == "cantor") {
      if (values.size() != 3) throw ConfigError("cantor: takes m,r,depth");
      if (values[0] != std::floor(values[0]) || values[2] != std::floor(values[2]))
        throw ConfigError("cantor: m and depth must be integers");
      return makeCantor(static_cast<int>(values[0]), values[1], static_cast<int>(values[2]));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("direction spec '" + spec + "': " + e.what());
  }
  throw ConfigError("unknown direction set kind '" + kind + "'");
}

std::vector<Interval> DirectionSet::components() const {
  if (const auto* p = std::get_if<Points>(&variant_)) {
    std::vector<Interval> out;
    out.reserve(p->values.size());
    for (double v : p->values) out.push_back({v, v});
    return out;
  }
  if (const auto* iv = std::get_if<Intervals>(&variant_)) return iv->parts;

  const auto& c = std::get<Cantor>(variant_);
  const double gap = (1.0 - c.pieces * c.ratio) / (c.pieces - 1);
  const double stride = c.ratio + gap;
  std::vector<double> lefts{0.0};
  double scale = 1.0;
  for (int level = 0; level < c.depth; ++level) {
    std::vector<double> next;
    next.reserve(lefts.size() * static_cast<std::size_t>(c.pieces));
    for (double l : lefts)
      for (int i = 0; i < c.pieces; ++i) next.push_back(l + i * stride * scale);
    lefts = std::move(next);
    scale *= c.ratio;
  }
  const double len = c.anchor.length();
  std::vector<Interval> out;
  out.reserve(lefts.size());
  for (double l : lefts) out.push_back({c.anchor.lo + len * l, c.anchor.lo + len * (l + scale)});
  return out;
}

Interval DirectionSet::hull() const {
  const auto parts = components();
  return {parts.front().lo, parts.back().hi};
}

double DirectionSet::analyticDimension() const {
  if (std::holds_alternative<Points>(variant_)) return 0.0;
  if (const auto* iv = std::get_if<Intervals>(&variant_)) {
    for (const auto& p : iv->parts)
      if (p.length() > 0.0) return 1.0;
    return 0.0;
  }
  const auto& c = std::get<Cantor>(variant_);
  return std::log(static_cast<double>(c.pieces)) / std::log(1.0 / c.ratio);
}

std::string DirectionSet::describe() const {
  std::ostringstream os;
  if (const auto* p = std::get_if<Points>(&variant_)) {
    os << "points:";
    for (std::size_t i = 0; i < p->values.size(); ++i) os << (i ? "," : "") << formatReal(p->values[i]);
  } else if (const auto* iv = std::get_if<Intervals>(&variant_)) {
    os << "intervals:";
    for (std::size_t i = 0; i < iv->parts.size(); ++i)
      os << (i ? ";" : "") << formatReal(iv->parts[i].lo) << ',' << formatReal(iv->parts[i].hi);
  } else {
    const auto& c = std::get<Cantor>(variant_);
    os << "cantor:" << c.pieces << ',' << formatReal(c.ratio) << ',' << c.depth;
  }
  return os.str();
}

std::size_t boxCount(const DirectionSet& theta, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("boxCount: delta must be positive");
  return sweep(mergeTouching(theta.components()), delta, [](double) {});
}

DimensionEstimate estimateMinkowskiDim(const DirectionSet& theta, double deltaMin, double deltaMax,
                                       int nScales) {
  if (!(deltaMin > 0.0) || !(deltaMin < deltaMax) || deltaMax > 1.0)
    throw std::invalid_argument("estimateMinkowskiDim: need 0 < deltaMin < deltaMax <= 1");
  if (nScales < 4) throw std::invalid_argument("estimateMinkowskiDim: nScales >= 4");

  const auto parts = mergeTouching(theta.components());
  DimensionEstimate est;
  std::vector<double> xs, ys;
  const double logMin = std::log(deltaMin), logMax = std::log(deltaMax);
  for (int i = 0; i < nScales; ++i) {
    const double delta = std::exp(logMax + (logMin - logMax) * i / (nScales - 1));
    const auto n = sweep(parts, delta, [](double) {});
    est.deltas.push_back(delta);
    est.counts.push_back(n);
    xs.push_back(-std::log(delta));
    ys.push_back(std::log(static_cast<double>(n)));
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  est.beta = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + est.beta * (xs[i] - mx));
    rss += r * r;
  }
  est.fitResidual = std::sqrt(rss / m);
  return est;
}

CoverResult coverSet(const DirectionSet& theta, double lambda, double sigma) {
  if (!(lambda >= 2.0)) throw std::invalid_argument("coverSet: lambda >= 2");
  if (!(sigma >= 0.25 && sigma <= 1.0)) throw std::invalid_argument("coverSet: sigma in [1/4, 1]");
  CoverResult out;
  out.width = std::pow(lambda, -sigma);
  sweep(mergeTouching(theta.components()), out.width,
        [&](double lo) { out.intervals.push_back({lo, lo + out.width}); });
  return out;
}

CoverResult tightenCover(const CoverResult& cover, const DirectionSet& theta) {
  const auto parts = mergeTouching(theta.components());
  const double slack = kCoverSlack * cover.width;
  CoverResult out;
  out.width = cover.width;
  for (const auto& omega : cover.intervals) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& p : parts) {
      if (p.hi < omega.lo - slack || p.lo > omega.hi + slack) continue;
      lo = std::min(lo, std::clamp(p.lo, omega.lo, omega.hi));
      hi = std::max(hi, std::clamp(p.hi, omega.lo, omega.hi));
    }
    if (lo <= hi) out.intervals.push_back({lo, hi});
  }
  return out;
}

}  // namespace dlab
