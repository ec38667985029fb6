#include "dlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dlab/errors.hpp"
#include "dlab/parallel.hpp"

namespace dlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parseNumber(const std::string& key, const std::string& text) {
  const auto fail = [&] { return ConfigError("bad value '" + text + "' for " + key); };
  const auto plain = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != t.size()) throw fail();
    return v;
  };
  const auto t = trim(text);
  if (const auto caret = t.find('^'); caret != std::string::npos)
    return std::pow(plain(t.substr(0, caret)), plain(t.substr(caret + 1)));
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    const double den = plain(t.substr(slash + 1));
    if (den == 0.0) throw fail();
    return plain(t.substr(0, slash)) / den;
  }
  return plain(t);
}

long long parseInteger(const std::string& key, const std::string& text) {
  const double v = parseNumber(key, text);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError("value for " + key + " must be an integer");
  return static_cast<long long>(v);
}

std::vector<double> parseNumberList(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parseNumber(key, item));
  }
  return out;
}

std::string joinReals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + formatReal(v[i]);
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

DispersionProfile ExperimentConfig::profile() const { return DispersionProfile::power(a); }

DirectionSet ExperimentConfig::directions() const { return DirectionSet::parse(theta); }

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << "a=" << formatReal(a) << '\n'
     << "theta=" << theta << '\n'
     << "q=" << formatReal(q) << '\n'
     << "sigma=" << formatReal(sigma) << '\n'
     << "k_min=" << kMin << '\n'
     << "k_max=" << kMax << '\n'
     << "trials=" << trials << '\n'
     << "rounds=" << rounds << '\n'
     << "half_width=" << formatReal(halfWidth) << '\n'
     << "grid_size=" << gridSize << '\n'
     << "s_list=" << joinReals(sList) << '\n'
     << "scales=" << joinReals(scales) << '\n'
     << "lambda_min_exp=" << lambdaMinExp << '\n'
     << "lambda_max_exp=" << lambdaMaxExp << '\n'
     << "samples_per_region=" << samplesPerRegion << '\n'
     << "delta_min=" << formatReal(deltaMin) << '\n'
     << "delta_max=" << formatReal(deltaMax) << '\n'
     << "n_scales=" << nScales << '\n'
     << "allow_large_k=" << (allowLargeK ? "true" : "false") << '\n'
     << "seed=" << seed << '\n';
  return os.str();
}

std::string ExperimentConfig::hash() const { return stableHash(canonical()); }

void ExperimentConfig::validate() const {
  if (!(a > 1.0) || !std::isfinite(a)) throw ConfigError("a must be > 1");
  if (!(q >= 1.0 && q <= 4.0)) throw ConfigError("q must lie in [1, 4]");
  if (sigma < q / 4.0 - 1e-12) throw ConfigError("sigma below q/4 (need q/4 <= sigma <= 1)");
  if (sigma > 1.0 + 1e-12) throw ConfigError("sigma above 1 (need q/4 <= sigma <= 1)");
  directions();
  if (kMin < 1) throw ConfigError("k_min must be >= 1");
  if (kMax > 30) throw ConfigError("k_max must be <= 30");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (rounds < 0) throw ConfigError("rounds must be >= 0");
  if (!(halfWidth > 2.0)) throw ConfigError("half_width must exceed 2");
  if (gridSize < 16 || (gridSize & (gridSize - 1)) != 0) throw ConfigError("grid_size must be a power of two >= 16");
  for (double s : sList)
    if (!(s > 0.0)) throw ConfigError("s_list entries must be positive");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0 && scales[i] <= 1.0)) throw ConfigError("scales must lie in (0, 1]");
    if (i > 0 && !(scales[i] < scales[i - 1])) throw ConfigError("scales must be strictly descending");
  }
  if (lambdaMinExp < 1 || lambdaMinExp > lambdaMaxExp || lambdaMaxExp > 20)
    throw ConfigError("need 1 <= lambda_min_exp <= lambda_max_exp <= 20");
  if (samplesPerRegion < 1) throw ConfigError("samples_per_region must be >= 1");
  if (!(deltaMin > 0.0 && deltaMin < deltaMax && deltaMax <= 1.0))
    throw ConfigError("need 0 < delta_min < delta_max <= 1");
  if (nScales < 4) throw ConfigError("n_scales must be >= 4");
}

void applySetting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto v = trim(value);
  if (key == "a") cfg.a = parseNumber(key, v);
  else if (key == "theta") cfg.theta = v;
  else if (key == "q") cfg.q = parseNumber(key, v);
  else if (key == "sigma") cfg.sigma = parseNumber(key, v);
  else if (key == "k_min") cfg.kMin = static_cast<int>(parseInteger(key, v));
  else if (key == "k_max") cfg.kMax = static_cast<int>(parseInteger(key, v));
  else if (key == "trials") cfg.trials = static_cast<int>(parseInteger(key, v));
  else if (key == "rounds") cfg.rounds = static_cast<int>(parseInteger(key, v));
  else if (key == "half_width") cfg.halfWidth = parseNumber(key, v);
  else if (key == "grid_size") {
    const auto n = parseInteger(key, v);
    if (n < 0) throw ConfigError("grid_size must be positive");
    cfg.gridSize = static_cast<std::size_t>(n);
  } else if (key == "s_list") cfg.sList = parseNumberList(key, v);
  else if (key == "scales") cfg.scales = parseNumberList(key, v);
  else if (key == "lambda_min_exp") cfg.lambdaMinExp = static_cast<int>(parseInteger(key, v));
  else if (key == "lambda_max_exp") cfg.lambdaMaxExp = static_cast<int>(parseInteger(key, v));
  else if (key == "samples_per_region") {
    const auto n = parseInteger(key, v);
    if (n < 1) throw ConfigError("samples_per_region must be >= 1");
    cfg.samplesPerRegion = static_cast<std::size_t>(n);
  } else if (key == "delta_min") cfg.deltaMin = parseNumber(key, v);
  else if (key == "delta_max") cfg.deltaMax = parseNumber(key, v);
  else if (key == "n_scales") cfg.nScales = static_cast<int>(parseInteger(key, v));
  else if (key == "seed") {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(v, &used);
      if (used != v.size() || v.front() == '-') throw std::invalid_argument("seed");
    } catch (const std::exception&) {
      throw ConfigError("bad value '" + v + "' for seed");
    }
  } else if (key == "allow_large_k") {
    if (v == "true" || v == "1") cfg.allowLargeK = true;
    else if (v == "false" || v == "0") cfg.allowLargeK = false;
    else throw ConfigError("allow_large_k must be true or false");
  } else if (key == "out_dir") cfg.outDir = v;
  else if (key == "threads") {
    const auto n = parseInteger(key, v);
    if (n < 0) throw ConfigError("threads must be >= 0");
    cfg.threads = static_cast<unsigned>(n);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

ExperimentConfig parseConfig(const std::string& text) {
  ExperimentConfig cfg;
  bool sigmaSet = false;
  std::istringstream is(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineNo) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    try {
      applySetting(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineNo) + ": " + e.what());
    }
    sigmaSet = sigmaSet || key == "sigma";
  }
  if (!sigmaSet) cfg.sigma = cfg.q / 4.0;
  cfg.validate();
  return cfg;
}

ExperimentConfig loadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseConfig(ss.str());
}

Provenance makeProvenance(const ExperimentConfig& cfg) {
  Provenance p;
  p.configHash = cfg.hash();
  p.seed = cfg.seed;
  return p;
}

ResultTable runScalingExperiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kMin > cfg.kMax) throw ConfigError("empty experiment: k_min > k_max");
  const auto theta = cfg.directions();
  const auto profile = cfg.profile();

  struct Item {
    int k;
    Interval omega;
    std::size_t piece;
  };
  std::vector<Item> items;
  std::vector<double> widths;
  for (int k = cfg.kMin; k <= cfg.kMax; ++k) {
    const double lambda = std::ldexp(1.0, k);
    const auto cover = tightenCover(coverSet(theta, lambda, cfg.sigma), theta);
    widths.push_back(cover.width);
    for (std::size_t j = 0; j < cover.intervals.size(); ++j) items.push_back({k, cover.intervals[j], j});
  }
  if (items.empty()) throw ConfigError("empty experiment: no cover pieces");

  NormEstimateOptions opts;
  opts.halfWidth = cfg.halfWidth;
  opts.rounds = cfg.rounds;
  opts.threads = 1;
  opts.allowLargeBand = cfg.allowLargeK;
  std::vector<double> values(items.size());
  parallelFor(items.size(), cfg.threads, [&](std::size_t i) {
    const auto& it = items[i];
    const auto seed = mixSeed(mixSeed(cfg.seed, static_cast<std::uint64_t>(it.k)), it.piece);
    values[i] = estimateOperatorNorm(it.k, it.omega, cfg.q, cfg.sigma, profile, cfg.trials, seed, opts).value;
  });

  ResultTable table({"k", "lambda", "q", "sigma", "omega_width", "norm_estimate", "trials", "seed"});
  std::vector<std::pair<double, double>> pairs;
  double envelope = 0.0;
  for (int k = cfg.kMin; k <= cfg.kMax; ++k) {
    double best = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i)
      if (items[i].k == k) best = std::max(best, values[i]);
    pairs.emplace_back(k, best);
    envelope = std::max(envelope, best / std::pow(2.0, k / 4.0));
    table.addRow({std::int64_t{k}, std::ldexp(1.0, k), cfg.q, cfg.sigma,
                  widths[static_cast<std::size_t>(k - cfg.kMin)], best, std::int64_t{cfg.trials},
                  static_cast<std::int64_t>(cfg.seed)});
  }
  table.provenance() = makeProvenance(cfg);
  auto& notes = table.provenance().notes;
  notes.emplace_back("experiment", "norm-scaling");
  notes.emplace_back("theta", cfg.theta);
  notes.emplace_back("a", formatReal(cfg.a));
  if (pairs.size() >= 3) {
    const auto fit = fitScalingExponent(pairs);
    notes.emplace_back("fit_slope", formatReal(fit.slope));
    notes.emplace_back("fit_intercept", formatReal(fit.intercept));
    notes.emplace_back("fit_residual", formatReal(fit.residual));
  }
  notes.emplace_back("envelope_constant", formatReal(envelope));
  return table;
}

ResultTable runConvergenceExperiment(const ExperimentConfig& cfg) {
  auto sList = cfg.sList;
  if (sList.empty()) sList.push_back((cfg.directions().analyticDimension() + 1.0) / 4.0 + 0.5);
  return runConvergenceExperiment(cfg, sList, cfg.scales);
}

ResultTable runConvergenceExperiment(const ExperimentConfig& cfg, std::vector<double> sList,
                                     std::vector<double> scales) {
  auto c2 = cfg;
  c2.sList = sList;
  c2.scales = scales;
  c2.validate();
  if (sList.empty() || scales.empty()) throw ConfigError("empty experiment: no s values or scales");
  const auto theta = cfg.directions();
  const auto profile = cfg.profile();
  const double beta = theta.analyticDimension();

  ResultTable table({"s", "r", "median_error", "max_error"});
  for (double s : sList) {
    const auto f = makeSobolevData(s, cfg.seed, cfg.halfWidth, cfg.gridSize);
    const auto c = forwardTransform(f);
    const auto grid = MaximalGridSpec::forBand(c.spectralExtent(), profile, theta, scales.front());
    const SpaceTimeScan scan(c, theta, grid, profile);
    const auto initial = scan.initialField();
    const auto& xIdx = scan.xIndices();
    const std::ptrdiff_t origin = scan.windowOrigin();
    const std::size_t nx = xIdx.size();
    const std::size_t nr = scales.size();

    const unsigned workers = cfg.threads == 0 ? defaultThreads() : cfg.threads;
    std::vector<std::vector<double>> sup(std::max(1u, workers), std::vector<double>(nr * nx, 0.0));
    scan.run(workers, [&](unsigned w, std::size_t tIndex, std::span<const cplx> field,
                          std::span<const SpaceTimeScan::Offset> offsets) {
      const double t = std::abs(scan.times()[tIndex]);
      std::size_t reach = 0;
      while (reach < nr && t <= scales[reach] * (1.0 + 1e-12)) ++reach;
      if (reach == 0) return;
      auto& acc = sup[w];
      for (std::size_t i = 0; i < nx; ++i) {
        const auto base = xIdx[i] - origin;
        const cplx f0 = initial[static_cast<std::size_t>(base)];
        double v = 0.0;
        for (const auto& off : offsets)
          v = std::max(v, std::abs(field[static_cast<std::size_t>(base + off.shift)] - f0));
        for (std::size_t m = 0; m < reach; ++m) acc[m * nx + i] = std::max(acc[m * nx + i], v);
      }
    });
    for (std::size_t w = 1; w < sup.size(); ++w)
      for (std::size_t i = 0; i < sup[0].size(); ++i) sup[0][i] = std::max(sup[0][i], sup[w][i]);

    for (std::size_t m = 0; m < nr; ++m) {
      const std::vector<double> errs(sup[0].begin() + static_cast<std::ptrdiff_t>(m * nx),
                                     sup[0].begin() + static_cast<std::ptrdiff_t>((m + 1) * nx));
      table.addRow({s, scales[m], median(errs), *std::max_element(errs.begin(), errs.end())});
    }
  }
  table.provenance() = makeProvenance(cfg);
  auto& notes = table.provenance().notes;
  notes.emplace_back("experiment", "converge");
  notes.emplace_back("theta", cfg.theta);
  notes.emplace_back("beta", formatReal(beta));
  notes.emplace_back("threshold", formatReal((beta + 1.0) / 4.0));
  return table;
}

ResultTable kernelScanTable(const DecayReport& report) {
  ResultTable table({"lambda", "region", "x_dist", "t_dist", "abs_K", "decay_product"});
  for (const auto& s : report.samples)
    table.addRow({s.lambda, std::string(regionName(s.region)), s.xDist, s.tDist, s.absK, s.decayProduct});
  return table;
}

ResultTable runKernelScan(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> lambdas;
  for (int e = cfg.lambdaMinExp; e <= cfg.lambdaMaxExp; ++e) lambdas.push_back(std::ldexp(1.0, e));
  const auto report =
      decayBoundScan(cfg.profile(), cfg.sigma, lambdas, cfg.samplesPerRegion, cfg.seed, cfg.threads);
  auto table = kernelScanTable(report);
  table.provenance() = makeProvenance(cfg);
  auto& notes = table.provenance().notes;
  notes.emplace_back("experiment", "kernel-scan");
  notes.emplace_back("a", formatReal(cfg.a));
  notes.emplace_back("sigma", formatReal(cfg.sigma));
  notes.emplace_back("growth_factor", formatReal(report.growthFactor()));
  notes.emplace_back("comparability", report.comparabilityHolds() ? "pass" : "fail");
  notes.emplace_back("trivial_bound", report.trivialBoundHolds() ? "pass" : "fail");
  notes.emplace_back("psi_squared_mass", formatReal(report.psiSquaredMass));
  return table;
}

ResultTable runDimensionReport(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto theta = cfg.directions();
  const auto est = estimateMinkowskiDim(theta, cfg.deltaMin, cfg.deltaMax, cfg.nScales);
  ResultTable table({"delta", "count"});
  for (std::size_t i = 0; i < est.deltas.size(); ++i)
    table.addRow({est.deltas[i], static_cast<std::int64_t>(est.counts[i])});
  table.provenance() = makeProvenance(cfg);
  auto& notes = table.provenance().notes;
  notes.emplace_back("experiment", "dim");
  notes.emplace_back("theta", cfg.theta);
  notes.emplace_back("beta", formatReal(est.beta));
  notes.emplace_back("fit_residual", formatReal(est.fitResidual));
  notes.emplace_back("analytic_dimension", formatReal(theta.analyticDimension()));
  return table;
}

void emitPlotScript(const ResultTable& table, const std::string& csvName, const PlotSpec& spec,
                    const std::filesystem::path& path) {
  const auto x = table.columnIndex(spec.xColumn) + 1;
  const auto y = table.columnIndex(spec.yColumn) + 1;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# gnuplot script generated by dispersion-lab " << kToolVersion << '\n'
      << "# config_hash=" << table.provenance().configHash << '\n'
      << "set datafile separator ','\n"
      << "set datafile commentschars '#'\n"
      << "set key top left\n"
      << "set title '" << (spec.title.empty() ? spec.yColumn + " vs " + spec.xColumn : spec.title) << "'\n"
      << "set xlabel '" << spec.xColumn << "'\n"
      << "set ylabel '" << spec.yColumn << "'\n";
  if (spec.logX) out << "set logscale x 2\n";
  if (spec.logY) out << "set logscale y 2\n";
  out << "set terminal pngcairo size 900,600\n"
      << "set output '" << std::filesystem::path(csvName).replace_extension(".png").string() << "'\n"
      << "plot '" << csvName << "' every ::1 using " << x << ':' << y << " with linespoints title '"
      << spec.yColumn << "'\n";
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace dlab
