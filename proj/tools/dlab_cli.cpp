#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dlab/directions.hpp"
#include "dlab/errors.hpp"
#include "dlab/experiments.hpp"
#include "dlab/filters.hpp"
#include "dlab/maximal.hpp"
#include "dlab/spectral.hpp"
#include "dlab/table.hpp"

namespace fs = std::filesystem;
using namespace dlab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string config;
  std::string out;
  std::string theta;
  std::uint64_t seed = 0;
  double a = 0.0, q = 0.0, sigma = 0.0;
  int kMin = 0, kMax = 0;
  unsigned threads = 1;
  bool allowLargeK = false;
};

ExperimentConfig buildConfig(const CLI::App& app, const CommonFlags& f) {
  std::string text;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot read config " + f.config);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str() + "\n";
  } else if (const char* env = std::getenv("DLAB_OUT_DIR")) {
    text += "out_dir=" + std::string(env) + "\n";
  }
  const auto set = [&](const char* flag, const std::string& key, const std::string& value) {
    if (app.count(flag) > 0) text += key + "=" + value + "\n";
  };
  set("--a", "a", formatReal(f.a));
  set("--q", "q", formatReal(f.q));
  set("--sigma", "sigma", formatReal(f.sigma));
  set("--theta", "theta", f.theta);
  set("--k-min", "k_min", std::to_string(f.kMin));
  set("--k-max", "k_max", std::to_string(f.kMax));
  set("--seed", "seed", std::to_string(f.seed));
  set("--out", "out_dir", f.out);
  set("--threads", "threads", std::to_string(f.threads));
  if (f.allowLargeK) text += "allow_large_k=true\n";
  return parseConfig(text);
}

fs::path outputPath(const ExperimentConfig& cfg, const std::string& name) {
  const fs::path dir(cfg.outDir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir / name;
}

void emit(const ResultTable& table, const ExperimentConfig& cfg, const std::string& stem, const PlotSpec& plot) {
  const auto csv = outputPath(cfg, stem + ".csv");
  writeCsv(table, csv);
  emitPlotScript(table, stem + ".csv", plot, outputPath(cfg, stem + ".gp"));
  std::cout << "wrote " << csv.string() << '\n';
}

int runCheck(const ExperimentConfig& cfg, double xiMax, std::size_t samples) {
  const auto profile = cfg.profile();
  const auto check = checkDispersionConditions(profile, xiMax, samples);
  std::cout << "profile " << profile.name() << ": C1=" << formatReal(check.c1) << " C2=" << formatReal(check.c2)
            << '\n';
  bool ok = check.conforming();
  if (!ok) std::cout << "nonconforming: " << check.diagnosis() << '\n';

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double unitarity = 0.0, group = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> v(256);
    for (auto& z : v) z = cplx(gauss(rng), gauss(rng));
    const SampledSignal f(cfg.halfWidth, v);
    const double t1 = unit(rng), t2 = unit(rng);
    const auto g = evolve(f, t1, profile);
    unitarity = std::max(unitarity, std::abs(g.l2Norm() - f.l2Norm()) / f.l2Norm());
    const auto h = evolve(g, t2, profile);
    const auto direct = evolve(f, t1 + t2, profile);
    double diff = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) diff += std::norm(h[i] - direct[i]);
    group = std::max(group, std::sqrt(diff * f.gridStep()) / f.l2Norm());
  }
  const DyadicFilterBank bank(20);
  double partition = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double xi = std::ldexp(1.0, 19) * (2.0 * i / 10000.0 - 1.0);
    double sum = bank.psiK(0, xi);
    for (int k = 1; k <= 20; ++k) sum += bank.psiK(k, xi);
    partition = std::max(partition, std::abs(sum - 1.0));
  }
  const auto report = [&](const char* name, double err, double tol) {
    const bool pass = err <= tol;
    std::cout << (pass ? "PASS " : "FAIL ") << name << " max_err=" << formatReal(err) << " tol=" << formatReal(tol)
              << '\n';
    ok = ok && pass;
  };
  report("unitarity", unitarity, 1e-10);
  report("group_law", group, 1e-10);
  report("partition_of_unity", partition, 1e-12);
  return ok ? 0 : kExitNumerical;
}

int runEvolve(const ExperimentConfig& cfg, double t, const std::string& datum, double s) {
  if (datum != "sobolev" && datum != "gaussian") throw ConfigError("unknown datum '" + datum + "'");
  const auto profile = cfg.profile();
  SampledSignal f = datum == "sobolev"
                        ? makeSobolevData(s, cfg.seed, cfg.halfWidth, cfg.gridSize)
                        : SampledSignal::sample(cfg.halfWidth, cfg.gridSize,
                                                [](double x) { return cplx(std::exp(-0.5 * x * x), 0.0); });
  const auto g = evolve(f, t, profile);
  ResultTable table({"x", "re", "im"});
  for (std::size_t i = 0; i < g.size(); ++i) table.addRow({g.x(i), g[i].real(), g[i].imag()});
  table.provenance() = makeProvenance(cfg);
  table.provenance().notes.emplace_back("t", formatReal(t));
  table.provenance().notes.emplace_back("datum", datum);
  emit(table, cfg, "evolve", {"x", "re", false, false, "Re S_t f"});
  return 0;
}

int runCover(const ExperimentConfig& cfg) {
  if (cfg.kMin > cfg.kMax) throw ConfigError("empty experiment: k_min > k_max");
  const auto theta = cfg.directions();
  ResultTable table({"k", "lambda", "index", "lo", "hi", "tight_lo", "tight_hi"});
  for (int k = cfg.kMin; k <= cfg.kMax; ++k) {
    const double lambda = std::ldexp(1.0, k);
    const auto cover = coverSet(theta, lambda, cfg.sigma);
    const auto tight = tightenCover(cover, theta);
    for (std::size_t j = 0; j < cover.intervals.size(); ++j)
      table.addRow({std::int64_t{k}, lambda, static_cast<std::int64_t>(j), cover.intervals[j].lo,
                    cover.intervals[j].hi, tight.intervals[j].lo, tight.intervals[j].hi});
    std::cout << "k=" << k << " pieces=" << cover.count() << " width=" << formatReal(cover.width) << '\n';
  }
  table.provenance() = makeProvenance(cfg);
  table.provenance().notes.emplace_back("experiment", "cover");
  table.provenance().notes.emplace_back("theta", cfg.theta);
  emit(table, cfg, "cover", {"k", "index", false, false, "cover pieces"});
  return 0;
}

int runMaximal(const ExperimentConfig& cfg, double s) {
  const auto profile = cfg.profile();
  const auto theta = cfg.directions();
  const auto c = forwardTransform(makeSobolevData(s, cfg.seed, cfg.halfWidth, cfg.gridSize));
  const auto grid = MaximalGridSpec::forBand(c.spectralExtent(), profile, theta);
  const auto m = maximalFunction(c, theta, grid, profile, cfg.threads);
  ResultTable table({"x", "value", "arg_t", "arg_theta"});
  for (std::size_t i = 0; i < m.xs.size(); ++i) table.addRow({m.xs[i], m.values[i], m.argT[i], m.argTheta[i]});
  table.provenance() = makeProvenance(cfg);
  table.provenance().notes.emplace_back("experiment", "maximal");
  table.provenance().notes.emplace_back("s", formatReal(s));
  table.provenance().notes.emplace_back("lq_norm", formatReal(lqNorm(m.values, cfg.q)));
  std::cout << "||M f||_q = " << formatReal(lqNorm(m.values, cfg.q)) << " (q=" << formatReal(cfg.q) << ")\n";
  emit(table, cfg, "maximal", {"x", "value", false, false, "M_Theta f"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dispersion-lab: maximal estimates for dispersive equations along direction sets"};
  app.set_version_flag("--version", std::string("dispersion-lab ") + kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags flags;
  app.add_option("--config", flags.config, "key=value config file");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--a", flags.a, "power profile exponent a > 1");
  app.add_option("--q", flags.q, "Lebesgue exponent q in [1, 4]");
  app.add_option("--sigma", flags.sigma, "cover exponent in [q/4, 1]");
  app.add_option("--theta", flags.theta, "direction set: point:, points:, interval:, cantor:");
  app.add_option("--k-min", flags.kMin, "smallest band index");
  app.add_option("--k-max", flags.kMax, "largest band index");
  app.add_option("--threads", flags.threads, "worker threads (0 = all)");
  app.add_flag("--allow-large-k", flags.allowLargeK, "lift the desk-scale band cap");

  auto* check = app.add_subcommand("check", "dispersion conditions and propagator self-test");
  double xiMax = 1024.0;
  std::size_t samples = 2000;
  check->add_option("--xi-max", xiMax, "sampling range for the conditions");
  check->add_option("--samples", samples, "samples per half-line");

  auto* evolveCmd = app.add_subcommand("evolve", "propagate a datum and write S_t f");
  double t = 0.25, s = 1.0;
  std::string datum = "gaussian";
  evolveCmd->add_option("--t", t, "time");
  evolveCmd->add_option("--datum", datum, "gaussian or sobolev");
  evolveCmd->add_option("--s", s, "Sobolev order of the sobolev datum");

  auto* dim = app.add_subcommand("dim", "box-counting dimension of Theta");
  auto* cover = app.add_subcommand("cover", "covers of Theta by intervals of width 2^{-sigma k}");
  auto* maximal = app.add_subcommand("maximal", "M_Theta f for Sobolev data");
  maximal->add_option("--s", s, "Sobolev order of the datum");
  auto* scaling = app.add_subcommand("norm-scaling", "growth of ||M_Omega P_k|| in k");
  auto* kernel = app.add_subcommand("kernel-scan", "decay of the oscillatory kernel");
  auto* converge = app.add_subcommand("converge", "pointwise convergence errors E(r)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto cfg = buildConfig(app, flags);
    if (*check) return runCheck(cfg, xiMax, samples);
    if (*evolveCmd) return runEvolve(cfg, t, datum, s);
    if (*dim) {
      const auto table = runDimensionReport(cfg);
      std::cout << "beta=" << table.note("beta") << " analytic=" << table.note("analytic_dimension") << '\n';
      emit(table, cfg, "dim", {"delta", "count", true, true, "N(Theta, delta)"});
    }
    if (*cover) return runCover(cfg);
    if (*maximal) return runMaximal(cfg, s);
    if (*scaling) {
      const auto table = runScalingExperiment(cfg);
      std::cout << "fit_slope=" << table.note("fit_slope") << " envelope_constant=" << table.note("envelope_constant")
                << '\n';
      emit(table, cfg, "norm_scaling", {"k", "norm_estimate", false, true, "operator norm lower bounds"});
    }
    if (*kernel) {
      const auto table = runKernelScan(cfg);
      std::cout << "growth_factor=" << table.note("growth_factor") << " comparability=" << table.note("comparability")
                << " trivial_bound=" << table.note("trivial_bound") << '\n';
      emit(table, cfg, "kernel_scan", {"lambda", "decay_product", true, false, "|K| (lambda |x-x'|)^(1/2)"});
    }
    if (*converge) {
      const auto table = runConvergenceExperiment(cfg);
      for (std::size_t i = 0; i < table.rowCount(); ++i)
        std::cout << "s=" << formatReal(table.real(i, "s")) << " r=" << formatReal(table.real(i, "r"))
                  << " E=" << formatReal(table.real(i, "median_error")) << '\n';
      emit(table, cfg, "converge", {"r", "median_error", true, true, "median sup error"});
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
