#pragma once

// Subcommands of the `zdyn` executable. Each command reads an
// ExperimentConfig, prints a human-readable summary and writes CSV (and
// optionally SVG) files into the output directory.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical
// failure (a decision that cannot be certified at the requested tolerance).

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "zdyn/cli/config.hpp"
#include "zdyn/cli/csv.hpp"
#include "zdyn/cli/rng.hpp"
#include "zdyn/cli/svg.hpp"
#include "zdyn/dynamics.hpp"
#include "zdyn/errors.hpp"
#include "zdyn/hgda.hpp"
#include "zdyn/ogda.hpp"
#include "zdyn/stability.hpp"

namespace zdyn::cli {

/// Raised when an analysis completes but fails its own consistency check.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Largest tolerated distance between the analytic root set and the
/// block-companion spectrum before `analyze` reports a numerical failure.
inline constexpr double kOracleTolerance = 1e-6;

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
};

/// Command-line flags take precedence over the file. `--seed s` replaces the
/// random-game seed with s and, when the config draws random initial states,
/// their seed with the first SplitMix64 output for s.
inline ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOptions& opt) {
  if (opt.out_dir) cfg.output.dir = *opt.out_dir;
  if (opt.format) {
    if (*opt.format != "csv" && *opt.format != "csv+svg") throw ConfigError("--format: expected csv or csv+svg");
    cfg.output.format = *opt.format;
  }
  if (opt.seed) {
    if (!cfg.game.literal) cfg.game.seed = *opt.seed;
    if (cfg.sim.init_seed) cfg.sim.init_seed = SplitMix64(*opt.seed).next();
  }
  if (!cfg.game.literal && !cfg.game.seed)
    throw ConfigError("[game] random matrix requires an explicit seed (set [game] seed or pass --seed)");
  return cfg;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path.string());
  f << content;
  if (!f) throw InvalidInput("error writing " + path.string());
}

inline bool wants_svg(const ExperimentConfig& cfg) { return cfg.output.format == "csv+svg"; }

inline std::string scheme_label(const SchemeSpec& s) {
  if (s.preset != "custom") return s.preset;
  std::string out = "custom p=(";
  for (std::size_t i = 0; i < s.p.size(); ++i) out += (i ? "," : "") + format_double(s.p[i]);
  out += ") q=(";
  for (std::size_t i = 0; i < s.q.size(); ++i) out += (i ? "," : "") + format_double(s.q[i]);
  return out + ")";
}

inline AnalyzeOptions analyze_options(const ExperimentConfig& cfg, bool cross_check) {
  AnalyzeOptions o;
  o.allow_non_nash = cfg.scheme.allow_non_nash;
  o.cross_check = cross_check;
  return o;
}

/// Verdict for one learning rate: the closed form for OGDA, the general
/// reduction otherwise.
inline StabilityReport verdict_for(const ExperimentConfig& cfg, const GameMatrix& game, double eta) {
  if (cfg.scheme.is_ogda()) return ogda_verdict(game, eta);
  return analyze(cfg.scheme.build(eta), game, analyze_options(cfg, false)).report;
}

/// Runs f(0..count-1) on `threads` workers and returns the results in index
/// order. The first exception (by index) is rethrown after all workers stop.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t count, unsigned threads, F f) {
  std::vector<std::optional<T>> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        results[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(count);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

}  // namespace detail

inline int cmd_analyze(const ExperimentConfig& cfg, std::ostream& out) {
  const GameMatrix game = cfg.game.build();
  const std::vector<double> etas = cfg.eta.grid();
  if (etas.empty()) throw ConfigError("[eta] analyze needs a learning rate (value, list or sweep)");

  std::ostringstream roots_csv;
  CsvWriter csv(roots_csv, {"eta", "index", "re", "im", "modulus"});
  std::optional<std::string> failure;

  out << "scheme: " << detail::scheme_label(cfg.scheme) << "\n";
  out << "dimension: " << game.dim() << "\n";
  out << "spectral_norm: " << format_double(game.spectral_norm()) << "\n";
  if (cfg.scheme.is_ogda()) {
    require_nonsingular(game, kDefaultTolerances);
    const OptimalRate opt = optimal_learning_rate(game);
    out << "threshold: " << format_double(ogda_threshold(game)) << "\n";
    out << "eta_opt: " << format_double(opt.eta) << "\n";
    out << "optimal_radius: " << format_double(opt.radius) << "\n";
  }
  for (double eta : etas) {
    StabilityReport rep;
    out << "\neta: " << format_double(eta) << "\n";
    if (cfg.scheme.is_ogda()) {
      rep = ogda_verdict(game, eta);
    } else {
      const HgdaAnalysis res = analyze(cfg.scheme.build(eta), game, detail::analyze_options(cfg, true));
      rep = res.report;
      out << "nash_certified: " << (res.certified_nash ? "yes" : "no (stability only, limits not certified as Nash)")
          << "\n";
      out << "common_factor_degree: " << res.common.degree() << "\n";
      if (res.oracle_distance) {
        out << "companion_distance: " << format_double(*res.oracle_distance) << "\n";
        if (*res.oracle_distance > kOracleTolerance && !failure)
          failure = "root set disagrees with the block companion spectrum at eta " + format_double(eta);
      }
    }
    out << "verdict: " << to_string(rep.verdict) << "\n";
    out << "spectral_radius: " << format_double(rep.spectral_radius) << "\n";
    if (rep.rate) out << "rate: " << format_double(*rep.rate) << "\n";
    for (std::size_t i = 0; i < rep.roots.size(); ++i) {
      const Complex z = rep.roots[i];
      csv.row({format_double(eta), std::to_string(i), format_double(z.real()), format_double(z.imag()),
               format_double(std::abs(z))});
    }
  }
  const auto path = std::filesystem::path(cfg.output.dir) / "roots.csv";
  detail::write_file(path, roots_csv.str());
  out << "\nwrote " << path.string() << "\n";
  if (failure) throw NumericalFailure(*failure);
  return kExitOk;
}

struct SweepRow {
  double eta = 0.0;
  Verdict verdict = Verdict::Unstable;
  double predicted_radius = 0.0;
  std::optional<double> empirical_rate;
};

/// One row per learning rate of the configured grid, computed on `threads`
/// workers; the result is independent of the thread count.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, unsigned threads) {
  const GameMatrix game = cfg.game.build();
  const std::vector<double> etas = cfg.eta.grid();
  if (etas.empty()) throw ConfigError("[eta] sweep needs sweep_lo, sweep_hi and sweep_count (or a list)");
  const auto init = cfg.sim.initial_states(game.dim(), cfg.scheme.horizon());
  if (!cfg.scheme.is_ogda()) {
    // Surface contract violations once, before fanning out.
    (void)analyze(cfg.scheme.build(etas.front()), game, detail::analyze_options(cfg, false));
  }
  return detail::parallel_map<SweepRow>(etas.size(), threads, [&](std::size_t i) {
    SweepRow row;
    row.eta = etas[i];
    const StabilityReport rep = detail::verdict_for(cfg, game, row.eta);
    row.verdict = rep.verdict;
    row.predicted_radius = rep.spectral_radius;
    if (cfg.sim.enabled && rep.verdict == Verdict::Stable) {
      const Trajectory traj = simulate(cfg.scheme.build(row.eta), game, init, cfg.sim.steps, cfg.sim.guard);
      try {
        row.empirical_rate = zdyn::empirical_rate(traj);
      } catch (const InsufficientData&) {
      } catch (const ContractViolation&) {
      }
    }
    return row;
  });
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream s;
  CsvWriter csv(s, {"eta", "verdict", "predicted_radius", "empirical_rate"});
  for (const auto& r : rows)
    csv.row({format_double(r.eta), std::string(to_string(r.verdict)), format_double(r.predicted_radius),
             optional_cell(r.empirical_rate)});
  return s.str();
}

inline int cmd_sweep(const ExperimentConfig& cfg, unsigned threads, std::ostream& out) {
  const auto rows = run_sweep(cfg, threads);
  const auto dir = std::filesystem::path(cfg.output.dir);
  detail::write_file(dir / "sweep.csv", sweep_csv(rows));

  const auto best = std::min_element(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.predicted_radius < b.predicted_radius;
  });
  out << "scheme: " << detail::scheme_label(cfg.scheme) << "\n";
  out << "points: " << rows.size() << "\n";
  out << "min_predicted_radius: " << format_double(best->predicted_radius) << " at eta " << format_double(best->eta)
      << "\n";
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].verdict != rows[i - 1].verdict)
      out << "verdict_change: " << to_string(rows[i - 1].verdict) << " -> " << to_string(rows[i].verdict)
          << " between eta " << format_double(rows[i - 1].eta) << " and " << format_double(rows[i].eta) << "\n";
  out << "wrote " << (dir / "sweep.csv").string() << "\n";

  if (detail::wants_svg(cfg)) {
    std::vector<double> xs, radius, rate;
    for (const auto& r : rows) {
      xs.push_back(r.eta);
      radius.push_back(r.predicted_radius);
      rate.push_back(r.empirical_rate.value_or(NAN));
    }
    std::ostringstream svg;
    write_line_plot(svg, xs, {{"predicted radius", radius}, {"empirical rate", rate}}, "radius vs learning rate");
    detail::write_file(dir / "sweep.svg", svg.str());
    out << "wrote " << (dir / "sweep.svg").string() << "\n";
  }
  return kExitOk;
}

inline int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const GameMatrix game = cfg.game.build();
  if (cfg.eta.kind != EtaSpec::Kind::Single || cfg.eta.values.size() != 1)
    throw ConfigError("[eta] simulate needs a single 'value'");
  const double eta = cfg.eta.values.front();
  const HgdaScheme scheme = cfg.scheme.build(eta);
  const std::size_t n = game.dim();
  const Trajectory traj = simulate(scheme, game, cfg.sim.initial_states(n, scheme.horizon()), cfg.sim.steps,
                                   cfg.sim.guard);

  std::ostringstream s;
  CsvRow header{"t"};
  for (std::size_t i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) header.push_back("y" + std::to_string(i));
  header.push_back("norm");
  CsvWriter csv(s, header);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    CsvRow row{std::to_string(t)};
    for (double v : traj.state(t)) row.push_back(format_double(v));
    row.push_back(format_double(traj.residuals()[t]));
    csv.row(row);
  }
  const auto dir = std::filesystem::path(cfg.output.dir);
  detail::write_file(dir / "trajectory.csv", s.str());

  out << "scheme: " << detail::scheme_label(cfg.scheme) << "\n";
  out << "eta: " << format_double(eta) << "\n";
  out << "states: " << traj.size() << "\n";
  out << "final_norm: " << format_double(traj.residuals().back()) << "\n";
  out << "diverged_at: " << (traj.diverged() ? std::to_string(*traj.diverged_at()) : std::string("none")) << "\n";
  try {
    out << "empirical_rate: " << format_double(zdyn::empirical_rate(traj)) << "\n";
  } catch (const Error&) {
    out << "empirical_rate: n/a\n";
  }
  out << "wrote " << (dir / "trajectory.csv").string() << "\n";

  if (detail::wants_svg(cfg)) {
    if (n != 1) {
      err << "note: phase portrait needs a 1x1 game; skipping SVG\n";
    } else {
      std::vector<double> xs, ys;
      for (std::size_t t = 0; t < traj.size(); ++t) {
        xs.push_back(traj.x(t)[0]);
        ys.push_back(traj.y(t)[0]);
      }
      std::ostringstream svg;
      write_phase_portrait(svg, xs, ys, "eta = " + format_double(eta));
      detail::write_file(dir / "trajectory.svg", svg.str());
      out << "wrote " << (dir / "trajectory.svg").string() << "\n";
    }
  }
  return kExitOk;
}

inline int cmd_boundary(const ExperimentConfig& cfg, std::ostream& out) {
  if (!cfg.boundary.present) throw ConfigError("boundary needs a [boundary] section with lo and hi");
  const GameMatrix game = cfg.game.build();
  const BoundarySpec& b = cfg.boundary;
  const HgdaScheme family = cfg.scheme.build(b.lo);

  std::ostringstream s;
  CsvWriter csv(s, {"method", "eta_star", "lo", "hi", "width", "steps"});
  out << "scheme: " << detail::scheme_label(cfg.scheme) << "\n";
  if (cfg.scheme.is_ogda()) {
    require_nonsingular(game, kDefaultTolerances);
    out << "threshold: " << format_double(ogda_threshold(game)) << "\n";
  }
  if (b.method == "analytic" || b.method == "both") {
    AnalyzeOptions o = detail::analyze_options(cfg, false);
    o.tol.bisection_width = b.width;
    const double eta = eta_stability_boundary(family, game, b.lo, b.hi, o);
    out << "boundary_analytic: " << format_double(eta) << "\n";
    csv.row({"analytic", format_double(eta), format_double(b.lo), format_double(b.hi), format_double(b.width), ""});
  }
  if (b.method == "simulation" || b.method == "both") {
    const auto init = cfg.sim.initial_states(game.dim(), family.horizon());
    const double eta =
        eta_stability_boundary_simulated(family, game, init, cfg.sim.steps, b.lo, b.hi, b.width, cfg.sim.guard);
    out << "boundary_simulation: " << format_double(eta) << "\n";
    csv.row({"simulation", format_double(eta), format_double(b.lo), format_double(b.hi), format_double(b.width),
             std::to_string(cfg.sim.steps)});
  }
  const auto path = std::filesystem::path(cfg.output.dir) / "boundary.csv";
  detail::write_file(path, s.str());
  out << "wrote " << path.string() << "\n";
  return kExitOk;
}

/// Entry point of the executable; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Stability analysis and simulation of GDA, OGDA and historical GDA on bilinear games", "zdyn"};
  app.require_subcommand(1);
  std::string config_path;
  RunOptions opt;
  std::string out_dir, format;
  std::uint64_t seed = 0;

  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"analyze", "verdict, spectral radius and roots for each learning rate"},
           {"sweep", "verdict, predicted radius and empirical rate over a learning-rate grid"},
           {"simulate", "iterate the scheme and write the trajectory"},
           {"boundary", "locate the learning rate where stability is lost"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--format", format, "csv or csv+svg (overrides [output] format)")
        ->check(CLI::IsMember({"csv", "csv+svg"}));
    sub->add_option("--threads", opt.threads, "worker threads for sweeps")->check(CLI::Range(1u, 1024u));
    sub->add_option("--seed", seed, "replace the seeds in the config");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--out")) opt.out_dir = out_dir;
    if (sub->count("--format")) opt.format = format;
    if (sub->count("--seed")) opt.seed = seed;
    const ExperimentConfig cfg = apply_overrides(load_config(config_path), opt);
    const std::string name = sub->get_name();
    if (name == "analyze") return cmd_analyze(cfg, out);
    if (name == "sweep") return cmd_sweep(cfg, opt.threads, out);
    if (name == "simulate") return cmd_simulate(cfg, out, err);
    return cmd_boundary(cfg, out);
  } catch (const Unsupported& e) {
    err << e.what() << "\n";
    return kExitInput;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Inconclusive& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const InsufficientData& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace zdyn::cli
