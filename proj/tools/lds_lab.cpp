#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ldslab/errors.hpp"
#include "ldslab/experiments.hpp"
#include "ldslab/io.hpp"
#include "ldslab/moments.hpp"
#include "ldslab/montecarlo.hpp"
#include "ldslab/ols.hpp"
#include "ldslab/spectra.hpp"
#include "ldslab/talagrand.hpp"
#include "ldslab/verify.hpp"

namespace fs = std::filesystem;
using namespace ldslab;

namespace {

struct Flags {
  std::map<std::string, std::string> values;
  std::string config_file;
};

// Registers a string flag whose value lands in flags.values[key] only when
// given on the command line.
void flag(CLI::App& app, Flags& flags, const std::string& names,
          const std::string& key, const std::string& help) {
  app.add_option_function<std::string>(
      names, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
}

ExperimentConfig build_config(const Flags& flags, const std::string& command) {
  ExperimentConfig cfg;
  if (!flags.config_file.empty()) cfg.apply(read_kv_file(flags.config_file));
  cfg.apply(flags.values);
  cfg.command = command;
  return cfg;
}

int lambda_n_default(const ExperimentConfig& c, int fallback) {
  if (!c.eigs.empty()) return static_cast<int>(c.eigs.size());
  return c.n.value_or(fallback);
}

int cmd_verify(const Flags& flags, const std::vector<std::string>& suites,
               const std::string& bundle, const std::string& report_path) {
  const auto cfg = build_config(flags, "verify");
  VerifyOptions opts;
  opts.suites = suites;
  if (!bundle.empty()) opts.bundle = bundle;
  opts.workers = cfg.workers;
  opts.seed = cfg.seed;
  const auto report = run_verify(opts);
  const fs::path path = report_path.empty() ? cfg.out / "verify_report.json"
                                            : fs::path(report_path);
  write_text(path, report.to_json());
  for (const auto& s : report.suites) {
    std::cout << (s.passed() ? "PASS " : "FAIL ") << s.name << " (" << s.checks
              << " checks)\n";
  }
  std::cout << report.suites.size() << " suites, report: " << path.string() << "\n";
  if (!report.ok()) {
    for (const auto& f : report.failures()) std::cerr << "failed: " << f << "\n";
    return 1;
  }
  return 0;
}

int cmd_simulate(const Flags& flags) {
  auto cfg = build_config(flags, "simulate");
  validate_common(cfg);
  const int n = lambda_n_default(cfg, 4);
  const auto spec = config_spec(cfg, cfg.lambda.value_or(0.5), n);
  const auto bundle = simulate(spec, cfg.N.value_or(500), cfg.seed);
  const fs::path dir = cfg.out / "bundle";
  save_bundle(bundle, dir);
  const auto check = check_bundle(bundle);
  std::cout << "wrote " << dir.string() << " (" << spec.variant_name() << ", n="
            << bundle.dim() << ", N=" << bundle.length() << ", bundle check "
            << (check.ok() ? "ok" : check.violation()) << ")\n";
  return 0;
}

int cmd_spectra(const Flags& flags, const std::string& bundle_dir) {
  auto cfg = build_config(flags, "spectra");
  validate_common(cfg);
  std::optional<DataBundle> bundle;
  if (!bundle_dir.empty()) {
    bundle.emplace(load_bundle(bundle_dir));
  } else {
    const int n = lambda_n_default(cfg, 4);
    bundle.emplace(simulate(config_spec(cfg, cfg.lambda.value_or(0.5), n),
                            cfg.N.value_or(500), cfg.seed));
  }
  const auto rep = spectrum(bundle->x_minus());
  std::optional<PrecisionReport<double>> precision;
  if (!rep.degenerate) precision.emplace(precision_constraints(bundle->x_minus()));
  std::ostringstream csv;
  write_spectrum_csv(csv, rep, precision ? &*precision : nullptr);
  const fs::path path = cfg.out / "spectrum.csv";
  write_text(path, csv.str());
  std::cout << "sigma_1 = " << format_double(rep.singular_values(0))
            << ", sigma_n = "
            << format_double(rep.singular_values(rep.singular_values.size() - 1))
            << (rep.degenerate ? " (degenerate rows)" : "") << "\nwrote "
            << path.string() << "\n";
  return 0;
}

int cmd_ols(const Flags& flags) {
  auto cfg = build_config(flags, "ols");
  validate_common(cfg);
  const int n = lambda_n_default(cfg, 4);
  const double lambda = cfg.lambda.value_or(0.5);
  const auto spec = config_spec(cfg, lambda, n);
  const int N = cfg.N.value_or(500);
  const int trials = cfg.trials.value_or(1);
  std::vector<CellMetrics> metrics(trials);
  parallel_for(trials, cfg.workers, [&](std::size_t t) {
    metrics[t] = evaluate_bundle(simulate(spec, N, cfg.seed, t));
  });
  std::ostringstream csv;
  csv << "trial," << kOlsHeader << "\n";
  std::vector<double> errors;
  for (int t = 0; t < trials; ++t) {
    const auto& m = metrics[t];
    OlsRow row{cfg.seed, spec.dim(), N, spec.spectral_radius(), m.error,
               m.noise_error, m.bounds, m.kappa};
    csv << t << ',' << ols_row_csv(row) << "\n";
    errors.push_back(m.error);
  }
  const fs::path path = cfg.out / "ols.csv";
  write_text(path, csv.str());
  std::cout << "median error " << format_double(median(errors)) << " over " << trials
            << " trial(s)\nwrote " << path.string() << "\n";
  return 0;
}

int cmd_talagrand(const Flags& flags) {
  auto cfg = build_config(flags, "talagrand");
  validate_common(cfg);
  const auto family = parse_family(cfg.family);
  const double lambda = cfg.lambda.value_or(0.95);
  std::vector<int> ns = cfg.n_list;
  if (ns.empty() && cfg.n) ns = {*cfg.n};
  if (ns.empty()) ns = {10, 13, 16, 19};
  const auto study = scaling_study(family, lambda, ns, cfg.N.value_or(4000),
                                   cfg.trials.value_or(30), cfg.seed, cfg.workers);
  std::ostringstream trials_csv, summary_csv;
  write_talagrand_trials_csv(trials_csv, study);
  write_talagrand_summary_csv(summary_csv, study);
  write_text(cfg.out / "talagrand_trials.csv", trials_csv.str());
  write_text(cfg.out / "talagrand_summary.csv", summary_csv.str());
  std::cout << "slope " << format_double(study.slope) << " per unit n, 95% CI ["
            << format_double(study.ci_low) << ", " << format_double(study.ci_high)
            << "], ln(4 lambda^2)/2 = " << format_double(alpha_lambda(lambda) / 2)
            << "\nwrote " << (cfg.out / "talagrand_summary.csv").string() << "\n";
  if (cfg.plot) {
    Curve c{"median ratio", {}, {}};
    for (const auto& p : study.points) {
      c.x.push_back(p.n);
      c.y.push_back(p.median_ratio);
    }
    write_text(cfg.out / "talagrand.svg",
               render_svg({c}, {"talagrand ratio", "n", "|X|_F / |E|_F", true}));
  }
  return 0;
}

int cmd_figure(const Flags& flags, const std::string& name) {
  auto cfg = build_config(flags, "figure");
  const auto fig = run_figure(name, cfg);
  const auto paths = write_figure(fig, cfg.out, cfg.plot);
  for (const auto& c : fig.curves) {
    std::cout << c.label << ": median at x=" << format_double(c.x.back()) << " is "
              << format_double(c.median.back()) << "\n";
  }
  for (const auto& p : paths) std::cout << "wrote " << p.string() << "\n";
  return 0;
}

int cmd_sweep(const Flags& flags) {
  auto cfg = build_config(flags, "sweep");
  const auto rows = run_sweep(cfg);
  std::ostringstream csv;
  csv << kSweepHeader << "\n";
  for (const auto& r : rows) csv << sweep_row_csv(r) << "\n";
  const fs::path path = cfg.out / "sweep.csv";
  write_text(path, csv.str());
  std::cout << rows.size() << " cells\nwrote " << path.string() << "\n";
  return 0;
}

int cmd_oracles(const Flags& flags) {
  auto cfg = build_config(flags, "oracles");
  const double lambda = cfg.lambda.value_or(0.5);
  const MomentOracle point{lambda, cfg.rho.value_or(lambda), cfg.n.value_or(4),
                           cfg.N.value_or(500)};
  std::ostringstream csv;
  write_oracle_csv(csv, oracle_table(point));
  const fs::path path = cfg.out / "oracles.csv";
  write_text(path, csv.str());
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification lab for linear dynamical systems"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config_file, "key=value config file; flags override it");
  flag(app, flags, "--family", "family", "jordan | hermitian");
  flag(app, flags, "--lambda", "lambda", "eigenvalue");
  flag(app, flags, "--lambda-list", "lambda_list", "comma-separated eigenvalues (sweep)");
  flag(app, flags, "--eigs", "eigs", "explicit diagonal spectrum, comma-separated");
  flag(app, flags, "--n", "n", "state dimension");
  flag(app, flags, "--n-list", "n_list", "comma-separated dimensions");
  flag(app, flags, "--N", "N", "trajectory length");
  flag(app, flags, "--N-list", "N_list", "comma-separated trajectory lengths");
  flag(app, flags, "--trials", "trials", "Monte Carlo trials");
  flag(app, flags, "--seed", "seed", "base seed");
  flag(app, flags, "--out", "out", "output directory");
  flag(app, flags, "--workers", "workers", "worker threads");
  flag(app, flags, "--max-N", "max_N", "cap on N (default 8000)");
  flag(app, flags, "--max-trials", "max_trials", "cap on trials (default 50)");
  flag(app, flags, "--max-cells", "max_cells", "cap on sweep cells (default 256)");
  flag(app, flags, "--rho", "rho", "second eigenvalue for the oracle table");
  app.add_flag_callback("--plot", [&flags] { flags.values["plot"] = "true"; },
                        "also write an SVG plot");

  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  std::vector<std::string> suites;
  std::string bundle_dir, report_path;
  verify->add_option("--suite", suites, "run only these suites")->delimiter(',');
  verify->add_option("--bundle", bundle_dir, "check a saved bundle directory");
  verify->add_option("--report", report_path, "report path (default <out>/verify_report.json)");

  auto* simulate_cmd = app.add_subcommand("simulate", "simulate and save one bundle");
  auto* spectra = app.add_subcommand("spectra", "spectrum and precision report");
  spectra->add_option("--bundle", bundle_dir, "saved bundle directory");
  auto* ols = app.add_subcommand("ols", "OLS error and bounds per trial");
  auto* talagrand = app.add_subcommand("talagrand", "scaling of |X|_F / |E|_F in n");
  auto* figure = app.add_subcommand("figure", "reproduce a figure as CSV (+ SVG)");
  std::string figure_name;
  figure->add_option("name", figure_name, "figure name")->required();
  auto* sweep = app.add_subcommand("sweep", "grid over (lambda, n, N)");
  auto* oracles = app.add_subcommand("oracles", "closed-form oracle table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return cmd_verify(flags, suites, bundle_dir, report_path);
    if (*simulate_cmd) return cmd_simulate(flags);
    if (*spectra) return cmd_spectra(flags, bundle_dir);
    if (*ols) return cmd_ols(flags);
    if (*talagrand) return cmd_talagrand(flags);
    if (*figure) return cmd_figure(flags, figure_name);
    if (*sweep) return cmd_sweep(flags);
    if (*oracles) return cmd_oracles(flags);
  } catch (const UnknownFigure& e) {
    std::cerr << "error: " << e.what() << " (known: ";
    for (const auto& n : figure_names()) std::cerr << n << ' ';
    std::cerr << ")\n";
    return 2;
  } catch (const LabError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
