#include "ldslab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ldslab/errors.hpp"
#include "ldslab/montecarlo.hpp"

namespace ldslab {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int parse_int(const std::string& s) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw BadParameter("");
    return v;
  } catch (const std::exception&) {
    throw BadParameter("not an integer: '" + s + "'");
  }
}

double parse_real(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw BadParameter("");
    return v;
  } catch (const std::exception&) {
    throw BadParameter("not a number: '" + s + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw BadParameter("not a boolean: '" + s + "'");
}

// Median, q25, q75 over the finite values; NaN when none are finite.
std::array<double, 3> robust_summary(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(),
                         [](double x) { return !std::isfinite(x); }),
          v.end());
  if (v.empty()) return {kNaN, kNaN, kNaN};
  std::sort(v.begin(), v.end());
  return {quantile(v, 0.5), quantile(v, 0.25), quantile(v, 0.75)};
}

double finite_median(std::vector<double> v) { return robust_summary(std::move(v))[0]; }

std::vector<int> checkpoints(int N, int n) {
  std::vector<int> out;
  for (int k = 1; k <= 10; ++k) {
    const int c = static_cast<int>(std::lround(static_cast<double>(N) * k / 10.0));
    if (c > n && (out.empty() || c > out.back())) out.push_back(c);
  }
  return out;
}

// values[t][p] -> curve with medians over t at each p.
CurveData make_curve(std::string label, const std::vector<double>& x,
                     const std::vector<std::vector<double>>& values) {
  CurveData c;
  c.label = std::move(label);
  c.x = x;
  for (std::size_t p = 0; p < x.size(); ++p) {
    std::vector<double> col;
    for (const auto& row : values) col.push_back(row[p]);
    const auto s = robust_summary(col);
    c.median.push_back(s[0]);
    c.q25.push_back(s[1]);
    c.q75.push_back(s[2]);
  }
  return c;
}

std::vector<std::vector<double>> transpose(const std::vector<std::vector<double>>& v) {
  if (v.empty()) return {};
  std::vector<std::vector<double>> out(v[0].size(), std::vector<double>(v.size()));
  for (std::size_t t = 0; t < v.size(); ++t) {
    for (std::size_t p = 0; p < v[t].size(); ++p) out[p][t] = v[t][p];
  }
  return out;
}

struct FigureDefaults {
  double lambda;
  std::vector<int> n_list;
  int N;
  std::vector<int> N_list;
  int trials;
};

FigureDefaults defaults_for(const std::string& name) {
  if (name == "row-curse") return {0.95, {12, 13, 14, 16}, 3000, {}, 20};
  if (name == "row-no-curse") return {0.47, {12, 13, 14, 16}, 3000, {}, 20};
  if (name == "sigma1-tracks-row") return {0.95, {14, 15, 17}, 3000, {}, 30};
  if (name == "talagrand-growth") return {0.95, {17, 20, 24}, 4000, {}, 20};
  if (name == "ols-transience") return {0.95, {15}, 8000, {500, 1000, 2000, 4000, 8000}, 30};
  if (name == "error-sandwich") return {0.92, {10}, 8000, {500, 1000, 2000, 4000, 8000}, 20};
  throw UnknownFigure("unknown figure '" + name + "'");
}

struct Resolved {
  double lambda;
  std::vector<int> n_list;
  int N;
  std::vector<int> N_list;
  int trials;
};

Resolved resolve(const std::string& name, const ExperimentConfig& c) {
  const FigureDefaults d = defaults_for(name);
  Resolved r{c.lambda.value_or(d.lambda),
             !c.n_list.empty() ? c.n_list
                               : (c.n ? std::vector<int>{*c.n} : d.n_list),
             c.N.value_or(d.N),
             !c.N_list.empty() ? c.N_list : d.N_list,
             c.trials.value_or(d.trials)};
  std::sort(r.N_list.begin(), r.N_list.end());
  if (!r.N_list.empty() && !c.N) r.N = r.N_list.back();
  ExperimentConfig check = c;
  check.lambda = r.lambda;
  check.n_list = r.n_list;
  check.N = std::max(r.N, r.N_list.empty() ? 0 : r.N_list.back());
  check.N_list = r.N_list;
  check.trials = r.trials;
  validate_common(check);
  return r;
}

// Row curse figures: |y_1|^2 / N' at checkpoints, one curve per n.
FigureResult row_norm_figure(const std::string& name, const ExperimentConfig& c) {
  const Resolved r = resolve(name, c);
  FigureResult fig;
  fig.name = name;
  fig.x_label = "N";
  fig.y_label = "|y_1|^2 / N";
  fig.log_y = true;
  for (int n : r.n_list) {
    const SystemSpec spec = config_spec(c, r.lambda, n);
    const auto cps = checkpoints(r.N, n);
    std::vector<std::vector<double>> values(r.trials);
    parallel_for(r.trials, c.workers, [&](std::size_t t) {
      const auto b = simulate(spec, r.N, c.seed, scaling_trial_index(n, static_cast<int>(t)));
      double acc = 0.0;
      int col = 0;
      for (int cp : cps) {
        for (; col < cp; ++col) acc += b.x_minus()(0, col) * b.x_minus()(0, col);
        values[t].push_back(acc / cp);
      }
    });
    fig.curves.push_back(make_curve("n" + std::to_string(n),
                                    std::vector<double>(cps.begin(), cps.end()), values));
    fig.samples.push_back(transpose(values));
  }
  return fig;
}

FigureResult sigma1_figure(const ExperimentConfig& c) {
  const Resolved r = resolve("sigma1-tracks-row", c);
  FigureResult fig;
  fig.name = "sigma1-tracks-row";
  fig.x_label = "N";
  fig.y_label = "sigma_1(X) / |y_1|";
  for (int n : r.n_list) {
    const SystemSpec spec = config_spec(c, r.lambda, n);
    const auto cps = checkpoints(r.N, n);
    std::vector<std::vector<double>> values(r.trials);
    parallel_for(r.trials, c.workers, [&](std::size_t t) {
      const auto b = simulate(spec, r.N, c.seed, scaling_trial_index(n, static_cast<int>(t)));
      for (int cp : cps) {
        const auto x = b.x_minus().leftCols(cp);
        values[t].push_back(singular_values(x)(0) / x.row(0).norm());
      }
    });
    fig.curves.push_back(make_curve("n" + std::to_string(n),
                                    std::vector<double>(cps.begin(), cps.end()), values));
    fig.samples.push_back(transpose(values));
  }
  return fig;
}

FigureResult talagrand_figure(const ExperimentConfig& c) {
  const Resolved r = resolve("talagrand-growth", c);
  FigureResult fig;
  fig.name = "talagrand-growth";
  fig.x_label = "N";
  fig.y_label = "|X|_F / |E|_F";
  fig.log_y = true;
  for (int n : r.n_list) {
    const SystemSpec spec = config_spec(c, r.lambda, n);
    const auto cps = checkpoints(r.N, n);
    std::vector<std::vector<double>> values(r.trials);
    parallel_for(r.trials, c.workers, [&](std::size_t t) {
      const auto b = simulate(spec, r.N, c.seed, scaling_trial_index(n, static_cast<int>(t)));
      double fx = 0.0, fe = 0.0;
      int col = 0;
      for (int cp : cps) {
        for (; col < cp; ++col) {
          fx += b.x_minus().col(col).squaredNorm();
          fe += b.noise().col(col).squaredNorm();
        }
        values[t].push_back(std::sqrt(fx / fe));
      }
    });
    fig.curves.push_back(make_curve("n" + std::to_string(n),
                                    std::vector<double>(cps.begin(), cps.end()), values));
    fig.samples.push_back(transpose(values));
  }
  return fig;
}

// Statistic f(prefix bundle) at each N in N_list for one spec.
template <typename Fn>
std::vector<std::vector<std::vector<double>>> over_lengths(
    const SystemSpec& spec, const std::vector<int>& N_list, int trials,
    std::uint64_t seed, int workers, std::size_t outputs, Fn&& fn) {
  // result[t][p][k]
  std::vector<std::vector<std::vector<double>>> out(trials);
  parallel_for(trials, workers, [&](std::size_t t) {
    const auto full = simulate(spec, N_list.back(), seed, t);
    for (int N : N_list) {
      std::vector<double> row = fn(prefix(full, N));
      row.resize(outputs, kNaN);
      out[t].push_back(std::move(row));
    }
  });
  return out;
}

std::vector<std::vector<double>> pick(
    const std::vector<std::vector<std::vector<double>>>& v, std::size_t k) {
  std::vector<std::vector<double>> out(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) {
    for (const auto& p : v[t]) out[t].push_back(p[k]);
  }
  return out;
}

FigureResult transience_figure(const ExperimentConfig& c) {
  const Resolved r = resolve("ols-transience", c);
  FigureResult fig;
  fig.name = "ols-transience";
  fig.x_label = "N";
  fig.y_label = "|A - A_hat|_F";
  fig.log_y = true;
  const std::vector<double> xs(r.N_list.begin(), r.N_list.end());
  const auto err = [](const DataBundle& b) {
    const auto fit = ols_fit(b);
    return std::vector<double>{fit.error_frobenius, fit.noise_error};
  };
  const int n = r.n_list.front();
  const SystemSpec primary = config_spec(c, r.lambda, n);
  const auto a = over_lengths(primary, r.N_list, r.trials, c.seed, c.workers, 2, err);
  const std::string tag = to_string(parse_family(c.family));
  fig.curves.push_back(make_curve(tag + "_n" + std::to_string(n), xs, pick(a, 0)));
  fig.samples.push_back(transpose(pick(a, 0)));
  fig.curves.push_back(make_curve(tag + "_n" + std::to_string(n) + "_noise_term", xs, pick(a, 1)));
  fig.samples.push_back(transpose(pick(a, 1)));

  const SystemSpec contrast = make_spec(HermitianDiagonal{std::vector<double>(4, 0.5)});
  const auto h = over_lengths(contrast, r.N_list, r.trials, c.seed, c.workers, 1,
                              [](const DataBundle& b) {
                                return std::vector<double>{ols_fit(b).error_frobenius};
                              });
  fig.curves.push_back(make_curve("hermitian_0.5_n4", xs, pick(h, 0)));
  fig.samples.push_back(transpose(pick(h, 0)));
  return fig;
}

FigureResult sandwich_figure(const ExperimentConfig& c) {
  const Resolved r = resolve("error-sandwich", c);
  FigureResult fig;
  fig.name = "error-sandwich";
  fig.x_label = "N";
  fig.y_label = "|A - A_hat|_F";
  fig.log_y = true;
  const int n = r.n_list.front();
  const SystemSpec spec = config_spec(c, r.lambda, n);
  const std::vector<double> xs(r.N_list.begin(), r.N_list.end());
  const auto v = over_lengths(spec, r.N_list, r.trials, c.seed, c.workers, 5,
                              [](const DataBundle& b) {
                                const auto m = evaluate_bundle(b);
                                return std::vector<double>{
                                    m.error, m.bounds.lower_svd, m.bounds.upper_svd,
                                    m.swsscs_lower, m.swsscs_upper};
                              });
  const char* labels[] = {"error", "lower_svd", "upper_svd", "sandwich_lower",
                          "sandwich_upper"};
  for (std::size_t k = 0; k < 5; ++k) {
    fig.curves.push_back(make_curve(labels[k], xs, pick(v, k)));
    fig.samples.push_back(transpose(pick(v, k)));
  }
  return fig;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& tok : split_list(text)) out.push_back(parse_int(tok));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split_list(text)) out.push_back(parse_real(tok));
  return out;
}

void ExperimentConfig::apply(const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "command") command = value;
    else if (key == "family") family = value;
    else if (key == "lambda") lambda = parse_real(value);
    else if (key == "rho") rho = parse_real(value);
    else if (key == "lambda_list" || key == "lambda-list") lambda_list = parse_double_list(value);
    else if (key == "eigs") eigs = parse_double_list(value);
    else if (key == "n") n = parse_int(value);
    else if (key == "n_list" || key == "n-list") n_list = parse_int_list(value);
    else if (key == "N") N = parse_int(value);
    else if (key == "N_list" || key == "N-list") N_list = parse_int_list(value);
    else if (key == "trials") trials = parse_int(value);
    else if (key == "seed") seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "out") out = value;
    else if (key == "plot") plot = parse_bool(value);
    else if (key == "workers") workers = parse_int(value);
    else if (key == "max_N" || key == "max-N") max_N = parse_int(value);
    else if (key == "max_trials" || key == "max-trials") max_trials = parse_int(value);
    else if (key == "max_cells" || key == "max-cells") max_cells = parse_int(value);
    else throw BadParameter("unknown config key '" + key + "'");
  }
}

void validate_common(const ExperimentConfig& c) {
  parse_family(c.family);
  const bool jordan = parse_family(c.family) == Family::Jordan && c.eigs.empty();
  auto check_lambda = [&](double l) {
    if (jordan ? !(l > 0.0 && l < 1.0) : !(std::abs(l) < 1.0)) {
      throw BadParameter("lambda = " + format_double(l) + " is outside the stable range");
    }
  };
  if (c.lambda) check_lambda(*c.lambda);
  for (double l : c.lambda_list) check_lambda(l);
  for (double e : c.eigs) {
    if (!(std::abs(e) < 1.0)) throw BadParameter("eigs must lie in (-1, 1)");
  }
  std::vector<int> ns = c.n_list;
  if (c.n) ns.push_back(*c.n);
  for (int n : ns) {
    if (n < 1 || n > 64) throw BadParameter("n must lie in [1, 64]");
    if (!c.eigs.empty() && n != static_cast<int>(c.eigs.size())) {
      throw BadParameter("n must equal the number of eigs");
    }
  }
  std::vector<int> Ns = c.N_list;
  if (c.N) Ns.push_back(*c.N);
  const int n_max = ns.empty() ? 1 : *std::max_element(ns.begin(), ns.end());
  for (int N : Ns) {
    if (N <= n_max) throw BadParameter("N must exceed n");
    if (N > c.max_N) {
      throw BadParameter("N = " + std::to_string(N) + " exceeds the cap " +
                         std::to_string(c.max_N) + " (raise with --max-N)");
    }
  }
  if (c.trials) {
    if (*c.trials < 1) throw BadParameter("trials must be positive");
    if (*c.trials > c.max_trials) {
      throw BadParameter("trials = " + std::to_string(*c.trials) + " exceeds the cap " +
                         std::to_string(c.max_trials) + " (raise with --max-trials)");
    }
  }
  if (c.workers < 1) throw BadParameter("workers must be positive");
}

SystemSpec config_spec(const ExperimentConfig& c, double lambda, int n) {
  if (!c.eigs.empty()) return make_spec(HermitianDiagonal{c.eigs});
  return family_spec(parse_family(c.family), lambda, n);
}

DataBundle prefix(const DataBundle& b, int N) {
  if (N > b.length()) throw BadParameter("prefix longer than the trajectory");
  return DataBundle(b.spec(), b.x_minus().leftCols(N), b.x_plus().leftCols(N),
                    b.noise().leftCols(N), b.seed(), b.trial());
}

CellMetrics evaluate_bundle(const DataBundle& b) {
  CellMetrics m;
  const auto fit = ols_fit(b);
  m.error = fit.error_frobenius;
  m.noise_error = fit.noise_error;
  m.kappa = fit.kappa;
  const auto spec_report = spectrum(b.x_minus());
  m.sigma_max = spec_report.singular_values(0);
  m.sigma_min = spec_report.singular_values(spec_report.singular_values.size() - 1);
  m.talagrand = talagrand_ratio(b).ratio;
  if (!spec_report.degenerate) {
    m.bounds = error_bounds(b, spec_report);
    m.bounds_valid = true;
  } else {
    m.bounds = {kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
  }
  if (const auto* j = b.spec().jordan()) {
    std::tie(m.swsscs_lower, m.swsscs_upper) =
        sandwich_bound_swsscs(j->size, b.length(), j->lambda);
  } else {
    m.swsscs_lower = m.swsscs_upper = kNaN;
  }
  return m;
}

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{
      "row-curse", "row-no-curse", "sigma1-tracks-row",
      "talagrand-growth", "ols-transience", "error-sandwich"};
  return names;
}

FigureResult run_figure(const std::string& name, const ExperimentConfig& config) {
  if (name == "row-curse" || name == "row-no-curse") {
    return row_norm_figure(name, config);
  }
  if (name == "sigma1-tracks-row") return sigma1_figure(config);
  if (name == "talagrand-growth") return talagrand_figure(config);
  if (name == "ols-transience") return transience_figure(config);
  if (name == "error-sandwich") return sandwich_figure(config);
  throw UnknownFigure("unknown figure '" + name + "'");
}

std::vector<fs::path> write_figure(const FigureResult& fig, const fs::path& dir,
                                   bool plot) {
  std::vector<fs::path> written;
  std::vector<Curve> curves;
  for (const auto& c : fig.curves) {
    std::ostringstream csv;
    csv << "x,median,q25,q75\n";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      csv << format_double(c.x[i]) << ',' << format_double(c.median[i]) << ','
          << format_double(c.q25[i]) << ',' << format_double(c.q75[i]) << "\n";
    }
    const fs::path path = dir / (fig.name + "_" + c.label + ".csv");
    write_text(path, csv.str());
    written.push_back(path);
    curves.push_back({c.label, c.x, c.median});
  }
  if (plot) {
    const fs::path path = dir / (fig.name + ".svg");
    write_text(path, render_svg(curves, {fig.name, fig.x_label, fig.y_label, fig.log_y}));
    written.push_back(path);
  }
  return written;
}

std::string sweep_row_csv(const SweepRow& r) {
  const auto& m = r.median;
  std::ostringstream out;
  out << r.family << ',' << format_double(r.lambda) << ',' << r.n << ',' << r.N << ','
      << r.trials << ',' << r.seed;
  for (double v : {m.error, m.noise_error, m.sigma_max, m.sigma_min, m.kappa,
                   m.talagrand, m.bounds.lower_svd, m.bounds.upper_svd,
                   m.bounds.lower_2mom, m.bounds.upper_2mom,
                   m.bounds.sandwich_frob_lower, m.bounds.sandwich_frob_upper,
                   m.bounds.combined_upper, m.swsscs_lower, m.swsscs_upper,
                   r.bounds_valid_fraction}) {
    out << ',' << format_double(v);
  }
  return out.str();
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& c) {
  const std::vector<double> lambdas =
      !c.lambda_list.empty() ? c.lambda_list
                             : std::vector<double>{c.lambda.value_or(0.5)};
  const std::vector<int> ns =
      !c.n_list.empty() ? c.n_list : std::vector<int>{c.n.value_or(4)};
  const std::vector<int> Ns =
      !c.N_list.empty() ? c.N_list : std::vector<int>{c.N.value_or(500)};
  const int trials = c.trials.value_or(1);
  const std::size_t cells = lambdas.size() * ns.size() * Ns.size();
  if (cells == 0) throw BadParameter("sweep grid is empty");
  if (cells > static_cast<std::size_t>(c.max_cells)) {
    throw GridTooLarge("sweep grid has " + std::to_string(cells) + " cells, cap is " +
                       std::to_string(c.max_cells) + " (raise with --max-cells)");
  }
  ExperimentConfig check = c;
  check.lambda_list = lambdas;
  check.n_list = ns;
  check.N_list = Ns;
  check.trials = trials;
  validate_common(check);

  struct Cell {
    double lambda;
    int n;
    int N;
  };
  std::vector<Cell> grid;
  for (double l : lambdas) {
    for (int n : ns) {
      for (int N : Ns) grid.push_back({l, n, N});
    }
  }
  std::vector<SystemSpec> specs;
  for (const auto& cell : grid) specs.push_back(config_spec(c, cell.lambda, cell.n));

  std::vector<CellMetrics> metrics(grid.size() * trials);
  parallel_for(metrics.size(), c.workers, [&](std::size_t k) {
    const std::size_t g = k / trials;
    const std::size_t t = k % trials;
    metrics[k] = evaluate_bundle(simulate(specs[g], grid[g].N, c.seed, t));
  });

  std::vector<SweepRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SweepRow row;
    row.family = c.eigs.empty() ? to_string(parse_family(c.family)) : "hermitian";
    row.lambda = grid[g].lambda;
    row.n = grid[g].n;
    row.N = grid[g].N;
    row.trials = trials;
    row.seed = c.seed;
    const auto begin = metrics.begin() + g * trials;
    const auto end = begin + trials;
    const auto med = [&](auto field) {
      std::vector<double> v;
      for (auto it = begin; it != end; ++it) v.push_back(field(*it));
      return finite_median(v);
    };
    auto& m = row.median;
    m.error = med([](const CellMetrics& x) { return x.error; });
    m.noise_error = med([](const CellMetrics& x) { return x.noise_error; });
    m.sigma_max = med([](const CellMetrics& x) { return x.sigma_max; });
    m.sigma_min = med([](const CellMetrics& x) { return x.sigma_min; });
    m.kappa = med([](const CellMetrics& x) { return x.kappa; });
    m.talagrand = med([](const CellMetrics& x) { return x.talagrand; });
    m.bounds.lower_svd = med([](const CellMetrics& x) { return x.bounds.lower_svd; });
    m.bounds.upper_svd = med([](const CellMetrics& x) { return x.bounds.upper_svd; });
    m.bounds.lower_2mom = med([](const CellMetrics& x) { return x.bounds.lower_2mom; });
    m.bounds.upper_2mom = med([](const CellMetrics& x) { return x.bounds.upper_2mom; });
    m.bounds.sandwich_frob_lower =
        med([](const CellMetrics& x) { return x.bounds.sandwich_frob_lower; });
    m.bounds.sandwich_frob_upper =
        med([](const CellMetrics& x) { return x.bounds.sandwich_frob_upper; });
    m.bounds.combined_upper =
        med([](const CellMetrics& x) { return x.bounds.combined_upper; });
    m.swsscs_lower = begin->swsscs_lower;
    m.swsscs_upper = begin->swsscs_upper;
    int valid = 0;
    for (auto it = begin; it != end; ++it) valid += it->bounds_valid;
    row.bounds_valid_fraction = static_cast<double>(valid) / trials;
    m.bounds_valid = valid == trials;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ldslab
