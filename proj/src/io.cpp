#include "ldslab/io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "ldslab/errors.hpp"

namespace ldslab {

namespace fs = std::filesystem;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_double(values[i]);
  }
  return out;
}

namespace {

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok));
  return out;
}

const std::string& require(const std::map<std::string, std::string>& kv,
                           const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("missing key '" + key + "'");
  return it->second;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("not an unsigned integer: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string spec_to_kv(const SystemSpec& spec) {
  std::ostringstream out;
  out << "variant=" << spec.variant_name() << "\n";
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, HermitianDiagonal>) {
          out << "eigs=" << format_list(d.eigs) << "\n";
        } else if constexpr (std::is_same_v<T, JordanBlock>) {
          out << "lambda=" << format_double(d.lambda) << "\n";
          out << "size=" << d.size << "\n";
        } else if constexpr (std::is_same_v<T, BlockDiagonal>) {
          out << "blocks=";
          for (std::size_t i = 0; i < d.blocks.size(); ++i) {
            if (i) out << ' ';
            out << format_double(d.blocks[i].lambda) << ':' << d.blocks[i].size;
          }
          out << "\n";
        } else {
          std::vector<double> flat;
          for (Index r = 0; r < d.matrix.rows(); ++r) {
            for (Index c = 0; c < d.matrix.cols(); ++c) flat.push_back(d.matrix(r, c));
          }
          out << "dim=" << d.matrix.rows() << "\n";
          out << "matrix=" << format_list(flat) << "\n";
        }
      },
      spec.description());
  return out.str();
}

SystemSpec spec_from_kv(const std::map<std::string, std::string>& kv) {
  const std::string& variant = require(kv, "variant");
  if (variant == "HermitianDiagonal") {
    return make_spec(HermitianDiagonal{parse_list(require(kv, "eigs"))});
  }
  if (variant == "JordanBlock") {
    return make_spec(JordanBlock{parse_double(require(kv, "lambda")),
                                 static_cast<int>(parse_u64(require(kv, "size")))});
  }
  if (variant == "BlockDiagonal") {
    BlockDiagonal bd;
    std::istringstream in(require(kv, "blocks"));
    std::string tok;
    while (in >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw FormatError("block must be lambda:size");
      bd.blocks.push_back({parse_double(tok.substr(0, colon)),
                           static_cast<int>(parse_u64(tok.substr(colon + 1)))});
    }
    return make_spec(std::move(bd));
  }
  if (variant == "Dense") {
    const auto dim = static_cast<Index>(parse_u64(require(kv, "dim")));
    const auto flat = parse_list(require(kv, "matrix"));
    if (static_cast<Index>(flat.size()) != dim * dim) {
      throw FormatError("dense matrix needs dim*dim entries");
    }
    MatrixXd m(dim, dim);
    for (Index r = 0; r < dim; ++r) {
      for (Index c = 0; c < dim; ++c) m(r, c) = flat[r * dim + c];
    }
    return make_spec(Dense{m});
  }
  throw FormatError("unknown variant '" + variant + "'");
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("line " + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

std::map<std::string, std::string> read_kv_file(const fs::path& path) {
  return parse_kv(read_text(path));
}

void write_matrix_csv(std::ostream& out, const MatrixXd& m) {
  for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << "col_" << c;
  out << "\n";
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      out << (c ? "," : "") << format_double(m(r, c));
    }
    out << "\n";
  }
}

MatrixXd read_matrix_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  const auto cols = static_cast<Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (static_cast<Index>(row.size()) != cols) {
      throw FormatError(path.string() + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  MatrixXd m(static_cast<Index>(rows.size()), cols);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

void save_bundle(const DataBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  const auto dump = [&](const char* name, const MatrixXd& m) {
    std::ostringstream s;
    write_matrix_csv(s, m);
    write_text(dir / name, s.str());
  };
  dump("x_minus.csv", bundle.x_minus());
  dump("x_plus.csv", bundle.x_plus());
  dump("noise.csv", bundle.noise());
  std::ostringstream meta;
  meta << spec_to_kv(bundle.spec());
  meta << "n=" << bundle.dim() << "\n";
  meta << "N=" << bundle.length() << "\n";
  meta << "seed=" << bundle.seed() << "\n";
  meta << "trial=" << bundle.trial() << "\n";
  write_text(dir / "bundle.meta", meta.str());
}

DataBundle load_bundle(const fs::path& dir) {
  const auto kv = read_kv_file(dir / "bundle.meta");
  return DataBundle(spec_from_kv(kv), read_matrix_csv(dir / "x_minus.csv"),
                    read_matrix_csv(dir / "x_plus.csv"),
                    read_matrix_csv(dir / "noise.csv"),
                    parse_u64(require(kv, "seed")), parse_u64(require(kv, "trial")));
}

void write_spectrum_csv(std::ostream& out, const SpectrumReport<double>& report,
                        const PrecisionReport<double>* precision) {
  out << "j,sigma_j,lambda_j,distance_j,v_jj,residual_lin1,max_residual_lin2\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Index j = 0; j < report.singular_values.size(); ++j) {
    out << j + 1 << ',' << format_double(report.singular_values(j)) << ','
        << format_double(report.eigenvalues(j)) << ','
        << format_double(report.distances(j)) << ','
        << format_double(precision ? precision->precision(j, j) : nan) << ','
        << format_double(precision ? precision->residual_lin1(j) : nan) << ','
        << format_double(precision ? precision->residual_lin2.row(j).maxCoeff() : nan)
        << "\n";
  }
}

std::string ols_row_csv(const OlsRow& r) {
  std::ostringstream out;
  out << r.seed << ',' << r.n << ',' << r.N << ',' << format_double(r.lambda) << ','
      << format_double(r.error) << ',' << format_double(r.noise_error) << ','
      << format_double(r.bounds.lower_svd) << ','
      << format_double(r.bounds.upper_svd) << ','
      << format_double(r.bounds.lower_2mom) << ','
      << format_double(r.bounds.upper_2mom) << ','
      << format_double(r.bounds.sandwich_frob_lower) << ','
      << format_double(r.bounds.sandwich_frob_upper) << ','
      << format_double(r.bounds.combined_upper) << ',' << format_double(r.kappa);
  return out.str();
}

void write_talagrand_trials_csv(std::ostream& out, const ScalingStudy& study) {
  out << "lambda,n,N,trial,ratio\n";
  for (const auto& p : study.points) {
    for (std::size_t t = 0; t < p.ratios.size(); ++t) {
      out << format_double(study.lambda) << ',' << p.n << ',' << study.N << ','
          << t << ',' << format_double(p.ratios[t]) << "\n";
    }
  }
}

void write_talagrand_summary_csv(std::ostream& out, const ScalingStudy& study) {
  out << "n,median_ratio,q99,log_median\n";
  for (const auto& p : study.points) {
    out << p.n << ',' << format_double(p.median_ratio) << ','
        << format_double(p.q99) << ',' << format_double(p.log_median) << "\n";
  }
}

void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows) {
  out << "name,lambda,rho,n,N,value,lower_bound,upper_bound\n";
  for (const auto& r : rows) {
    out << r.name << ',' << format_double(r.lambda) << ',' << format_double(r.rho)
        << ',' << r.n << ',' << r.N << ',' << format_double(r.value) << ','
        << format_double(r.lower_bound) << ',' << format_double(r.upper_bound)
        << "\n";
  }
}

void write_samples_csv(std::ostream& out, const std::vector<double>& samples) {
  out << "trial,value\n";
  for (std::size_t t = 0; t < samples.size(); ++t) {
    out << t << ',' << format_double(samples[t]) << "\n";
  }
}

void write_estimate_csv(std::ostream& out, const EstimateWithCI& e) {
  out << "mean,std,standard_error,q05,q25,q50,q75,q95,q99,trials,base_seed\n";
  out << format_double(e.mean) << ',' << format_double(e.std) << ','
      << format_double(e.standard_error);
  for (double q : e.quantiles) out << ',' << format_double(q);
  out << ',' << e.trials << ',' << e.base_seed << "\n";
}

}  // namespace ldslab
