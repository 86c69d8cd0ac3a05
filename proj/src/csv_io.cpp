#include "mkt/csv_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "mkt/errors.hpp"

namespace mkt {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParameterError(what + ": cannot parse '" + s + "' as a number");
  }
}

// Reads non-empty lines after a header that must match `expected` exactly.
std::vector<std::vector<std::string>> read_table(std::istream& in, const std::vector<std::string>& expected,
                                                 const std::string& what) {
  std::string line;
  while (std::getline(in, line) && trim(line).empty()) {
  }
  if (split(trim(line), ',') != expected) throw ParameterError(what + ": unexpected header '" + line + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split(trim(line), ',');
    if (cells.size() != expected.size()) throw ParameterError(what + ": malformed row '" + line + "'");
    rows.push_back(std::move(cells));
  }
  return rows;
}

struct PrecisionGuard {
  std::ostream& out;
  std::streamsize old;
  explicit PrecisionGuard(std::ostream& o) : out(o), old(o.precision(17)) {}
  ~PrecisionGuard() { out.precision(old); }
};

}  // namespace

void write_moments_csv(std::ostream& out, const MomentSequence& m) {
  PrecisionGuard g(out);
  out << "n,value\n";
  for (std::size_t n = 0; n <= m.n_max(); ++n) out << n << ',' << m[n] << '\n';
}

MomentSequence read_moments_csv(std::istream& in) {
  const auto rows = read_table(in, {"n", "value"}, "moment csv");
  if (rows.empty()) throw ParameterError("moment csv: no rows");
  std::vector<double> values;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double n = parse_double(rows[k][0], "moment csv");
    if (n != static_cast<double>(k)) throw ParameterError("moment csv: rows must be n = 0, 1, 2, ... in order");
    values.push_back(parse_double(rows[k][1], "moment csv"));
  }
  if (values[0] != 1.0) throw ParameterError("moment csv: row 0 must have value 1");
  return MomentSequence(std::move(values));
}

MomentSequence read_moments_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  return read_moments_csv(in);
}

void write_measure_csv(std::ostream& out, const AtomicMeasure& m) {
  PrecisionGuard g(out);
  out << "location,weight\n";
  for (std::size_t i = 0; i < m.size(); ++i) out << m.locations()[i] << ',' << m.weights()[i] << '\n';
}

AtomicMeasure read_measure_csv(std::istream& in) {
  const auto rows = read_table(in, {"location", "weight"}, "measure csv");
  std::vector<double> x, w;
  for (const auto& r : rows) {
    x.push_back(parse_double(r[0], "measure csv"));
    w.push_back(parse_double(r[1], "measure csv"));
  }
  return AtomicMeasure(std::move(x), std::move(w));
}

void write_sample_header(std::ostream& out, std::size_t n, bool weights) {
  out << "replica";
  for (std::size_t i = 1; i <= n; ++i) out << ",lambda_" << i;
  if (weights)
    for (std::size_t i = 1; i <= n; ++i) out << ",w_" << i;
  out << '\n';
}

void write_sample_row(std::ostream& out, std::size_t replica, const AtomicMeasure& spectral, bool weights) {
  PrecisionGuard g(out);
  out << replica;
  for (double x : spectral.locations()) out << ',' << x;
  if (weights)
    for (double w : spectral.weights()) out << ',' << w;
  out << '\n';
}

void write_flow_csv(std::ostream& out, const MomentFlow& flow, std::span<const double> t_grid,
                    std::size_t n_max) {
  PrecisionGuard g(out);
  out << "t,n,m_n\n";
  for (double t : t_grid)
    for (std::size_t n = 0; n <= n_max; ++n) out << t << ',' << n << ',' << flow.value(n, t) << '\n';
}

void write_moment_path_header(std::ostream& out) { out << "rep,t,n,S_n\n"; }

void write_moment_path_rows(std::ostream& out, std::size_t rep, const ParticlePath& path, std::size_t n_max) {
  PrecisionGuard g(out);
  const auto s = empirical_moment_paths(path, n_max);
  for (std::size_t k = 0; k < s.size(); ++k)
    for (std::size_t n = 0; n <= n_max; ++n)
      out << rep << ',' << path.times[k] << ',' << n << ',' << s[k][n] << '\n';
}

void write_positions_header(std::ostream& out, std::size_t n) {
  out << "rep,t";
  for (std::size_t i = 1; i <= n; ++i) out << ",x_" << i;
  out << '\n';
}

void write_positions_rows(std::ostream& out, std::size_t rep, const ParticlePath& path) {
  PrecisionGuard g(out);
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    out << rep << ',' << path.times[k];
    for (double x : path.positions[k]) out << ',' << x;
    out << '\n';
  }
}

void write_estimates_csv(std::ostream& out, const MomentEstimates& e) {
  PrecisionGuard g(out);
  out << "t,n,mean,stderr\n";
  for (std::size_t k = 0; k < e.times.size(); ++k)
    for (std::size_t n = 0; n < e.mean[k].size(); ++n)
      out << e.times[k] << ',' << n << ',' << e.mean[k][n] << ',' << e.stderr_[k][n] << '\n';
}

std::vector<double> parse_time_grid(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ParameterError("time grid: empty");
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw ParameterError("time grid: expected start:step:stop");
    const double start = parse_double(parts[0], "time grid");
    const double step = parse_double(parts[1], "time grid");
    const double stop = parse_double(parts[2], "time grid");
    if (!(step > 0.0) || stop < start) throw ParameterError("time grid: need step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) out.push_back(start + static_cast<double>(k) * step);
  } else {
    for (const auto& p : split(s, ',')) out.push_back(parse_double(p, "time grid"));
  }
  for (double t : out) if (!(t >= 0.0)) throw ParameterError("time grid: times must be >= 0");
  return out;
}

}  // namespace mkt
