#include "lmdp/train_log.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lmdp {

std::vector<std::string> train_log_columns() {
  return {"iteration", "samples_cumulative", "mode",   "reward_mean", "reward_ci95",
          "ln_kappa",  "avg_err",            "lambda", "wall_ms"};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number \"" + s + "\"");
  return v;
}

void write_train_log_csv(std::ostream& out, const std::vector<TrainLogRow>& rows, bool include_wall) {
  out << "schema_version," << kTrainLogSchemaVersion << '\n';
  const auto cols = train_log_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    out << r.iteration << ',' << r.samples_cumulative << ',' << r.mode << ','
        << format_double(r.reward_mean) << ',' << format_double(r.reward_ci95) << ','
        << format_double(r.ln_kappa) << ',' << format_double(r.avg_err) << ','
        << format_double(r.lambda) << ',' << (include_wall ? format_double(r.wall_ms) : "0") << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<TrainLogRow> read_train_log_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty train log");
  auto version = split(line);
  if (version.size() != 2 || version[0] != "schema_version")
    throw std::runtime_error("train log: missing schema_version row");
  if (std::stoi(version[1]) != kTrainLogSchemaVersion)
    throw std::runtime_error("train log: unsupported schema version " + version[1]);
  if (!std::getline(in, line)) throw std::runtime_error("train log: missing header");
  const auto header = split(line);
  const auto expected = train_log_columns();
  if (header != expected) {
    std::string msg = "train log: schema mismatch; offending columns:";
    for (std::size_t i = 0; i < std::max(header.size(), expected.size()); ++i) {
      const std::string got = i < header.size() ? header[i] : "<missing>";
      const std::string want = i < expected.size() ? expected[i] : "<none>";
      if (got != want) msg += " [" + std::to_string(i) + "] " + got + " (expected " + want + ")";
    }
    throw std::runtime_error(msg);
  }
  std::vector<TrainLogRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != expected.size()) throw std::runtime_error("train log: ragged row: " + line);
    TrainLogRow r;
    r.iteration = std::stoi(c[0]);
    r.samples_cumulative = std::stoull(c[1]);
    r.mode = c[2];
    r.reward_mean = parse_double(c[3]);
    r.reward_ci95 = parse_double(c[4]);
    r.ln_kappa = parse_double(c[5]);
    r.avg_err = parse_double(c[6]);
    r.lambda = parse_double(c[7]);
    r.wall_ms = parse_double(c[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_theta_trace_csv(std::ostream& out, const std::vector<Eigen::VectorXd>& trace) {
  const Eigen::Index d = trace.empty() ? 0 : trace.front().size();
  out << "iteration";
  for (Eigen::Index k = 0; k < d; ++k) out << ",theta_" << k;
  out << '\n';
  for (std::size_t t = 0; t < trace.size(); ++t) {
    out << t;
    for (Eigen::Index k = 0; k < trace[t].size(); ++k) out << ',' << format_double(trace[t][k]);
    out << '\n';
  }
}

}  // namespace lmdp
