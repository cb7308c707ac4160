#include "report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bpkpz::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  for (const std::string& tok : split(text, ',')) {
    if (tok.empty()) continue;
    const auto parts = split(tok, ':');
    if (parts.size() == 1) {
      out.push_back(to_double(parts[0]));
    } else if (parts.size() == 3) {
      const double a = to_double(parts[0]), b = to_double(parts[1]), s = to_double(parts[2]);
      if (!(s > 0.0) || b < a) throw std::invalid_argument("bad grid '" + tok + "': need step > 0, stop >= start");
      const auto n = static_cast<long long>(std::floor((b - a) / s + 1e-9));
      if (n > 1000000) throw std::invalid_argument("grid '" + tok + "' is too large");
      for (long long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * s);
    } else {
      throw std::invalid_argument("bad grid token '" + tok + "'");
    }
  }
  return out;
}

std::vector<long long> parse_int_list(const std::string& text) {
  std::vector<long long> out;
  for (double v : parse_grid(text)) {
    if (v != std::floor(v)) throw std::invalid_argument("expected integers in '" + text + "'");
    out.push_back(static_cast<long long>(v));
  }
  return out;
}

int Report::exit_code() const {
  if (!converged) return 3;
  return status == "fail" ? 1 : 0;
}

std::string format_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

json Report::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["config"] = config;
  if (seed) j["seed"] = *seed;
  j["status"] = status;
  j["pass"] = status != "fail" && converged;
  j["converged"] = converged;
  j["exit_code"] = exit_code();
  j["columns"] = columns;
  j["rows"] = rows;
  j["details"] = details;
  j["wall_seconds"] = wall_seconds;
  return j;
}

std::string Report::csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
  return out.str();
}

void Report::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "report.json") << to_json().dump(2) << '\n';
  std::ofstream(dir / "rows.csv") << csv();
}

}  // namespace bpkpz::cli
