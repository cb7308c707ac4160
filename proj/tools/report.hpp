#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace bpkpz::cli {

using json = nlohmann::json;

/// Parses "start:stop:step", plain numbers, or comma-separated mixes of both.
std::vector<double> parse_grid(const std::string& text);
/// Comma-separated integers, each optionally in start:stop:step form.
std::vector<long long> parse_int_list(const std::string& text);

struct Report {
  std::string experiment;
  json config = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  std::string status = "pass";  // pass | warn | fail
  bool converged = true;
  json details = json::object();
  double wall_seconds = 0.0;
  std::optional<std::uint64_t> seed;

  void add_row(std::vector<json> row) { rows.push_back(std::move(row)); }
  void fail() { status = "fail"; }
  void warn() {
    if (status == "pass") status = "warn";
  }
  /// 0 pass or warn, 1 tolerance failure, 3 non-convergence.
  int exit_code() const;
  json to_json() const;
  std::string csv() const;
  void write(const std::filesystem::path& dir) const;
};

std::string format_cell(const json& v);

}  // namespace bpkpz::cli
