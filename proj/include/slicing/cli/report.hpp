#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

namespace slicing::cli {

/// Shortest text that round-trips a double (17 significant digits).
std::string format_number(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CheckResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  std::string note;
};

/// Machine-readable summary of one command run.
struct RunReport {
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<CheckResult> checks;
  nlohmann::ordered_json fitted = nlohmann::ordered_json::object();
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  bool include_timings = false;

  void add_check(std::string name, double lhs, double rhs, bool pass, std::string note = {});
  bool all_pass() const;
  nlohmann::ordered_json to_json() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace slicing::cli
