#include "slicing/cli/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "slicing/errors.hpp"
#include "slicing/version.hpp"

namespace slicing::cli {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw Error("csv row has the wrong number of cells");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << str();
}

void RunReport::add_check(std::string name, double lhs, double rhs, bool pass, std::string note) {
  checks.push_back({std::move(name), lhs, rhs, pass, std::move(note)});
}

bool RunReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  doc["version"] = kVersion;
  doc["seed"] = seed;
  doc["config"] = config;
  auto list = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json item;
    item["name"] = c.name;
    item["lhs"] = std::isfinite(c.lhs) ? nlohmann::ordered_json(c.lhs) : nlohmann::ordered_json(format_number(c.lhs));
    item["rhs"] = std::isfinite(c.rhs) ? nlohmann::ordered_json(c.rhs) : nlohmann::ordered_json(format_number(c.rhs));
    item["pass"] = c.pass;
    if (!c.note.empty()) item["note"] = c.note;
    list.push_back(std::move(item));
  }
  doc["checks"] = std::move(list);
  doc["fitted"] = fitted;
  doc["pass"] = all_pass();
  if (include_timings) doc["timings"] = timings;
  return doc;
}

void RunReport::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

}  // namespace slicing::cli
