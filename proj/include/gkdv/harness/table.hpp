#pragma once

// Tabular artifacts. Every table carries a versioned schema name.
//
// CSV layout (bit-exact):
//   line 1   #schema=<name>/v<version>
//   line 2   comma-separated column names
//   rest     one row per line, '\n' terminated
// Reals are printed with printf "%.17g" (round-trip exact); non-finite
// reals are written as inf, -inf and nan. Integers are printed in decimal
// and strings verbatim (they never contain commas, quotes or newlines).
//
// JSON layout: {"schema": "<name>/v<version>", "columns": [...], "rows": [[...], ...]}
// with non-finite reals written as the strings "inf", "-inf" and "nan".

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gkdv/errors.hpp"

namespace gkdv::harness {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::string name;
  int version = 1;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string schema() const { return name + "/v" + std::to_string(version); }

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw IntegrityError("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(columns.size()));
    rows.push_back(std::move(row));
  }
};

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline std::string to_csv(const Table& t) {
  std::string out = "#schema=" + t.schema() + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += "\n";
  }
  return out;
}

inline nlohmann::json json_real(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

inline nlohmann::json to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) {
      if (const auto* d = std::get_if<double>(&c))
        r.push_back(json_real(*d));
      else if (const auto* i = std::get_if<std::int64_t>(&c))
        r.push_back(*i);
      else
        r.push_back(std::get<std::string>(c));
    }
    rows.push_back(std::move(r));
  }
  nlohmann::json j;
  j["schema"] = t.schema();
  j["columns"] = t.columns;
  j["rows"] = std::move(rows);
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigurationError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw ConfigurationError("write to " + path.string() + " failed");
}

/// Writes <dir>/<name>.csv or <dir>/<name>.json and returns the file name.
inline std::string write_table(const std::filesystem::path& dir, const Table& t, bool json) {
  const std::string file = t.name + (json ? ".json" : ".csv");
  write_text(dir / file, json ? to_json(t).dump(2) + "\n" : to_csv(t));
  return file;
}

}  // namespace gkdv::harness
