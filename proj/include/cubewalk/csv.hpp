#pragma once

// CSV output with an embedded provenance preamble. Every file starts with
//
//   # artifact_version=...
//   # config_hash=...
//   # master_seed=...
//
// followed by a header row. Numbers are printed with fixed printf formats,
// so identical inputs reproduce byte-identical files.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubewalk/config.hpp"

namespace cubewalk {

/// %.12g for report values; %.17g (round-trip exact) for data files.
inline std::string format_double(double v, int precision = 12) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_hash,
            std::uint64_t master_seed, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    out_ << "# artifact_version=" << kArtifactVersion << "\n";
    out_ << "# config_hash=" << config_hash << "\n";
    out_ << "# master_seed=" << master_seed << "\n";
    write_row_strings(header);
  }

  void write_row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

  CsvWriter& cell(const std::string& s) {
    row_.push_back(s);
    return *this;
  }
  CsvWriter& cell(double v, int precision = 12) {
    row_.push_back(format_double(v, precision));
    return *this;
  }
  CsvWriter& cell(std::int64_t v) {
    row_.push_back(std::to_string(v));
    return *this;
  }
  CsvWriter& cell(int v) {
    row_.push_back(std::to_string(v));
    return *this;
  }
  CsvWriter& cell(std::uint64_t v) {
    row_.push_back(std::to_string(v));
    return *this;
  }
  void end_row() {
    write_row_strings(row_);
    row_.clear();
  }

 private:
  std::ofstream out_;
  std::vector<std::string> row_;
};

/// Parsed CSV: preamble metadata plus header and string cells.
struct CsvTable {
  std::map<std::string, std::string> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }

  bool has_columns(const std::vector<std::string>& names) const {
    for (const auto& n : names)
      if (column(n) < 0) return false;
    return true;
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);
  CsvTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = detail::trim(line.substr(1, eq - 1));
        table.metadata[key] = detail::trim(line.substr(eq + 1));
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      table.header = cells;
      header_seen = true;
    } else {
      table.rows.push_back(cells);
    }
  }
  return table;
}

}  // namespace cubewalk
