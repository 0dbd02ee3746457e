#pragma once

// The plot command: render recognized CSV schemas ("acceptance", "acf") to
// SVG. Schema or data problems abort before any file is written.

#include <map>
#include <string>
#include <vector>

#include "cubewalk/csv.hpp"
#include "cubewalk/svg.hpp"

namespace cubewalk {

inline std::string cmd_plot(const std::string& csv_path,
                            const std::string& kind,
                            const std::string& out_path,
                            const std::string& functional_id = "u0") {
  const CsvTable table = read_csv(csv_path);
  if (table.rows.empty())
    throw ConfigError("plot: no data rows in " + csv_path);

  std::string svg;
  auto meta = [&table](const std::string& key) {
    return table.metadata.count(key) ? table.metadata.at(key) : "unknown";
  };
  // provenance comes from the CSV preamble, not the file path, so the
  // rendered bytes depend only on the data
  const std::string provenance =
      std::string("artifact_version=") + kArtifactVersion +
      " config_hash=" + meta("config_hash") +
      " master_seed=" + meta("master_seed");
  if (kind == "acceptance") {
    if (!table.has_columns({"algorithm", "K", "epsilon", "accept_rate"}))
      throw ConfigError(
          "plot: csv does not match the acceptance schema "
          "(algorithm,K,epsilon,accept_rate)");
    const int ca = table.column("algorithm"), ck = table.column("K");
    const int ce = table.column("epsilon"), cr = table.column("accept_rate");
    std::vector<PlotSeries> series;
    std::map<std::string, std::size_t> index;
    for (const auto& row : table.rows) {
      const std::string label = row[ca] + " K=" + row[ck];
      if (!index.count(label)) {
        index[label] = series.size();
        series.push_back({label, {}});
      }
      series[index[label]].points.emplace_back(std::stod(row[ce]),
                                               std::stod(row[cr]));
    }
    svg = render_line_plot("Acceptance rate vs step size", "epsilon",
                           "acceptance rate", series, provenance,
                           /*log_x=*/true);
  } else if (kind == "acf") {
    if (!table.has_columns(
            {"algorithm", "K", "epsilon", "functional_id", "lag", "rho"}))
      throw ConfigError(
          "plot: csv does not match the acf schema "
          "(algorithm,K,epsilon,functional_id,lag,rho)");
    const int ca = table.column("algorithm"), ck = table.column("K");
    const int cf = table.column("functional_id");
    const int cl = table.column("lag"), cr = table.column("rho");
    std::vector<PlotSeries> series;
    std::map<std::string, std::size_t> index;
    for (const auto& row : table.rows) {
      if (row[cf] != functional_id) continue;
      const std::string label = row[ca] + " K=" + row[ck];
      if (!index.count(label)) {
        index[label] = series.size();
        series.push_back({label, {}});
      }
      series[index[label]].points.emplace_back(std::stod(row[cl]),
                                               std::stod(row[cr]));
    }
    if (series.empty())
      throw ConfigError("plot: no rows for functional '" + functional_id +
                        "'");
    svg = render_line_plot("Autocorrelation of " + functional_id, "lag",
                           "rho", series,
                           provenance + " functional=" + functional_id);
  } else {
    throw ConfigError("plot: unknown kind '" + kind +
                      "' (expected acceptance or acf)");
  }
  write_text_file(out_path, svg);
  return svg;
}

}  // namespace cubewalk
