#pragma once

#include "specbreak/detector.hpp"
#include "specbreak/experiments.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace specbreak {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  Eigen::MatrixXd values;
};

/**
 * Comma-separated numeric table; the first row is a header iff one of its
 * cells is not a number. Throws DataError on ragged rows or non-numeric
 * cells.
 */
[[nodiscard]] CsvTable parse_csv(std::string_view text);

/**
 * Reads the selected 0-based columns (all when empty) and subtracts the column
 * means. Throws IoError for unreadable files and DataError for malformed
 * tables, fewer than 64 rows or a zero-variance column.
 */
[[nodiscard]] TimeSeries ingest_csv(const std::filesystem::path& path, const std::vector<Index>& columns = {});

/// Rows = time, columns = components, header x1..xd, 17 significant digits.
[[nodiscard]] std::string to_csv(const TimeSeries& series);

[[nodiscard]] std::string read_text(const std::filesystem::path& path);

/// Writes through a temporary file and a rename, so readers never see partial output.
void write_text(const std::filesystem::path& path, std::string_view text);

[[nodiscard]] nlohmann::json to_json(const Eigen::MatrixXd& matrix);
[[nodiscard]] Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows);

[[nodiscard]] nlohmann::json to_json(const ARModel& model);
[[nodiscard]] ARModel ar_model_from_json(const nlohmann::json& value);

[[nodiscard]] nlohmann::json to_json(const BreakReport& report);
/// Inverse of to_json(BreakReport); throws ConfigError on malformed input.
[[nodiscard]] BreakReport report_from_json(const nlohmann::json& value);

/// Entries [k][a][b] = [re, im] of P(m, k) for one grid index m.
[[nodiscard]] nlohmann::json grid_slice_json(const DGrid& grid, Index m);

[[nodiscard]] nlohmann::json to_json(const McResult& result, Index bins = 50);
[[nodiscard]] nlohmann::json to_json(const KernelResult& result);

/// Long format: component,v,value,threshold with 1-based "a,b" component labels.
[[nodiscard]] std::string curves_csv(const BreakReport& report);

/// bin_left,bin_right,count over [0, 1].
[[nodiscard]] std::string histogram_csv(const McResult& result, Index bins = 50);

/// Pretty JSON with a trailing newline.
[[nodiscard]] std::string dump(const nlohmann::json& value);

}  // namespace specbreak
