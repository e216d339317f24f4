#include "specbreak/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace specbreak {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

std::string format_double(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

std::string label(Index a, Index b) { return std::to_string(a + 1) + "," + std::to_string(b + 1); }

template <typename T>
T get(const nlohmann::json& value, const char* key) {
  if (!value.contains(key)) throw ConfigError(std::string("report JSON lacks \"") + key + "\"");
  return value.at(key).get<T>();
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool first = true;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size(); ++i) numeric = parse_number(cells[i], row[i]) && numeric;
    if (first) {
      width = cells.size();
      first = false;
      if (!numeric) {
        for (auto c : cells) table.header.emplace_back(c);
        continue;
      }
    }
    if (cells.size() != width) {
      throw DataError("ragged CSV: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(width));
    }
    if (!numeric) throw DataError("non-numeric cell on line " + std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t c = 0; c < width; ++c) table.values(static_cast<Index>(t), static_cast<Index>(c)) = rows[t][c];
  }
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  auto temporary = path;
  temporary += ".partial";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("failed writing " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(temporary, path, ec);
  if (ec) {
    std::filesystem::remove(temporary, ec);
    throw IoError("cannot write " + path.string());
  }
}

TimeSeries ingest_csv(const std::filesystem::path& path, const std::vector<Index>& columns) {
  const CsvTable table = parse_csv(read_text(path));
  if (table.values.rows() < 64) {
    throw DataError("need at least 64 observations, found " + std::to_string(table.values.rows()));
  }
  Eigen::MatrixXd selected;
  if (columns.empty()) {
    selected = table.values;
  } else {
    selected.resize(table.values.rows(), static_cast<Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const Index c = columns[j];
      if (c < 0 || c >= table.values.cols()) {
        throw DataError("column " + std::to_string(c + 1) + " does not exist");
      }
      selected.col(static_cast<Index>(j)) = table.values.col(c);
    }
  }
  if (selected.cols() == 0) throw DataError("no columns selected");
  TimeSeries series(std::move(selected));
  if (const Index c = zero_variance_column(series); c >= 0) {
    throw DataError("column " + std::to_string(c + 1) + " has zero variance");
  }
  return center(series);
}

std::string to_csv(const TimeSeries& series) {
  std::string out;
  for (Index c = 0; c < series.dimension(); ++c) {
    out += (c ? ",x" : "x") + std::to_string(c + 1);
  }
  out += '\n';
  for (Index t = 0; t < series.length(); ++t) {
    for (Index c = 0; c < series.dimension(); ++c) {
      if (c) out += ',';
      out += format_double(series.values()(t, c));
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const Eigen::MatrixXd& matrix) {
  auto rows = nlohmann::json::array();
  for (Index i = 0; i < matrix.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Index j = 0; j < matrix.cols(); ++j) row.push_back(matrix(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
  if (!rows.is_array()) throw ConfigError("matrix must be an array of rows");
  const auto r = static_cast<Index>(rows.size());
  const Index c = r > 0 ? static_cast<Index>(rows.at(0).size()) : 0;
  Eigen::MatrixXd out(r, c);
  for (Index i = 0; i < r; ++i) {
    if (!rows.at(i).is_array() || static_cast<Index>(rows.at(i).size()) != c) {
      throw ConfigError("matrix rows must have equal length");
    }
    for (Index j = 0; j < c; ++j) out(i, j) = rows.at(i).at(j).get<double>();
  }
  return out;
}

nlohmann::json to_json(const ARModel& model) {
  auto coefficients = nlohmann::json::array();
  for (const auto& a : model.coefficients) coefficients.push_back(to_json(a));
  return {{"p", model.order()}, {"coefficients", coefficients}, {"sigma", to_json(model.innovation_cov)}};
}

ARModel ar_model_from_json(const nlohmann::json& value) {
  ARModel model;
  for (const auto& a : value.at("coefficients")) model.coefficients.push_back(matrix_from_json(a));
  model.innovation_cov = matrix_from_json(value.at("sigma"));
  return model;
}

nlohmann::json to_json(const BreakReport& report) {
  nlohmann::json out;
  out["test"] = {{"statistic", report.test.statistic}, {"pValue", report.test.p_value},
                 {"reject", report.test.reject},       {"alpha", report.test.alpha},
                 {"B", report.test.replicates},        {"N", report.test.window}};
  out["tuning"] = {{"gamma", report.tuning.gamma}, {"N_detect", report.tuning.detect_window},
                   {"N_test", report.tuning.test_window}, {"p", report.tuning.order},
                   {"seed", report.tuning.seed}};
  out["K"] = report.break_count();
  auto breaks = nlohmann::json::array();
  for (const auto& b : report.breaks) {
    auto mask = nlohmann::json::array();
    for (Index i = 0; i < b.components.rows(); ++i) {
      auto row = nlohmann::json::array();
      for (Index j = 0; j < b.components.cols(); ++j) row.push_back(static_cast<bool>(b.components(i, j)));
      mask.push_back(std::move(row));
    }
    breaks.push_back({{"b", b.location}, {"index", b.index}, {"components", mask}});
  }
  out["breaks"] = breaks;
  auto curves = nlohmann::json::array();
  for (const auto& c : report.curves) {
    curves.push_back({{"component", label(c.a, c.b)}, {"v", c.v}, {"value", c.value}, {"threshold", c.threshold}});
  }
  out["curves"] = curves;
  auto candidates = nlohmann::json::array();
  for (const auto& [lo, hi] : report.candidates) candidates.push_back({lo, hi});
  out["candidates"] = candidates;
  out["windows"] = {{"N", report.window_candidates}, {"K", report.window_break_counts}};
  out["model"] = to_json(report.model);
  return out;
}

BreakReport report_from_json(const nlohmann::json& value) {
  BreakReport report;
  try {
    const auto& test = value.at("test");
    report.test = {get<double>(test, "statistic"), get<double>(test, "pValue"), get<bool>(test, "reject"),
                   get<double>(test, "alpha"), get<Index>(test, "B"), get<Index>(test, "N")};
    const auto& tuning = value.at("tuning");
    report.tuning = {get<double>(tuning, "gamma"), get<Index>(tuning, "N_detect"), get<Index>(tuning, "N_test"),
                     get<Index>(tuning, "p"), get<std::uint64_t>(tuning, "seed")};
    for (const auto& b : value.at("breaks")) {
      DetectedBreak found;
      found.location = get<double>(b, "b");
      found.index = get<Index>(b, "index");
      const auto& mask = b.at("components");
      const auto d = static_cast<Index>(mask.size());
      found.components = BoolMatrix::Constant(d, d, false);
      for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) found.components(i, j) = mask.at(i).at(j).get<bool>();
      }
      report.breaks.push_back(std::move(found));
    }
    for (const auto& c : value.at("curves")) {
      ComponentCurve curve;
      const auto name = get<std::string>(c, "component");
      const auto comma = name.find(',');
      if (comma == std::string::npos) throw ConfigError("component label must be \"a,b\"");
      curve.a = std::stoll(name.substr(0, comma)) - 1;
      curve.b = std::stoll(name.substr(comma + 1)) - 1;
      curve.v = get<std::vector<double>>(c, "v");
      curve.value = get<std::vector<double>>(c, "value");
      curve.threshold = get<std::vector<double>>(c, "threshold");
      report.curves.push_back(std::move(curve));
    }
    for (const auto& c : value.at("candidates")) {
      report.candidates.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    }
    report.window_candidates = value.at("windows").at("N").get<std::vector<Index>>();
    report.window_break_counts = value.at("windows").at("K").get<std::vector<Index>>();
    report.model = ar_model_from_json(value.at("model"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed report JSON: ") + e.what());
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError(std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

nlohmann::json grid_slice_json(const DGrid& grid, Index m) {
  auto out = nlohmann::json::array();
  for (Index k = 0; k <= grid.frequencies(); ++k) {
    auto matrix = nlohmann::json::array();
    for (Index a = 0; a < grid.dimension(); ++a) {
      auto row = nlohmann::json::array();
      for (Index b = 0; b < grid.dimension(); ++b) {
        const Complex z = grid.entry(m, k, a, b);
        row.push_back({z.real(), z.imag()});
      }
      matrix.push_back(std::move(row));
    }
    out.push_back(std::move(matrix));
  }
  return out;
}

nlohmann::json to_json(const McResult& result, Index bins) {
  nlohmann::json out;
  out["config"] = to_json(result.config);
  out["runs"] = result.runs;
  out["rejections"] = result.rejections;
  out["rejectionFrequency"] = result.rejection_frequency;
  out["monteCarloStdErr"] = result.stderr_estimate;
  auto counts = nlohmann::json::object();
  for (const auto& [k, n] : result.break_counts) counts[std::to_string(k)] = n;
  out["K"] = counts;
  out["breaks"] = result.break_locations;
  out["histogram"] = {{"bins", bins}, {"counts", result.histogram(bins)}};
  auto records = nlohmann::json::array();
  for (const auto& r : result.records) {
    records.push_back({{"run", r.run}, {"seed", r.seed}, {"reject", r.reject}, {"statistic", r.statistic},
                       {"pValue", r.p_value}, {"p", r.order}, {"N_detect", r.detect_window},
                       {"N_test", r.test_window}, {"breaks", r.breaks}});
  }
  out["records"] = records;
  if (!result.reports.empty()) {
    auto reports = nlohmann::json::array();
    for (const auto& r : result.reports) reports.push_back(to_json(r));
    out["reports"] = reports;
  }
  return out;
}

nlohmann::json to_json(const KernelResult& result) {
  return {{"N", result.window},   {"empirical", result.empirical},
          {"kernel", result.kernel}, {"ratio", result.ratio},
          {"lowPrecision", result.low_precision}};
}

std::string curves_csv(const BreakReport& report) {
  std::string out = "component,v,value,threshold\n";
  for (const auto& c : report.curves) {
    const std::string name = "\"" + label(c.a, c.b) + "\"";
    for (std::size_t i = 0; i < c.v.size(); ++i) {
      out += name + ',' + format_double(c.v[i]) + ',' + format_double(c.value[i]) + ',' +
             format_double(c.threshold[i]) + '\n';
    }
  }
  return out;
}

std::string histogram_csv(const McResult& result, Index bins) {
  std::string out = "bin_left,bin_right,count\n";
  const auto counts = result.histogram(bins);
  for (Index i = 0; i < bins; ++i) {
    out += format_double(static_cast<double>(i) / static_cast<double>(bins)) + ',' +
           format_double(static_cast<double>(i + 1) / static_cast<double>(bins)) + ',' +
           std::to_string(counts[i]) + '\n';
  }
  return out;
}

std::string dump(const nlohmann::json& value) { return value.dump(2) + "\n"; }

}  // namespace specbreak
