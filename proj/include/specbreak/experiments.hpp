#pragma once

#include "specbreak/detector.hpp"
#include "specbreak/process_sim.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace specbreak {

enum class StudyKind { level, power, localization };

struct ExperimentConfig {
  StudyKind kind = StudyKind::level;
  ProcessModel model;
  Index T = 256;
  Index runs = 200;
  Index replicates = 200;  // bootstrap B
  double alpha = 0.05;
  double gamma = 0.49;
  std::uint64_t seed = kDefaultSeed;
  std::optional<Index> window;  // fixed detection window instead of the automatic choice
  std::optional<Index> order;
  int workers = 0;
  bool keep_reports = false;

  /// Throws ConfigError for runs < 1, bad alpha/gamma/B or an invalid model.
  void validate() const;
};

/**
 * Parses
 *
 *   {"study": "level", "model": {...}, "T": 256, "runs": 200, "B": 200,
 *    "alpha": 0.05, "gamma": 0.49, "seed": 1, "N": 256, "p": 2}
 *
 * where "model" follows models::from_json. Missing keys keep their defaults.
 */
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& spec);
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& config);

[[nodiscard]] std::string to_string(StudyKind kind);
[[nodiscard]] StudyKind study_kind(const std::string& name);

struct RunRecord {
  Index run = 0;
  std::uint64_t seed = 0;
  bool reject = false;
  double statistic = 0.0;
  double p_value = 1.0;
  Index order = 0;
  Index detect_window = 0;
  Index test_window = 0;
  std::vector<double> breaks;
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct McResult {
  ExperimentConfig config;
  Index runs = 0;
  Index rejections = 0;
  double rejection_frequency = 0.0;
  double stderr_estimate = 0.0;          // sqrt(p (1 - p) / runs)
  std::map<Index, Index> break_counts;   // K-hat -> number of runs
  std::vector<double> break_locations;   // pooled b-hat, run order
  std::vector<RunRecord> records;
  std::vector<BreakReport> reports;      // only with keep_reports
  double seconds = 0.0;                  // wall clock, not serialized

  /// Counts of break_locations in `bins` equal cells of [0, 1].
  [[nodiscard]] std::vector<Index> histogram(Index bins) const;
};

/// Applies the full procedure to `runs` series with run seed substream_seed(master, run).
[[nodiscard]] McResult run_study(const ExperimentConfig& config);

/// Level study; throws ConfigError if the model has breaks.
[[nodiscard]] McResult run_level_study(ExperimentConfig config);
[[nodiscard]] McResult run_power_study(ExperimentConfig config);
/// Requires at least one break in the model.
[[nodiscard]] McResult run_localization_study(ExperimentConfig config);

/**
 * Mean absolute error |b-hat - b_j| per true break, pooling every detected
 * break with its nearest true break. Breaks without any match give NaN.
 */
[[nodiscard]] std::vector<double> localization_errors(const McResult& result);

/// Local maxima of a histogram of pooled breaks, as bin centres of the `count` largest bins that are local maxima.
[[nodiscard]] std::vector<double> histogram_modes(const McResult& result, Index bins, Index count);

struct KernelStudy {
  double c = 4.0;
  Index T = 4096;
  Index replicates = 2000;
  double omega = 1.0;
  std::uint64_t seed = kDefaultSeed;
  int workers = 0;
};

struct KernelResult {
  Index window = 0;
  double empirical = 0.0;  // Var(sqrt(N) D_T(1/2, omega)) over replicates
  double kernel = 0.0;     // limit_kernel at v = 1/2, omega
  double ratio = 0.0;
  bool low_precision = false;  // fewer than 100 replicates
};

/// d = 1 Gaussian white noise; requires c >= 2 and N = T / c an even integer.
[[nodiscard]] KernelResult run_kernel_study(const KernelStudy& study);

}  // namespace specbreak
