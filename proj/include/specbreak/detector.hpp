#pragma once

#include "specbreak/ar_sieve.hpp"
#include "specbreak/random.hpp"
#include "specbreak/spectral.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace specbreak {

// ---------------------------------------------------------------------------
// Step I: bootstrap test
// ---------------------------------------------------------------------------

struct TestResult {
  double statistic = 0.0;
  std::vector<double> bootstrap;  // replicates, ascending
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  Index window = 0;
  ARModel model;  // generator of the bootstrap replicates
  Index replicates = 0;
  std::uint64_t seed = 0;

  /// Order statistic D*_{(floor((1 - alpha) B))}, index clamped to >= 1.
  [[nodiscard]] double critical_value() const;
};

/// 1-based rank floor((1 - alpha) B) clamped to [1, B].
[[nodiscard]] Index critical_rank(double alpha, Index replicates);

/// (#{replicates >= statistic} + 1) / (B + 1).
[[nodiscard]] double bootstrap_p_value(double statistic, std::span<const double> replicates);

/**
 * AR(p) sieve used to generate bootstrap series: Yule-Walker coefficients of
 * order `order` (Whittle AIC over default_order_candidates(T) when empty) and
 * the centered residual covariance.
 */
[[nodiscard]] ARModel fit_bootstrap_model(const TimeSeries& series, std::optional<Index> order = {},
                                          int workers = 1);

/// Statistic of the series simulated from `model` on substream seed_r = substream_seed(seed, r).
[[nodiscard]] std::vector<double> bootstrap_replicates(const ARModel& model, Index T, Index N,
                                                       std::uint64_t seed,
                                                       std::span<const std::uint64_t> substreams,
                                                       int workers = 0);

/**
 * Tests H0: no structural break. Rejects when the sup statistic exceeds the
 * critical_value() of B replicates of the fitted AR bootstrap; replicate r
 * uses substream r of `seed`.
 */
[[nodiscard]] TestResult bootstrap_test(const TimeSeries& series, Index N, double alpha, Index B,
                                        std::uint64_t seed, std::optional<Index> order = {},
                                        int workers = 0);

// ---------------------------------------------------------------------------
// Step II: thresholds and candidate sets
// ---------------------------------------------------------------------------

/// Local variance M_{T,a,b}(v, 1) and hard threshold eps_{T,a,b}(v) on the grid m = N..T-N.
struct ThresholdField {
  Index window = 0;
  Index length = 0;
  Index dimension = 0;
  std::vector<Eigen::MatrixXd> local_variance;
  std::vector<Eigen::MatrixXd> epsilon;

  [[nodiscard]] Index first_index() const noexcept { return window; }
  [[nodiscard]] Index last_index() const noexcept { return length - window; }
  [[nodiscard]] const Eigen::MatrixXd& eps(Index m) const { return epsilon.at(m - window); }
  [[nodiscard]] const Eigen::MatrixXd& variance(Index m) const { return local_variance.at(m - window); }
};

/// sqrt(2 M log(d (d + 1) T / (2 N))).
[[nodiscard]] double hard_threshold(double local_variance, Index d, Index T, Index N);

/**
 * M_{a,b}(m) = (1/N) sum_{k=1}^{N} [I_{2N}]_{aa}[I_{2N}]_{bb} at lambda_{k,2N} = pi k / N, from the
 * length-2N periodogram of X_{m-N+1..m+N}; eps by hard_threshold.
 */
[[nodiscard]] ThresholdField threshold_field(const TimeSeries& series, Index N, int workers = 1);

/// N^gamma sup_omega |[D_T(m/T, omega)]_{a,b}| for every grid index and component.
struct ExceedanceField {
  Index window = 0;
  Index length = 0;
  Index dimension = 0;
  double gamma = 0.49;
  std::vector<Eigen::MatrixXd> values;

  [[nodiscard]] Index first_index() const noexcept { return window; }
  [[nodiscard]] Index last_index() const noexcept { return length - window; }
  [[nodiscard]] const Eigen::MatrixXd& at(Index m) const { return values.at(m - window); }
};

[[nodiscard]] ExceedanceField exceedance(const DGrid& grid, double gamma);

/// Maximal run of consecutive grid indices [first, last] exceeding the threshold.
struct CandidateRun {
  Index first = 0;
  Index last = 0;
  friend bool operator==(const CandidateRun&, const CandidateRun&) = default;
};

/// True iff some component satisfies values(a, b) > eps(a, b) (strict).
[[nodiscard]] bool exceeds(const ExceedanceField& field, const ThresholdField& thresholds, Index m);

[[nodiscard]] std::vector<CandidateRun> candidate_sets(const ExceedanceField& field,
                                                       const ThresholdField& thresholds);
[[nodiscard]] std::vector<CandidateRun> candidate_sets(const DGrid& grid,
                                                       const ThresholdField& thresholds, double gamma);

// ---------------------------------------------------------------------------
// Step III: localization and component attribution
// ---------------------------------------------------------------------------

struct DetectedBreak {
  Index index = 0;        // grid index m, location m / T
  double location = 0.0;
  BoolMatrix components;  // (a, b) exceeded its threshold at this break

  friend bool operator==(const DetectedBreak& lhs, const DetectedBreak& rhs);
};

struct Localization {
  std::vector<DetectedBreak> breaks;  // ascending
  std::vector<CandidateRun> candidates;
};

/**
 * Greedy localization: repeatedly take the exceeding grid point with the
 * largest max_{a,b} N^gamma sup_omega |D_{a,b}| (ties to the smallest index),
 * then drop every candidate within N grid steps of it.
 */
[[nodiscard]] Localization localize_breaks(const ExceedanceField& field, const ThresholdField& thresholds);
[[nodiscard]] Localization localize_breaks(const DGrid& grid, const ThresholdField& thresholds,
                                           double gamma);

/// Steps II and III with window N.
[[nodiscard]] Localization detect(const TimeSeries& series, Index N, double gamma, int workers = 1);

// ---------------------------------------------------------------------------
// Window length choice
// ---------------------------------------------------------------------------

/// Powers of two 2^i with ceil(log2 sqrt T) <= i <= floor(log2 T^{5/6}).
[[nodiscard]] std::vector<Index> window_candidates(Index T);

/**
 * Position (0-based) of N* given K(N_1), ..., K(N_n): the largest i >= 2 with
 * K(N_{i-1}) <= K(N_i), or n when no such i exists.
 */
[[nodiscard]] std::size_t select_window_position(std::span<const Index> break_counts);

/// Largest even window usable by the test (2N <= T).
[[nodiscard]] Index max_test_window(Index T);

struct WindowSelection {
  Index detect_window = 0;  // N*
  Index test_window = 0;    // 2 N*, capped at max_test_window(T)
  std::vector<Index> windows;
  std::vector<Index> break_counts;
};

[[nodiscard]] WindowSelection select_window(const TimeSeries& series, double gamma, int workers = 1);

// ---------------------------------------------------------------------------
// Full procedure
// ---------------------------------------------------------------------------

struct PipelineOptions {
  double alpha = 0.05;
  Index replicates = 300;
  double gamma = 0.49;
  std::uint64_t seed = kDefaultSeed;
  std::optional<Index> window;  // detection window; test uses twice this
  std::optional<Index> order;   // AR order; AIC when empty
  int workers = 0;
};

struct TestSummary {
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  Index replicates = 0;
  Index window = 0;
  friend bool operator==(const TestSummary&, const TestSummary&) = default;
};

struct Tuning {
  double gamma = 0.49;
  Index detect_window = 0;
  Index test_window = 0;
  Index order = 0;
  std::uint64_t seed = 0;
  friend bool operator==(const Tuning&, const Tuning&) = default;
};

struct ComponentCurve {
  Index a = 0;  // 0-based
  Index b = 0;
  std::vector<double> v;
  std::vector<double> value;
  std::vector<double> threshold;
  friend bool operator==(const ComponentCurve&, const ComponentCurve&) = default;
};

struct BreakReport {
  TestSummary test;
  Tuning tuning;
  ARModel model;
  std::vector<DetectedBreak> breaks;
  std::vector<ComponentCurve> curves;
  std::vector<std::pair<double, double>> candidates;  // [v_start, v_end] of each run
  std::vector<Index> window_candidates;
  std::vector<Index> window_break_counts;

  [[nodiscard]] Index break_count() const noexcept { return static_cast<Index>(breaks.size()); }
  friend bool operator==(const BreakReport&, const BreakReport&) = default;
};

/// Per-component curves v -> N^gamma sup_omega |D_{a,b}| and eps_{a,b}(v) for all d^2 components.
[[nodiscard]] std::vector<ComponentCurve> component_curves(const ExceedanceField& field,
                                                           const ThresholdField& thresholds);

/**
 * Window choice, bootstrap test with the test window, then Steps II-III with
 * the detection window when H0 is rejected. Curves are attached either way.
 * Throws DataError for a zero-variance component.
 */
[[nodiscard]] BreakReport full_pipeline(const TimeSeries& series, const PipelineOptions& options = {});

}  // namespace specbreak
