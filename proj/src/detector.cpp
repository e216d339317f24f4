#include "specbreak/detector.hpp"

#include "specbreak/parallel.hpp"
#include "specbreak/process_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace specbreak {

bool operator==(const DetectedBreak& lhs, const DetectedBreak& rhs) {
  return lhs.index == rhs.index && lhs.location == rhs.location &&
         lhs.components.rows() == rhs.components.rows() &&
         lhs.components.cols() == rhs.components.cols() &&
         (lhs.components.array() == rhs.components.array()).all();
}

// ---------------------------------------------------------------------------
// Step I
// ---------------------------------------------------------------------------

Index critical_rank(double alpha, Index replicates) {
  if (replicates < 1) throw ParameterError("bootstrap needs at least one replicate");
  const double raw = std::floor((1.0 - alpha) * static_cast<double>(replicates) + 1e-9);
  return std::clamp<Index>(static_cast<Index>(raw), 1, replicates);
}

double TestResult::critical_value() const {
  if (bootstrap.empty()) throw ParameterError("no bootstrap replicates");
  return bootstrap[static_cast<std::size_t>(critical_rank(alpha, static_cast<Index>(bootstrap.size())) - 1)];
}

double bootstrap_p_value(double statistic, std::span<const double> replicates) {
  const auto hits = std::count_if(replicates.begin(), replicates.end(),
                                  [&](double r) { return r >= statistic; });
  return static_cast<double>(hits + 1) / static_cast<double>(replicates.size() + 1);
}

ARModel fit_bootstrap_model(const TimeSeries& series, std::optional<Index> order, int workers) {
  const Index T = series.length();
  Index p = 0;
  if (order) {
    p = *order;
    if (p < 1 || p >= T) throw ParameterError("AR order must lie in [1, T)");
  } else {
    const auto candidates = default_order_candidates(T);
    p = aic_order(series, candidates, workers).order;
  }
  const ARModel fitted = yule_walker(autocovariances(series, p), p);
  ARModel model{fitted.coefficients, residuals_and_cov(series, fitted).covariance};
  if (!model.is_stable()) throw FitError("fitted AR model is not stable", 0.0);
  return model;
}

std::vector<double> bootstrap_replicates(const ARModel& model, Index T, Index N, std::uint64_t seed,
                                         std::span<const std::uint64_t> substreams, int workers) {
  std::vector<double> out(substreams.size());
  const ArGenerator generate(model);
  parallel_for(
      static_cast<Index>(substreams.size()),
      [&](Index r) {
        const TimeSeries replicate = generate(T, substream_seed(seed, substreams[r]));
        out[r] = sup_statistic(replicate, N);
      },
      workers);
  return out;
}

TestResult bootstrap_test(const TimeSeries& series, Index N, double alpha, Index B, std::uint64_t seed,
                          std::optional<Index> order, int workers) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  if (B < 1) throw ParameterError("bootstrap needs at least one replicate");
  TestResult result;
  result.alpha = alpha;
  result.window = N;
  result.replicates = B;
  result.seed = seed;
  result.statistic = sup_statistic(series, N);
  result.model = fit_bootstrap_model(series, order, workers);
  std::vector<std::uint64_t> indices(static_cast<std::size_t>(B));
  std::iota(indices.begin(), indices.end(), std::uint64_t{0});
  result.bootstrap = bootstrap_replicates(result.model, series.length(), N, seed, indices, workers);
  result.p_value = bootstrap_p_value(result.statistic, result.bootstrap);
  std::sort(result.bootstrap.begin(), result.bootstrap.end());
  result.reject = result.statistic > result.critical_value();
  return result;
}

// ---------------------------------------------------------------------------
// Step II
// ---------------------------------------------------------------------------

double hard_threshold(double local_variance, Index d, Index T, Index N) {
  const double ratio = static_cast<double>(d * (d + 1) * T) / static_cast<double>(2 * N);
  return std::sqrt(2.0 * local_variance * std::log(ratio));
}

ThresholdField threshold_field(const TimeSeries& series, Index N, int workers) {
  const Index T = series.length();
  const Index d = series.dimension();
  if (N < 2 || N % 2 != 0) throw ParameterError("window length N must be a positive even integer");
  if (2 * N > T) throw ParameterError("thresholds require 2N <= T");
  ThresholdField field{N, T, d, {}, {}};
  const Index count = T - 2 * N + 1;
  field.local_variance.resize(static_cast<std::size_t>(count));
  field.epsilon.resize(static_cast<std::size_t>(count));
  const WindowDfts dfts(series, 2 * N, 1, T - 2 * N + 1, workers);
  const double norm = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(2 * N));
  parallel_for(
      count,
      [&](Index i) {
        const auto J = dfts.at(i + 1);
        const Eigen::MatrixXd diag = J.cwiseAbs2() * norm;  // N x d, I_aa at pi k / N
        Eigen::MatrixXd M = (diag.transpose() * diag) / static_cast<double>(N);
        field.local_variance[i] = M;
        field.epsilon[i] = M.unaryExpr([&](double m) { return hard_threshold(m, d, T, N); });
      },
      workers);
  return field;
}

ExceedanceField exceedance(const DGrid& grid, double gamma) {
  const Index d = grid.dimension();
  ExceedanceField field{grid.window(), grid.length(), d, gamma, {}};
  field.values.resize(static_cast<std::size_t>(grid.size()));
  const double scale = std::pow(static_cast<double>(grid.window()), gamma);
  for (Index m = grid.first_index(); m <= grid.last_index(); ++m) {
    Eigen::MatrixXd best = Eigen::MatrixXd::Zero(d, d);
    for (Index k = 0; k <= grid.frequencies(); ++k) {
      best = best.cwiseMax(grid.prefix(m, k).cwiseAbs2());
    }
    field.values[m - grid.first_index()] = best.cwiseSqrt() * scale;
  }
  return field;
}

namespace {

void check_compatible(const ExceedanceField& field, const ThresholdField& thresholds) {
  if (field.window != thresholds.window || field.length != thresholds.length ||
      field.dimension != thresholds.dimension) {
    throw ParameterError("exceedance and threshold fields use different grids");
  }
}

double peak(const ExceedanceField& field, Index m) { return field.at(m).maxCoeff(); }

}  // namespace

bool exceeds(const ExceedanceField& field, const ThresholdField& thresholds, Index m) {
  return (field.at(m).array() > thresholds.eps(m).array()).any();
}

std::vector<CandidateRun> candidate_sets(const ExceedanceField& field, const ThresholdField& thresholds) {
  check_compatible(field, thresholds);
  std::vector<CandidateRun> runs;
  for (Index m = field.first_index(); m <= field.last_index(); ++m) {
    if (!exceeds(field, thresholds, m)) continue;
    if (!runs.empty() && runs.back().last == m - 1) {
      runs.back().last = m;
    } else {
      runs.push_back({m, m});
    }
  }
  return runs;
}

std::vector<CandidateRun> candidate_sets(const DGrid& grid, const ThresholdField& thresholds, double gamma) {
  return candidate_sets(exceedance(grid, gamma), thresholds);
}

// ---------------------------------------------------------------------------
// Step III
// ---------------------------------------------------------------------------

Localization localize_breaks(const ExceedanceField& field, const ThresholdField& thresholds) {
  Localization out;
  out.candidates = candidate_sets(field, thresholds);
  std::vector<Index> pool;
  for (const auto& run : out.candidates) {
    for (Index m = run.first; m <= run.last; ++m) pool.push_back(m);
  }
  while (!pool.empty()) {
    Index chosen = pool.front();
    double best = peak(field, chosen);
    for (Index m : pool) {
      const double value = peak(field, m);
      if (value > best) {
        best = value;
        chosen = m;
      }
    }
    DetectedBreak found;
    found.index = chosen;
    found.location = static_cast<double>(chosen) / static_cast<double>(field.length);
    found.components = (field.at(chosen).array() > thresholds.eps(chosen).array()).matrix();
    out.breaks.push_back(std::move(found));
    std::erase_if(pool, [&](Index m) { return std::abs(m - chosen) <= field.window; });
  }
  std::sort(out.breaks.begin(), out.breaks.end(),
            [](const DetectedBreak& x, const DetectedBreak& y) { return x.index < y.index; });
  return out;
}

Localization localize_breaks(const DGrid& grid, const ThresholdField& thresholds, double gamma) {
  return localize_breaks(exceedance(grid, gamma), thresholds);
}

Localization detect(const TimeSeries& series, Index N, double gamma, int workers) {
  const DGrid grid = d_grid(series, N, workers);
  return localize_breaks(grid, threshold_field(series, N, workers), gamma);
}

// ---------------------------------------------------------------------------
// Window choice
// ---------------------------------------------------------------------------

std::vector<Index> window_candidates(Index T) {
  if (T < 4) throw ParameterError("series too short for window selection");
  // smallest i with 4^i >= T
  Index lo = 0;
  while ((Index{1} << (2 * lo)) < T) ++lo;
  // largest i with 2^{6i} <= T^5, compared in long double to avoid overflow
  const long double t5 = std::pow(static_cast<long double>(T), 5.0L);
  Index hi = 0;
  while (std::pow(2.0L, 6.0L * static_cast<long double>(hi + 1)) <= t5) ++hi;
  std::vector<Index> out;
  for (Index i = std::max<Index>(lo, 1); i <= hi; ++i) {
    const Index N = Index{1} << i;
    if (2 * N <= T) out.push_back(N);
  }
  if (out.empty()) throw ParameterError("no admissible window length for this series length");
  return out;
}

std::size_t select_window_position(std::span<const Index> break_counts) {
  if (break_counts.empty()) throw ParameterError("no window candidates");
  for (std::size_t i = break_counts.size(); i >= 2; --i) {
    if (break_counts[i - 2] <= break_counts[i - 1]) return i - 1;
  }
  return break_counts.size() - 1;
}

Index max_test_window(Index T) {
  Index half = T / 2;
  if (half % 2 != 0) --half;
  return half;
}

namespace {

Index test_window_for(Index detect_window, Index T) {
  const Index cap = max_test_window(T);
  if (cap < 2) throw ParameterError("series too short for the test");
  return std::min(2 * detect_window, cap);
}

}  // namespace

WindowSelection select_window(const TimeSeries& series, double gamma, int workers) {
  WindowSelection out;
  out.windows = window_candidates(series.length());
  out.break_counts.resize(out.windows.size());
  for (std::size_t i = 0; i < out.windows.size(); ++i) {
    out.break_counts[i] = static_cast<Index>(detect(series, out.windows[i], gamma, workers).breaks.size());
  }
  out.detect_window = out.windows[select_window_position(out.break_counts)];
  out.test_window = test_window_for(out.detect_window, series.length());
  return out;
}

// ---------------------------------------------------------------------------
// Full procedure
// ---------------------------------------------------------------------------

std::vector<ComponentCurve> component_curves(const ExceedanceField& field, const ThresholdField& thresholds) {
  check_compatible(field, thresholds);
  const Index d = field.dimension;
  std::vector<ComponentCurve> curves;
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) {
      ComponentCurve curve{a, b, {}, {}, {}};
      for (Index m = field.first_index(); m <= field.last_index(); ++m) {
        curve.v.push_back(static_cast<double>(m) / static_cast<double>(field.length));
        curve.value.push_back(field.at(m)(a, b));
        curve.threshold.push_back(thresholds.eps(m)(a, b));
      }
      curves.push_back(std::move(curve));
    }
  }
  return curves;
}

BreakReport full_pipeline(const TimeSeries& series, const PipelineOptions& options) {
  if (!(options.gamma > 0.0 && options.gamma < 0.5)) throw ParameterError("gamma must lie in (0, 1/2)");
  if (const Index c = zero_variance_column(series); c >= 0) {
    throw DataError("component " + std::to_string(c + 1) + " has zero variance");
  }
  const Index T = series.length();
  BreakReport report;
  if (options.window) {
    const Index N = *options.window;
    if (N < 2 || N % 2 != 0 || 2 * N > T) throw ParameterError("window N must be even with 2N <= T");
    report.tuning.detect_window = N;
    report.tuning.test_window = test_window_for(N, T);
  } else {
    const WindowSelection choice = select_window(series, options.gamma, options.workers);
    report.tuning.detect_window = choice.detect_window;
    report.tuning.test_window = choice.test_window;
    report.window_candidates = choice.windows;
    report.window_break_counts = choice.break_counts;
  }
  report.tuning.gamma = options.gamma;
  report.tuning.seed = options.seed;

  const TestResult test = bootstrap_test(series, report.tuning.test_window, options.alpha,
                                         options.replicates, options.seed, options.order,
                                         options.workers);
  report.test = {test.statistic, test.p_value, test.reject, test.alpha, test.replicates, test.window};
  report.model = test.model;
  report.tuning.order = test.model.order();

  const Index N = report.tuning.detect_window;
  const ExceedanceField field = exceedance(d_grid(series, N, options.workers), options.gamma);
  const ThresholdField thresholds = threshold_field(series, N, options.workers);
  report.curves = component_curves(field, thresholds);
  if (test.reject) {
    Localization loc = localize_breaks(field, thresholds);
    report.breaks = std::move(loc.breaks);
    for (const auto& run : loc.candidates) {
      report.candidates.emplace_back(static_cast<double>(run.first) / static_cast<double>(T),
                                     static_cast<double>(run.last) / static_cast<double>(T));
    }
  }
  return report;
}

}  // namespace specbreak
