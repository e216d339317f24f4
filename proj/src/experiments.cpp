#include "specbreak/experiments.hpp"

#include "specbreak/models.hpp"
#include "specbreak/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace specbreak {

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::level: return "level";
    case StudyKind::power: return "power";
    case StudyKind::localization: return "localization";
  }
  return "level";
}

StudyKind study_kind(const std::string& name) {
  if (name == "level") return StudyKind::level;
  if (name == "power") return StudyKind::power;
  if (name == "localization") return StudyKind::localization;
  throw ConfigError("unknown study '" + name + "' (expected level, power or localization)");
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (replicates < 1) throw ConfigError("B must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 0.5)) throw ConfigError("gamma must lie in (0, 1/2)");
  if (T < 64) throw ConfigError("T must be at least 64");
  if (window && (*window < 2 || *window % 2 != 0 || 2 * *window > T)) {
    throw ConfigError("N must be even with 2N <= T");
  }
  if (order && (*order < 1 || *order >= T)) throw ConfigError("p must lie in [1, T)");
  try {
    specbreak::validate(model);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig config_from_json(const nlohmann::json& spec) {
  if (!spec.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig config;
  try {
    if (spec.contains("study")) config.kind = study_kind(spec.at("study").get<std::string>());
    if (!spec.contains("model")) throw ConfigError("experiment config needs a \"model\"");
    config.model = models::from_json(spec.at("model"));
    if (spec.contains("T")) config.T = spec.at("T").get<Index>();
    if (spec.contains("runs")) config.runs = spec.at("runs").get<Index>();
    if (spec.contains("B")) config.replicates = spec.at("B").get<Index>();
    if (spec.contains("alpha")) config.alpha = spec.at("alpha").get<double>();
    if (spec.contains("gamma")) config.gamma = spec.at("gamma").get<double>();
    if (spec.contains("seed")) config.seed = spec.at("seed").get<std::uint64_t>();
    if (spec.contains("N") && !spec.at("N").is_null()) config.window = spec.at("N").get<Index>();
    if (spec.contains("p") && !spec.at("p").is_null()) config.order = spec.at("p").get<Index>();
    if (spec.contains("workers")) config.workers = spec.at("workers").get<int>();
    if (spec.contains("keep_reports")) config.keep_reports = spec.at("keep_reports").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  config.validate();
  return config;
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json out{{"study", to_string(config.kind)},
                     {"model", models::to_json(config.model)},
                     {"T", config.T},
                     {"runs", config.runs},
                     {"B", config.replicates},
                     {"alpha", config.alpha},
                     {"gamma", config.gamma},
                     {"seed", config.seed}};
  out["N"] = config.window ? nlohmann::json(*config.window) : nlohmann::json(nullptr);
  out["p"] = config.order ? nlohmann::json(*config.order) : nlohmann::json(nullptr);
  return out;
}

std::vector<Index> McResult::histogram(Index bins) const {
  if (bins < 1) throw ParameterError("histogram needs at least one bin");
  std::vector<Index> counts(static_cast<std::size_t>(bins), 0);
  for (double b : break_locations) {
    const auto cell = std::clamp<Index>(static_cast<Index>(std::floor(b * static_cast<double>(bins))), 0, bins - 1);
    ++counts[cell];
  }
  return counts;
}

McResult run_study(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  McResult result;
  result.config = config;
  result.runs = config.runs;
  result.records.resize(static_cast<std::size_t>(config.runs));
  if (config.keep_reports) result.reports.resize(static_cast<std::size_t>(config.runs));

  PipelineOptions options;
  options.alpha = config.alpha;
  options.replicates = config.replicates;
  options.gamma = config.gamma;
  options.window = config.window;
  options.order = config.order;
  options.workers = 1;

  parallel_for(
      config.runs,
      [&](Index run) {
        const std::uint64_t run_seed = substream_seed(config.seed, static_cast<std::uint64_t>(run));
        const TimeSeries series = simulate(config.model, config.T, substream_seed(run_seed, 0));
        PipelineOptions local = options;
        local.seed = substream_seed(run_seed, 1);
        BreakReport report = full_pipeline(series, local);
        RunRecord& record = result.records[run];
        record.run = run;
        record.seed = run_seed;
        record.reject = report.test.reject;
        record.statistic = report.test.statistic;
        record.p_value = report.test.p_value;
        record.order = report.tuning.order;
        record.detect_window = report.tuning.detect_window;
        record.test_window = report.tuning.test_window;
        for (const auto& b : report.breaks) record.breaks.push_back(b.location);
        if (config.keep_reports) result.reports[run] = std::move(report);
      },
      config.workers);

  for (const auto& record : result.records) {
    if (record.reject) ++result.rejections;
    ++result.break_counts[static_cast<Index>(record.breaks.size())];
    result.break_locations.insert(result.break_locations.end(), record.breaks.begin(), record.breaks.end());
  }
  const double n = static_cast<double>(result.runs);
  result.rejection_frequency = static_cast<double>(result.rejections) / n;
  result.stderr_estimate = std::sqrt(result.rejection_frequency * (1.0 - result.rejection_frequency) / n);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

McResult run_level_study(ExperimentConfig config) {
  if (break_count(config.model) != 0) {
    throw ConfigError("level study needs a stationary model without breaks");
  }
  config.kind = StudyKind::level;
  return run_study(config);
}

McResult run_power_study(ExperimentConfig config) {
  config.kind = StudyKind::power;
  return run_study(config);
}

McResult run_localization_study(ExperimentConfig config) {
  if (break_count(config.model) == 0) throw ConfigError("localization study needs at least one break");
  config.kind = StudyKind::localization;
  return run_study(config);
}

std::vector<double> localization_errors(const McResult& result) {
  const auto& truth = breakpoints(result.config.model);
  std::vector<double> total(truth.size(), 0.0);
  std::vector<Index> count(truth.size(), 0);
  for (double b : result.break_locations) {
    std::size_t nearest = 0;
    for (std::size_t j = 1; j < truth.size(); ++j) {
      if (std::abs(b - truth[j]) < std::abs(b - truth[nearest])) nearest = j;
    }
    if (truth.empty()) break;
    total[nearest] += std::abs(b - truth[nearest]);
    ++count[nearest];
  }
  std::vector<double> out(truth.size());
  for (std::size_t j = 0; j < truth.size(); ++j) {
    out[j] = count[j] > 0 ? total[j] / static_cast<double>(count[j]) : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<double> histogram_modes(const McResult& result, Index bins, Index count) {
  const auto h = result.histogram(bins);
  std::vector<Index> peaks;
  for (Index i = 0; i < bins; ++i) {
    const Index left = i > 0 ? h[i - 1] : 0;
    const Index right = i + 1 < bins ? h[i + 1] : 0;
    if (h[i] > 0 && h[i] >= left && h[i] >= right) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](Index x, Index y) { return h[x] > h[y]; });
  if (static_cast<Index>(peaks.size()) > count) peaks.resize(static_cast<std::size_t>(count));
  std::sort(peaks.begin(), peaks.end());
  std::vector<double> centres;
  for (Index i : peaks) centres.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(bins));
  return centres;
}

KernelResult run_kernel_study(const KernelStudy& study) {
  if (!(study.c >= 2.0)) throw ParameterError("kernel study requires c >= 2");
  const double n_real = static_cast<double>(study.T) / study.c;
  const auto N = static_cast<Index>(std::llround(n_real));
  if (std::abs(n_real - static_cast<double>(N)) > 1e-9 || N < 2 || N % 2 != 0) {
    throw ParameterError("kernel study requires T / c to be an even integer");
  }
  if (study.replicates < 2) throw ParameterError("kernel study needs at least two replicates");
  if (!(study.omega > 0.0 && study.omega <= 1.0)) throw ParameterError("omega must lie in (0, 1]");

  const Index m = study.T / 2;
  const Index k = static_cast<Index>(std::floor(study.omega * static_cast<double>(N / 2)));
  const double norm = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(N) * static_cast<double>(N));
  std::vector<double> draws(static_cast<std::size_t>(study.replicates));
  parallel_for(
      study.replicates,
      [&](Index r) {
        GaussianStream gaussian(substream_seed(study.seed, static_cast<std::uint64_t>(r)));
        const Eigen::MatrixXd x = gaussian.matrix(study.T, 1);
        const Eigen::MatrixXcd left = window_dft(x, m - N + 1, N);
        const Eigen::MatrixXcd right = window_dft(x, m + 1, N);
        double value = 0.0;
        for (Index kappa = 0; kappa < k; ++kappa) {
          value += (std::norm(right(kappa, 0)) - std::norm(left(kappa, 0))) * norm;
        }
        draws[r] = std::sqrt(static_cast<double>(N)) * value;
      },
      study.workers);

  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= static_cast<double>(draws.size());
  double ss = 0.0;
  for (double v : draws) ss += (v - mean) * (v - mean);

  KernelResult out;
  out.window = N;
  out.empirical = ss / static_cast<double>(draws.size() - 1);
  KernelSpec spec;
  spec.density = [](double) { return Eigen::MatrixXcd::Constant(1, 1, Complex(0.5 / std::numbers::pi, 0.0)); };
  spec.c = study.c;
  spec.v1 = spec.v2 = 0.5;
  spec.omega1 = spec.omega2 = study.omega;
  out.kernel = limit_kernel(spec);
  out.ratio = out.empirical / out.kernel;
  out.low_precision = study.replicates < 100;
  return out;
}

}  // namespace specbreak
