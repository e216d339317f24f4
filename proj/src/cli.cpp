#include "specbreak/cli.hpp"

#include "specbreak/experiments.hpp"
#include "specbreak/io.hpp"
#include "specbreak/models.hpp"
#include "specbreak/svg.hpp"

#include <CLI11.hpp>

#include <optional>
#include <string>
#include <vector>

namespace specbreak {

namespace {

struct CommonOptions {
  std::string input;
  std::vector<Index> columns;  // 1-based on the command line
  double alpha = 0.05;
  Index replicates = 300;
  double gamma = 0.49;
  Index window = 0;
  Index order = 0;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("input", o.input, "CSV file (rows = time, columns = components)")->required();
  cmd->add_option("--columns", o.columns, "1-based columns to analyse (default: all)")->delimiter(',');
  cmd->add_option("--alpha", o.alpha, "test level")->capture_default_str();
  cmd->add_option("--B", o.replicates, "bootstrap replicates")->capture_default_str();
  cmd->add_option("--gamma", o.gamma, "threshold exponent")->capture_default_str();
  cmd->add_option("--N", o.window, "detection window (even; default: automatic)");
  cmd->add_option("--p", o.order, "AR order of the bootstrap (default: Whittle AIC)");
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads (default: SPECBREAK_THREADS or all cores)");
}

void check_common(const CommonOptions& o) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
  if (!(o.gamma > 0.0 && o.gamma < 0.5)) throw ConfigError("--gamma must lie in (0, 0.5)");
  if (o.replicates < 1) throw ConfigError("--B must be at least 1");
  if (o.window != 0 && (o.window < 2 || o.window % 2 != 0)) throw ConfigError("--N must be a positive even integer");
  if (o.order < 0) throw ConfigError("--p must be positive");
}

TimeSeries load(const CommonOptions& o) {
  std::vector<Index> columns;
  for (Index c : o.columns) {
    if (c < 1) throw ConfigError("--columns are 1-based");
    columns.push_back(c - 1);
  }
  if (!std::filesystem::exists(o.input)) throw IoError("input file not found: " + o.input);
  return ingest_csv(o.input, columns);
}

PipelineOptions pipeline_options(const CommonOptions& o) {
  PipelineOptions p;
  p.alpha = o.alpha;
  p.replicates = o.replicates;
  p.gamma = o.gamma;
  p.seed = o.seed;
  if (o.window > 0) p.window = o.window;
  if (o.order > 0) p.order = o.order;
  p.workers = o.threads;
  return p;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text(path, text);
  }
}

int cmd_test(const CommonOptions& o, const std::string& report_path, std::ostream& out) {
  check_common(o);
  const TimeSeries series = load(o);
  Index N = 0;
  if (o.window > 0) {
    N = o.window;
  } else {
    N = select_window(series, o.gamma, o.threads).test_window;
  }
  const std::optional<Index> order = o.order > 0 ? std::optional<Index>(o.order) : std::nullopt;
  const TestResult result = bootstrap_test(series, N, o.alpha, o.replicates, o.seed, order, o.threads);
  const nlohmann::json json{{"statistic", result.statistic}, {"pValue", result.p_value},
                            {"reject", result.reject},       {"alpha", result.alpha},
                            {"B", result.replicates},        {"N", result.window},
                            {"critical", result.critical_value()}, {"seed", result.seed},
                            {"model", to_json(result.model)}};
  emit(report_path, dump(json), out);
  return 0;
}

int cmd_detect(const CommonOptions& o, const std::string& report_path, const std::string& curves_path,
               const std::string& svg_path, std::ostream& out) {
  check_common(o);
  const TimeSeries series = load(o);
  const BreakReport report = full_pipeline(series, pipeline_options(o));
  const std::string json = dump(to_json(report));
  const std::string curves = curves_csv(report);
  const std::string svg = svg_path.empty() ? std::string() : render_svg(report);
  if (!curves_path.empty()) write_text(curves_path, curves);
  if (!svg_path.empty()) write_text(svg_path, svg);
  emit(report_path, json, out);
  return 0;
}

struct SimulateOptions {
  std::string model = "model-6.1";
  std::string model_file;
  std::vector<std::string> theta, phi, sigma, breaks;
  Index T = 256;
  std::uint64_t seed = kDefaultSeed;
  std::string output;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  if (o.T < 1) throw ConfigError("--T must be positive");
  nlohmann::json spec;
  if (!o.model_file.empty()) {
    if (!std::filesystem::exists(o.model_file)) throw IoError("model file not found: " + o.model_file);
    try {
      spec = nlohmann::json::parse(read_text(o.model_file));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed model file: ") + e.what());
    }
  } else {
    spec["id"] = o.model;
    if (!o.breaks.empty()) spec["breaks"] = o.breaks;
    if (!o.theta.empty()) spec["theta"] = o.theta;
    if (!o.phi.empty()) spec["phi"] = o.phi;
    if (!o.sigma.empty()) spec["sigma"] = o.sigma;
  }
  const ProcessModel model = models::from_json(spec);
  emit(o.output, to_csv(simulate(model, o.T, o.seed)), out);
  return 0;
}

struct ExperimentOptions {
  std::string config;
  std::string output;
  std::string histogram;
  Index bins = 50;
  int threads = -1;
};

int cmd_experiment(const ExperimentOptions& o, std::ostream& out) {
  if (!std::filesystem::exists(o.config)) throw IoError("config file not found: " + o.config);
  nlohmann::json spec;
  try {
    spec = nlohmann::json::parse(read_text(o.config));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (o.bins < 1) throw ConfigError("--bins must be positive");
  if (spec.value("study", std::string()) == "kernel") {
    KernelStudy study;
    try {
      study.c = spec.value("c", study.c);
      study.T = spec.value("T", study.T);
      study.replicates = spec.value("replicates", study.replicates);
      study.omega = spec.value("omega", study.omega);
      study.seed = spec.value("seed", study.seed);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed kernel config: ") + e.what());
    }
    if (o.threads >= 0) study.workers = o.threads;
    emit(o.output, dump(to_json(run_kernel_study(study))), out);
    return 0;
  }
  ExperimentConfig config = config_from_json(spec);
  if (o.threads >= 0) config.workers = o.threads;
  McResult result;
  switch (config.kind) {
    case StudyKind::level: result = run_level_study(config); break;
    case StudyKind::power: result = run_power_study(config); break;
    case StudyKind::localization: result = run_localization_study(config); break;
  }
  const std::string json = dump(to_json(result, o.bins));
  if (!o.histogram.empty()) write_text(o.histogram, histogram_csv(result, o.bins));
  emit(o.output, json, out);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detection and localization of structural breaks in multivariate time series", "specbreak"};
  app.require_subcommand(1);

  CommonOptions test_opts;
  std::string test_report;
  auto* test = app.add_subcommand("test", "bootstrap test for the presence of structural breaks");
  add_common(test, test_opts);
  test->add_option("--report", test_report, "output JSON (default: stdout)");

  CommonOptions detect_opts;
  std::string detect_report, curves_path, svg_path;
  auto* detect_cmd = app.add_subcommand("detect", "test, count and localize structural breaks");
  add_common(detect_cmd, detect_opts);
  detect_cmd->add_option("--report", detect_report, "report JSON (default: stdout)");
  detect_cmd->add_option("--curves", curves_path, "per-component curves CSV");
  detect_cmd->add_option("--svg", svg_path, "diagnostic plot");

  SimulateOptions sim_opts;
  auto* sim = app.add_subcommand("simulate", "simulate one of the built-in models as CSV");
  sim->add_option("--model", sim_opts.model, "model id (model-6.1 .. model-6.5, model-4.4)")->capture_default_str();
  sim->add_option("--model-file", sim_opts.model_file, "JSON model description");
  sim->add_option("--theta", sim_opts.theta, "MA parameters per segment")->delimiter(',');
  sim->add_option("--phi", sim_opts.phi, "VAR parameters per segment")->delimiter(',');
  sim->add_option("--sigma", sim_opts.sigma, "scale parameters per segment")->delimiter(',');
  sim->add_option("--breaks", sim_opts.breaks, "rescaled break points, e.g. 1/2")->delimiter(',');
  sim->add_option("--T", sim_opts.T, "series length")->capture_default_str();
  sim->add_option("--seed", sim_opts.seed, "random seed")->capture_default_str();
  sim->add_option("--out", sim_opts.output, "output CSV (default: stdout)");

  ExperimentOptions exp_opts;
  auto* exp = app.add_subcommand("experiment", "Monte Carlo study from a JSON config");
  exp->add_option("--config", exp_opts.config, "experiment config (JSON)")->required();
  exp->add_option("--out", exp_opts.output, "result JSON (default: stdout)");
  exp->add_option("--histogram", exp_opts.histogram, "histogram CSV of detected breaks");
  exp->add_option("--bins", exp_opts.bins, "histogram bins")->capture_default_str();
  exp->add_option("--threads", exp_opts.threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*test) return cmd_test(test_opts, test_report, out);
    if (*detect_cmd) return cmd_detect(detect_opts, detect_report, curves_path, svg_path, out);
    if (*sim) return cmd_simulate(sim_opts, out);
    if (*exp) return cmd_experiment(exp_opts, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace specbreak
