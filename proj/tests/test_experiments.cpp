#include <doctest.h>

#include "specbreak/experiments.hpp"
#include "specbreak/io.hpp"
#include "specbreak/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

using namespace specbreak;

namespace {

ExperimentConfig small(StudyKind kind, ProcessModel model) {
  ExperimentConfig c;
  c.kind = kind;
  c.model = std::move(model);
  c.T = 256;
  c.runs = 6;
  c.replicates = 20;
  c.seed = 3;
  c.workers = 1;
  return c;
}

}  // namespace

TEST_CASE("one run gives a rejection frequency of 0 or 1") {
  auto c = small(StudyKind::level, models::ma1(0.5));
  c.runs = 1;
  const auto r = run_study(c);
  CHECK(r.runs == 1);
  CHECK((r.rejection_frequency == 0.0 || r.rejection_frequency == 1.0));
  CHECK(r.stderr_estimate == 0.0);
}

TEST_CASE("Monte Carlo summary fields are consistent") {
  const auto r = run_study(small(StudyKind::level, models::ma1(0.5)));
  CHECK(r.records.size() == 6);
  const auto rej = std::count_if(r.records.begin(), r.records.end(), [](const auto& x) { return x.reject; });
  CHECK(r.rejections == rej);
  const double p = static_cast<double>(rej) / 6.0;
  CHECK(r.rejection_frequency == doctest::Approx(p));
  CHECK(r.stderr_estimate == doctest::Approx(std::sqrt(p * (1.0 - p) / 6.0)));
  Index total = 0;
  for (const auto& [k, n] : r.break_counts) total += n;
  CHECK(total == 6);
  for (const auto& rec : r.records) {
    CHECK(rec.p_value > 0.0);
    CHECK(rec.p_value <= 1.0);
    CHECK(rec.test_window <= 128);
    if (!rec.reject) CHECK(rec.breaks.empty());
  }
}

TEST_CASE("study kinds check the model") {
  CHECK_THROWS_AS((void)run_level_study(small(StudyKind::level, models::switching_scale({0.5}, {1, 2}))),
                  ConfigError);
  CHECK_THROWS_AS((void)run_localization_study(small(StudyKind::localization, models::ma1(0.5))), ConfigError);
  auto c = small(StudyKind::level, models::ma1(0.5));
  c.runs = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS((void)run_study(c), ConfigError);
  c.runs = 2;
  c.alpha = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("results are byte-identical across runs and worker counts") {
  auto c = small(StudyKind::power, models::switching_scale({0.5}, {1, 2}));
  c.workers = 1;
  const auto a = dump(to_json(run_study(c)));
  const auto b = dump(to_json(run_study(c)));
  c.workers = 4;
  const auto d = dump(to_json(run_study(c)));
  CHECK(a == b);
  CHECK(a == d);
}

TEST_CASE("histogram mass equals the number of detected breaks") {
  auto c = small(StudyKind::localization, models::four_regime());
  c.T = 512;
  c.runs = 4;
  const auto r = run_study(c);
  const auto h = r.histogram(50);
  CHECK(h.size() == 50);
  Index total_breaks = 0;
  for (const auto& [k, n] : r.break_counts) total_breaks += k * n;
  CHECK(std::accumulate(h.begin(), h.end(), Index{0}) == total_breaks);
  CHECK(static_cast<Index>(r.break_locations.size()) == total_breaks);
  for (double b : r.break_locations) {
    CHECK(b > 0.0);
    CHECK(b < 1.0);
  }
  const auto errs = localization_errors(r);
  CHECK(errs.size() == 3);
}

TEST_CASE("config JSON round trip") {
  const auto c = config_from_json(nlohmann::json::parse(
      R"({"study": "power", "model": {"id": "model-6.3", "breaks": ["1/2"], "phi": [0.5, -0.5]},
          "T": 512, "runs": 10, "B": 30, "seed": 5, "N": 64, "p": 2})"));
  CHECK(c.kind == StudyKind::power);
  CHECK(c.T == 512);
  CHECK(c.replicates == 30);
  CHECK(c.window == 64);
  CHECK(c.order == 2);
  const auto again = config_from_json(to_json(c));
  CHECK(to_json(again) == to_json(c));
  CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(R"({"study": "nope"})")), ConfigError);
  CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(R"({"T": "many"})")), ConfigError);
}

TEST_CASE("a large variance jump is always detected near the break") {
  auto c = small(StudyKind::localization, models::switching_scale({0.5}, {1.0, 4.0}));
  c.T = 512;
  c.runs = 3;
  const auto r = run_study(c);
  CHECK(r.rejections == 3);
  CHECK(r.break_counts.count(0) == 0);
  for (const auto& rec : r.records) {
    const double reach = static_cast<double>(rec.detect_window) / 512.0;
    CHECK(std::any_of(rec.breaks.begin(), rec.breaks.end(), [&](double b) { return std::abs(b - 0.5) <= reach; }));
  }
}

TEST_CASE("kernel study bookkeeping") {
  KernelStudy k;
  k.T = 256;
  k.replicates = 2;
  k.workers = 1;
  const auto r = run_kernel_study(k);
  CHECK(r.low_precision);
  CHECK(r.window == 64);
  CHECK(r.kernel == doctest::Approx(1.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-10));
  k.omega = 0.5;
  CHECK(run_kernel_study(k).kernel == doctest::Approx(0.5 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-10));
  k.c = 3.0;
  CHECK_THROWS_AS((void)run_kernel_study(k), std::invalid_argument);
}
