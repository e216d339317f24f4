#include <doctest.h>

#include "oracles.hpp"
#include "specbreak/detector.hpp"
#include "specbreak/models.hpp"
#include "specbreak/process_sim.hpp"
#include "specbreak/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace specbreak;

namespace {

// d = 1 fields on m = N..T-N with a constant threshold
struct Toy {
  ExceedanceField field;
  ThresholdField thresholds;
};

Toy toy(Index N, Index T, double eps, const std::vector<double>& values) {
  Toy t;
  t.field.window = t.thresholds.window = N;
  t.field.length = t.thresholds.length = T;
  t.field.dimension = t.thresholds.dimension = 1;
  for (double v : values) {
    t.field.values.push_back(Eigen::MatrixXd::Constant(1, 1, v));
    t.thresholds.epsilon.push_back(Eigen::MatrixXd::Constant(1, 1, eps));
    t.thresholds.local_variance.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0));
  }
  return t;
}

// triangular humps of height h centred at grid index c with half-width w
std::vector<double> humps(Index N, Index T, const std::vector<std::tuple<Index, double, Index>>& spec) {
  std::vector<double> out(static_cast<std::size_t>(T - 2 * N + 1), 0.0);
  for (Index m = N; m <= T - N; ++m) {
    for (const auto& [c, h, w] : spec) {
      const double dist = std::abs(static_cast<double>(m - c));
      out[static_cast<std::size_t>(m - N)] = std::max(out[static_cast<std::size_t>(m - N)],
                                                      h * std::max(0.0, 1.0 - dist / static_cast<double>(w)));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("hard threshold formula") {
  CHECK(hard_threshold(1.0, 2, 2048, 256) == doctest::Approx(std::sqrt(2.0 * std::log(24.0))).epsilon(1e-14));
  CHECK(hard_threshold(1.0, 2, 2048, 256) == doctest::Approx(2.5211).epsilon(1e-4));
  CHECK(hard_threshold(4.0, 1, 512, 32) == doctest::Approx(std::sqrt(8.0 * std::log(16.0))).epsilon(1e-14));
  CHECK(hard_threshold(0.0, 2, 2048, 256) == 0.0);
}

TEST_CASE("threshold field local variance equals the length-2N periodogram oracle") {
  const auto x = simulate(models::var1(0.5), 256, 2);
  const auto field = threshold_field(x, 32);
  CHECK(field.first_index() == 32);
  CHECK(field.last_index() == 224);
  for (Index m : {32, 33, 100, 224}) {
    const Eigen::MatrixXd want = oracle::local_variance(x.values(), 32, m);
    CHECK((field.variance(m) - want).cwiseAbs().maxCoeff() < 1e-10 * want.cwiseAbs().maxCoeff());
    for (Index a = 0; a < 2; ++a) {
      for (Index b = 0; b < 2; ++b) {
        CHECK(field.eps(m)(a, b) == doctest::Approx(hard_threshold(want(a, b), 2, 256, 32)).epsilon(1e-10));
      }
    }
  }
  CHECK((field.variance(100) - field.variance(100).transpose()).cwiseAbs().maxCoeff() < 1e-15);
  const auto parallel = threshold_field(x, 32, 3);
  for (Index m = 32; m <= 224; ++m) REQUIRE(parallel.eps(m) == field.eps(m));
}

TEST_CASE("an all-zero series has zero thresholds and no candidates") {
  const TimeSeries zero(Eigen::MatrixXd::Zero(128, 2));
  const auto field = threshold_field(zero, 16);
  CHECK(field.eps(64).cwiseAbs().maxCoeff() == 0.0);
  const auto loc = detect(zero, 16, 0.49);
  CHECK(loc.breaks.empty());
  CHECK(loc.candidates.empty());
}

TEST_CASE("candidate runs use strict exceedance") {
  const auto t = toy(2, 12, 1.0, {0.5, 1.0, 1.5, 2.0, 0.9, 1.0, 1.1, 3.0, 0.0});
  CHECK_FALSE(exceeds(t.field, t.thresholds, 3));
  CHECK(exceeds(t.field, t.thresholds, 4));
  const auto runs = candidate_sets(t.field, t.thresholds);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0] == CandidateRun{4, 5});
  CHECK(runs[1] == CandidateRun{8, 9});
}

TEST_CASE("greedy localization separates humps by more than N") {
  const Index N = 10;
  const Index T = 400;
  const auto t = toy(N, T, 1.0, humps(N, T, {{100, 5.0, 12}, {200, 4.0, 12}, {300, 3.0, 12}}));
  const auto loc = localize_breaks(t.field, t.thresholds);
  REQUIRE(loc.breaks.size() == 3);
  CHECK(loc.breaks[0].index == 100);
  CHECK(loc.breaks[1].index == 200);
  CHECK(loc.breaks[2].index == 300);
  CHECK(loc.breaks[0].location == doctest::Approx(0.25));
  for (const auto& b : loc.breaks) CHECK(b.components(0, 0));
  for (std::size_t i = 1; i < loc.breaks.size(); ++i) CHECK(loc.breaks[i].index - loc.breaks[i - 1].index > N);
}

TEST_CASE("a wide exceedance run leaves points beyond N for later iterations") {
  const Index N = 10;
  const auto t = toy(N, 400, 1.0, humps(N, 400, {{200, 5.0, 30}}));
  const auto loc = localize_breaks(t.field, t.thresholds);
  REQUIRE(loc.candidates.size() == 1);
  CHECK(loc.breaks.size() > 1);
  CHECK(std::any_of(loc.breaks.begin(), loc.breaks.end(), [](const auto& b) { return b.index == 200; }));
  for (std::size_t i = 1; i < loc.breaks.size(); ++i) CHECK(loc.breaks[i].index - loc.breaks[i - 1].index > N);
}

TEST_CASE("a shoulder within N of a larger peak is absorbed") {
  const Index N = 10;
  const auto t = toy(N, 200, 1.0, humps(N, 200, {{100, 5.0, 12}, {108, 4.9, 3}}));
  const auto loc = localize_breaks(t.field, t.thresholds);
  REQUIRE(loc.breaks.size() == 1);
  CHECK(loc.breaks[0].index == 100);
}

TEST_CASE("ties go to the smallest index") {
  std::vector<double> v(81, 0.0);
  v[20] = v[40] = 2.0;  // grid indices 30 and 50, gap 20 > N
  v[25] = 2.0;          // index 35, within N of 30
  const auto t = toy(10, 100, 1.0, v);
  const auto loc = localize_breaks(t.field, t.thresholds);
  REQUIRE(loc.breaks.size() == 2);
  CHECK(loc.breaks[0].index == 30);
  CHECK(loc.breaks[1].index == 50);
}

TEST_CASE("window candidates and selection rule") {
  CHECK(window_candidates(2048) == std::vector<Index>{64, 128, 256, 512});
  CHECK(window_candidates(512) == std::vector<Index>{32, 64, 128});
  CHECK(max_test_window(2048) == 1024);
  CHECK(max_test_window(102) == 50);
  CHECK(max_test_window(98) == 48);

  const auto pos = [](std::vector<Index> k) { return select_window_position(k); };
  CHECK(pos({3, 3, 3, 3}) == 3);  // constant: last
  CHECK(pos({4, 3, 2, 1}) == 3);  // strictly decreasing: n
  CHECK(pos({5, 3, 3, 1}) == 2);  // last non-decrease at i = 3
  CHECK(pos({0, 0, 1}) == 2);
  CHECK(pos({2, 1}) == 1);
  CHECK(pos({7}) == 0);
  CHECK_THROWS_AS((void)pos({}), ParameterError);
}

TEST_CASE("bootstrap order statistic and p-value") {
  CHECK(critical_rank(0.05, 200) == 190);
  CHECK(critical_rank(0.05, 300) == 285);
  CHECK(critical_rank(0.05, 1) == 1);
  CHECK(critical_rank(0.1, 10) == 9);
  CHECK(critical_rank(0.99, 10) == 1);
  const std::vector<double> r{1.0, 2.0, 3.0, 4.0};
  CHECK(bootstrap_p_value(2.5, r) == doctest::Approx(3.0 / 5.0));
  CHECK(bootstrap_p_value(4.0, r) == doctest::Approx(2.0 / 5.0));
  CHECK(bootstrap_p_value(9.0, r) == doctest::Approx(1.0 / 5.0));
  CHECK(bootstrap_p_value(0.0, r) == doctest::Approx(1.0));
}

TEST_CASE("bootstrap test structure and replicate exchangeability") {
  const auto x = simulate(models::ma1(0.5), 256, 17);
  const auto res = bootstrap_test(x, 32, 0.05, 40, 99, std::nullopt, 1);
  CHECK(res.bootstrap.size() == 40);
  CHECK(std::is_sorted(res.bootstrap.begin(), res.bootstrap.end()));
  CHECK(res.p_value >= 1.0 / 41.0);
  CHECK(res.p_value <= 1.0);
  CHECK(res.reject == (res.statistic > res.critical_value()));
  CHECK(res.statistic == sup_statistic(x, 32));

  std::vector<std::uint64_t> ids(40);
  std::iota(ids.begin(), ids.end(), 0);
  auto a = bootstrap_replicates(res.model, 256, 32, 99, ids, 1);
  std::reverse(ids.begin(), ids.end());
  auto b = bootstrap_replicates(res.model, 256, 32, 99, ids, 2);
  std::reverse(b.begin(), b.end());
  CHECK(a == b);
  std::sort(a.begin(), a.end());
  CHECK(a == res.bootstrap);
  CHECK(bootstrap_p_value(res.statistic, a) == res.p_value);
}

TEST_CASE("one replicate on a zero series never rejects") {
  const TimeSeries zero(Eigen::MatrixXd::Zero(128, 1));
  bool rejected = false;
  double p = 1.0;
  try {
    const auto res = bootstrap_test(zero, 16, 0.05, 1, 1, std::nullopt, 1);
    rejected = res.reject;
    p = res.p_value;
  } catch (const FitError&) {
  }
  CHECK_FALSE(rejected);
  CHECK(p == 1.0);
}

TEST_CASE("full pipeline validates its input") {
  Eigen::MatrixXd v = Eigen::MatrixXd::Random(256, 2);
  v.col(1).setConstant(3.0);
  CHECK_THROWS_AS((void)full_pipeline(TimeSeries(v)), DataError);
  const auto x = simulate(models::ma1(0.5), 256, 1);
  PipelineOptions opts;
  opts.replicates = 10;
  opts.gamma = 0.5;
  CHECK_THROWS_AS((void)full_pipeline(x, opts), std::invalid_argument);
  opts.gamma = 0.49;
  opts.window = 33;
  CHECK_THROWS_AS((void)full_pipeline(x, opts), ParameterError);
  opts.window = 256;
  CHECK_THROWS_AS((void)full_pipeline(x, opts), ParameterError);
}

TEST_CASE("full pipeline on a scale break is deterministic across workers") {
  const auto model = models::switching_scale({0.5}, {1.0, 2.0});
  const auto x = center(simulate(model, 512, 5));
  PipelineOptions opts;
  opts.replicates = 50;
  opts.seed = 77;
  opts.workers = 1;
  const auto a = full_pipeline(x, opts);
  opts.workers = 3;
  const auto b = full_pipeline(x, opts);
  CHECK(a == b);

  CHECK(a.test.reject);
  CHECK(a.tuning.test_window == std::min<Index>(2 * a.tuning.detect_window, 256));
  CHECK(a.window_candidates == window_candidates(512));
  REQUIRE_FALSE(a.breaks.empty());
  CHECK(std::abs(a.breaks.front().location - 0.5) < 0.1);
  CHECK(a.curves.size() == 4);
  for (const auto& br : a.breaks) CHECK(br.components.any());
  for (std::size_t i = 1; i < a.breaks.size(); ++i) {
    CHECK(a.breaks[i].location - a.breaks[i - 1].location >
          static_cast<double>(a.tuning.detect_window) / 512.0);
  }
}

TEST_CASE("exceedance set is invariant to rescaling the data") {
  const auto x = center(simulate(models::four_regime(), 1024, 3));
  const auto y = scale(x, 7.5);
  const auto lx = detect(x, 64, 0.49);
  const auto ly = detect(y, 64, 0.49);
  CHECK(lx.candidates == ly.candidates);
  REQUIRE(lx.breaks.size() == ly.breaks.size());
  for (std::size_t i = 0; i < lx.breaks.size(); ++i) CHECK(lx.breaks[i] == ly.breaks[i]);
}

TEST_CASE("component attribution on the four-regime model") {
  const auto x = center(simulate(models::four_regime(), 2048, 21));
  const auto loc = detect(x, 256, 0.49);
  REQUIRE(loc.breaks.size() == 3);
  CHECK(loc.breaks[0].components(0, 0));
  CHECK(loc.breaks[1].components(1, 1));
  CHECK((loc.breaks[2].components(0, 1) || loc.breaks[2].components(1, 0)));
}
