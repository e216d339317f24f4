#include <doctest.h>

#include "oracles.hpp"
#include "specbreak/models.hpp"
#include "specbreak/process_sim.hpp"
#include "specbreak/random.hpp"

#include <cmath>
#include <vector>

using namespace specbreak;

TEST_CASE("segment membership uses b_j < t/T <= b_{j+1}") {
  const std::vector<double> b{0.5};
  CHECK(segment_of(b, 1, 512) == 0);
  CHECK(segment_of(b, 256, 512) == 0);
  CHECK(segment_of(b, 257, 512) == 1);
  CHECK(segment_of(b, 512, 512) == 1);
  CHECK(segment_at(b, 0.5) == 0);
  CHECK(segment_at(b, 0.5000001) == 1);

  const std::vector<double> quarters{0.25, 0.5, 0.75};
  CHECK(segment_of(quarters, 512, 2048) == 0);
  CHECK(segment_of(quarters, 513, 2048) == 1);
  CHECK(segment_of(quarters, 1537, 2048) == 3);
}

TEST_CASE("MA simulation reproduces the defining sum on the same innovations") {
  const auto model = models::switching_ma1({0.5}, {1.0, -1.5});
  const Index T = 64;
  const auto x = simulate(model, T, 11);
  GaussianStream gaussian(11);
  const Eigen::MatrixXd z = gaussian.matrix(T + 1, 2);  // row i is Z_{i}, i = 0..T
  for (Index t = 1; t <= T; ++t) {
    const double theta = t <= 32 ? 1.0 : -1.5;
    Eigen::MatrixXd psi1(2, 2);
    psi1 << theta, 0.1, 0.1, theta;
    const Eigen::RowVectorXd expected = z.row(t) + z.row(t - 1) * psi1.transpose();
    CHECK((x.values().row(t - 1) - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("switching scale model multiplies the innovations segment-wise") {
  const auto model = models::switching_scale({0.25, 2.0 / 3.0, 0.75}, {1.0, 2.0, 1.0, 0.5});
  CHECK(model.break_count() == 3);
  const auto x = simulate(model, 256, 3);
  GaussianStream gaussian(3);
  const Eigen::MatrixXd z = gaussian.matrix(256, 2);
  const double sigmas[] = {1.0, 2.0, 1.0, 0.5};
  for (Index t = 1; t <= 256; ++t) {
    const double s = sigmas[segment_of(model.breakpoints, t, 256)];
    Eigen::MatrixXd m(2, 2);
    m << s, 0.2, 0.2, s;
    CHECK((x.values().row(t - 1) - z.row(t - 1) * m.transpose()).norm() < 1e-14);
  }
}

TEST_CASE("stationary VAR(1) sample moments match the Lyapunov solution") {
  Eigen::MatrixXd phi(2, 2);
  phi << 0.5, 0.2, 0.2, 0.5;
  const auto gamma = oracle::var_autocovariances({phi}, Eigen::MatrixXd::Identity(2, 2), 1);
  const auto x = simulate(models::var1(0.5), 200000, 5).values();
  const Eigen::MatrixXd g0 = x.transpose() * x / static_cast<double>(x.rows());
  const Eigen::MatrixXd g1 =
      x.bottomRows(x.rows() - 1).transpose() * x.topRows(x.rows() - 1) / static_cast<double>(x.rows());
  CHECK((g0 - gamma[0]).cwiseAbs().maxCoeff() < 0.05);
  CHECK((g1 - gamma[1]).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("spectral density of MA(1) equals H H^* / 2pi") {
  const auto model = models::ma1(0.5);
  const auto f = spectral_density(model);
  for (double lambda : {0.0, 0.3, 1.7, 3.1}) {
    Eigen::MatrixXd theta(2, 2);
    theta << 0.5, 0.2, 0.2, 0.5;
    const Eigen::MatrixXcd h =
        Eigen::MatrixXcd::Identity(2, 2) + theta.cast<Complex>() * std::exp(Complex(0.0, -lambda));
    const Eigen::MatrixXcd expected = h * h.adjoint() / (2.0 * std::numbers::pi);
    const Eigen::MatrixXcd got = f(0.3, lambda);
    CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((got - got.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  }
  // white noise: f = I / 2pi
  const auto white = spectral_density(models::four_regime());
  CHECK(std::abs(white(0.1, 1.0)(0, 0).real() - 1.0 / (2.0 * std::numbers::pi)) < 1e-15);
  CHECK(std::abs(white(0.4, 1.0)(0, 0).real() - 4.0 / (2.0 * std::numbers::pi)) < 1e-14);
}

TEST_CASE("four-regime model changes one spectral entry at each break") {
  const auto f = spectral_density(models::four_regime());
  const auto g = [&](double u) { return Eigen::MatrixXcd(f(u, 0.7)); };
  const Eigen::MatrixXcd d1 = g(0.3) - g(0.2);
  const Eigen::MatrixXcd d2 = g(0.6) - g(0.4);
  const Eigen::MatrixXcd d3 = g(0.9) - g(0.6);
  CHECK(std::abs(d1(0, 0)) > 0.1);
  CHECK(std::abs(d1(1, 1)) < 1e-14);
  CHECK(std::abs(d2(1, 1)) > 0.1);
  CHECK(std::abs(d2(0, 0)) < 1e-14);
  CHECK(std::abs(d3(0, 1)) > 0.1);
  CHECK(std::abs(d3(0, 0)) < 1e-14);
  CHECK(std::abs(d3(1, 1)) < 1e-14);
}

TEST_CASE("simulation is a pure function of the seed") {
  const auto a = simulate(models::ma1(0.5), 256, 7);
  const auto b = simulate(models::ma1(0.5), 256, 7);
  const auto c = simulate(models::ma1(0.5), 256, 8);
  CHECK(a.values() == b.values());
  CHECK(a.values() != c.values());
}

TEST_CASE("invalid models are rejected") {
  CHECK_THROWS_AS((void)models::switching_scale({0.5}, {1.0}), ConfigError);
  CHECK_THROWS_AS((void)models::switching_var1({0.6, 0.4}, {0.5, -0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(models::var1(0.9).validate(), ConfigError);
  CHECK_THROWS_AS((void)models::from_json(nlohmann::json{{"id", "model-9.9"}}), ConfigError);
  CHECK_THROWS_AS((void)models::from_json(nlohmann::json{{"id", "model-6.1"}, {"breaks", {0.5}}}), ConfigError);
}

TEST_CASE("JSON model descriptions accept rationals and round-trip") {
  const auto model = models::from_json(
      nlohmann::json::parse(R"({"id": "model-6.5", "breaks": ["1/4", "2/3", 0.75], "sigma": [1, 2, 1, "0.5"]})"));
  REQUIRE(break_count(model) == 3);
  CHECK(breakpoints(model)[1] == doctest::Approx(2.0 / 3.0));
  const auto again = models::from_json(models::to_json(model));
  CHECK(simulate(again, 128, 1).values() == simulate(model, 128, 1).values());
}

TEST_CASE("substreams are distinct and reproducible") {
  CHECK(substream_seed(1, 0) != substream_seed(1, 1));
  CHECK(substream_seed(1, 0) != substream_seed(2, 0));
  CHECK(substream_seed(42, 7) == substream_seed(42, 7));
}
