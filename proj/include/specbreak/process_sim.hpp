#pragma once

#include "specbreak/types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace specbreak {

/**
 * Piecewise stationary linear process
 *
 *   X_{t,T} = sum_l Psi_l(t/T) Z_{t-l},   Z_t iid N(0, I_d),
 *
 * with Psi_l(u) = Psi_l^{(j)} on the segment b_j < u <= b_{j+1}. Each segment
 * stores a finite list Psi_0, ..., Psi_L of d x d coefficient matrices.
 */
struct PiecewiseLinearModel {
  Index dimension = 0;
  std::vector<double> breakpoints;                       // b_1 < ... < b_K in (0, 1)
  std::vector<std::vector<Eigen::MatrixXd>> segments;    // K + 1 entries
  std::string name;

  /// Throws ConfigError on inconsistent dimensions, unordered breakpoints or empty segments.
  void validate() const;
  [[nodiscard]] Index max_lag() const;
  [[nodiscard]] Index break_count() const { return static_cast<Index>(breakpoints.size()); }
};

/**
 * Piecewise vector autoregression
 *
 *   X_{t,T} = sum_{j=1}^p Phi_j(t/T) X_{t-j,T} + Z_t
 *
 * with the same segment convention as PiecewiseLinearModel.
 */
struct PiecewiseVarModel {
  Index dimension = 0;
  std::vector<double> breakpoints;
  std::vector<std::vector<Eigen::MatrixXd>> segments;  // AR matrices Phi_1..Phi_p per segment
  std::string name;

  /// Throws ConfigError on inconsistent shapes or an unstable segment.
  void validate() const;
  [[nodiscard]] Index order() const;
  [[nodiscard]] Index break_count() const { return static_cast<Index>(breakpoints.size()); }
};

using ProcessModel = std::variant<PiecewiseLinearModel, PiecewiseVarModel>;

/// Segment of 1-based time t: the number of breakpoints b with b*T < t.
[[nodiscard]] Index segment_of(std::span<const double> breakpoints, Index t, Index T);

/// Segment of rescaled time u: the number of breakpoints b with b < u.
[[nodiscard]] Index segment_at(std::span<const double> breakpoints, double u);

/// Spectral radius of the companion matrix of Phi_1..Phi_p (0 for p = 0).
[[nodiscard]] double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& coefficients);

[[nodiscard]] TimeSeries simulate(const PiecewiseLinearModel& model, Index T, std::uint64_t seed);

/// Recursion started at zero with 500 + 10 p discarded burn-in steps under the first segment.
[[nodiscard]] TimeSeries simulate(const PiecewiseVarModel& model, Index T, std::uint64_t seed);

[[nodiscard]] TimeSeries simulate(const ProcessModel& model, Index T, std::uint64_t seed);

/// Stationary VAR(1) with unit innovation covariance.
[[nodiscard]] TimeSeries simulate_var1(const Eigen::MatrixXd& phi, Index T, std::uint64_t seed);

/// Burn-in length used by every autoregressive generator.
[[nodiscard]] constexpr Index burn_in(Index order) noexcept { return 500 + 10 * order; }

/// Time-varying spectral density f(u, lambda) of a piecewise linear model.
class SpectralDensityFn {
 public:
  explicit SpectralDensityFn(PiecewiseLinearModel model);

  /// f(u, lambda) = (1/2pi) sum_{l,m} Psi_l(u) Psi_m(u)^T exp(-i lambda (l - m)).
  [[nodiscard]] Eigen::MatrixXcd operator()(double u, double lambda) const;

  /// Stationary density of segment j.
  [[nodiscard]] Eigen::MatrixXcd segment(Index j, double lambda) const;

 private:
  PiecewiseLinearModel model_;
};

[[nodiscard]] SpectralDensityFn spectral_density(const PiecewiseLinearModel& model);

[[nodiscard]] Index break_count(const ProcessModel& model);
[[nodiscard]] const std::vector<double>& breakpoints(const ProcessModel& model);
[[nodiscard]] Index dimension(const ProcessModel& model);
[[nodiscard]] const std::string& name(const ProcessModel& model);
void validate(const ProcessModel& model);

}  // namespace specbreak
