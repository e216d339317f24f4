#pragma once

#include "specbreak/types.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace specbreak {

/// Vector autoregression X_t = sum_{j=1}^p A_j X_{t-j} + Sigma^{1/2} Z_t.
struct ARModel {
  std::vector<Eigen::MatrixXd> coefficients;  // A_1 .. A_p
  Eigen::MatrixXd innovation_cov;             // Sigma, symmetric

  [[nodiscard]] Index order() const noexcept { return static_cast<Index>(coefficients.size()); }
  [[nodiscard]] Index dimension() const noexcept { return innovation_cov.rows(); }
  [[nodiscard]] double spectral_radius() const;
  [[nodiscard]] bool is_stable() const { return spectral_radius() < 1.0; }

  friend bool operator==(const ARModel& lhs, const ARModel& rhs);
};

/// Biased sample autocovariances Gamma(h) = (1/T) sum_{t=1}^{T-h} X_{t+h} X_t^T, h = 0..h_max.
struct AutocovarianceSeq {
  std::vector<Eigen::MatrixXd> lags;

  [[nodiscard]] Index max_lag() const noexcept { return static_cast<Index>(lags.size()) - 1; }
  [[nodiscard]] Index dimension() const noexcept { return lags.front().rows(); }

  /// Gamma(h) for any integer h, using Gamma(-h) = Gamma(h)^T.
  [[nodiscard]] Eigen::MatrixXd operator()(Index h) const {
    return h >= 0 ? lags.at(h) : Eigen::MatrixXd(lags.at(-h).transpose());
  }

  /// pd x pd block Toeplitz matrix with block (i, j) = Gamma(j - i).
  [[nodiscard]] Eigen::MatrixXd block_toeplitz(Index p) const;
};

/// Second moments about zero; the process is assumed centered. Throws ParameterError if h_max >= T.
[[nodiscard]] AutocovarianceSeq autocovariances(const TimeSeries& series, Index max_lag);

/**
 * Multivariate Yule-Walker fit of order p by the Whittle (block Levinson)
 * recursion, falling back to a direct block-Toeplitz solve when the recursion
 * hits a near-singular prediction-error covariance.
 *
 * Sigma = Gamma(0) - sum_j A_j Gamma(j)^T, symmetrized. Throws FitError
 * (with a reciprocal condition estimate) if the system is singular.
 */
[[nodiscard]] ARModel yule_walker(const AutocovarianceSeq& acvs, Index p);

/// Yule-Walker fits of every order 0..p_max from one pass of the recursion.
[[nodiscard]] std::vector<ARModel> yule_walker_path(const AutocovarianceSeq& acvs, Index p_max);

/// Yule-Walker by solving the block-Toeplitz system directly (LDL^T).
[[nodiscard]] ARModel yule_walker_direct(const AutocovarianceSeq& acvs, Index p);

/// f(lambda) = (1/2pi) A(e^{-i lambda})^{-1} Sigma A(e^{-i lambda})^{-*}, A(z) = I - sum_j A_j z^j.
class ArSpectralDensity {
 public:
  explicit ArSpectralDensity(ARModel model);
  [[nodiscard]] Eigen::MatrixXcd operator()(double lambda) const;
  [[nodiscard]] const ARModel& model() const noexcept { return model_; }

 private:
  ARModel model_;
};

/// Throws FitError if the model is not stable.
[[nodiscard]] ArSpectralDensity ar_spectral_density(const ARModel& model);

struct OrderSelection {
  Index order = 0;
  std::map<Index, double> scores;  // Whittle AIC per candidate
};

/// {1, ..., min(ceil(10 log10 T), floor(T / 20))}, never empty.
[[nodiscard]] std::vector<Index> default_order_candidates(Index T);

/**
 * Whittle AIC order choice
 *
 *   (2 pi / T) sum_{k=1}^{T/2} [ log det f_p(lambda_k) + tr(f_p(lambda_k)^{-1} I_T(lambda_k)) ] + p / T
 *
 * over the Yule-Walker fits f_p, with the full-sample periodogram I_T at
 * lambda_k = 2 pi k / T. Ties go to the smaller order; the candidate list is
 * treated as a set.
 */
[[nodiscard]] OrderSelection aic_order(const TimeSeries& series, std::span<const Index> candidates,
                                       int workers = 1);

struct ResidualFit {
  Eigen::MatrixXd residuals;   // (T - p) x d, row i is z_{p+1+i}
  Eigen::VectorXd mean;        // z-bar
  Eigen::MatrixXd covariance;  // (1/(T-p)) sum (z - zbar)(z - zbar)^T
};

/// z_j = X_j - sum_i A_i X_{j-i} for j = p+1..T and their centered covariance.
[[nodiscard]] ResidualFit residuals_and_cov(const TimeSeries& series, const ARModel& model);

/// Symmetric PSD square root; eigenvalues in (-1e-10, 0) are clamped, below that FitError.
[[nodiscard]] Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma);

/// Gaussian simulation with zero start and burn_in(p) discarded steps. Throws FitError if unstable.
[[nodiscard]] TimeSeries ar_simulate(const ARModel& model, Index T, std::uint64_t seed);

/// ar_simulate with the stability check and Sigma^{1/2} done once for many draws.
class ArGenerator {
 public:
  explicit ArGenerator(const ARModel& model);
  [[nodiscard]] TimeSeries operator()(Index T, std::uint64_t seed) const;

 private:
  Index order_;
  Eigen::MatrixXd stacked_;  // [A_p ... A_1], d x pd
  Eigen::MatrixXd root_;
};

}  // namespace specbreak
