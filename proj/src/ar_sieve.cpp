#include "specbreak/ar_sieve.hpp"

#include "specbreak/parallel.hpp"
#include "specbreak/process_sim.hpp"
#include "specbreak/random.hpp"
#include "specbreak/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace specbreak {

namespace {

constexpr double kMinRcond = 1e-13;

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return (m + m.transpose()) / 2.0; }

Eigen::MatrixXd innovation_covariance(const AutocovarianceSeq& acvs,
                                      const std::vector<Eigen::MatrixXd>& coefficients) {
  Eigen::MatrixXd sigma = acvs(0);
  for (Index j = 0; j < Index(coefficients.size()); ++j) {
    sigma.noalias() -= coefficients[j] * acvs(j + 1).transpose();
  }
  return symmetrize(sigma);
}

// Returns (M^{-1} rhs^T)^T for symmetric M, or nothing if M is numerically singular.
std::optional<Eigen::MatrixXd> right_divide(const Eigen::MatrixXd& rhs, const Eigen::MatrixXd& m) {
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(symmetrize(m));
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > kMinRcond)) return std::nullopt;
  return Eigen::MatrixXd(ldlt.solve(rhs.transpose()).transpose());
}

void check_order(const AutocovarianceSeq& acvs, Index p) {
  if (p < 0) throw ParameterError("AR order must be non-negative");
  if (p > acvs.max_lag()) throw ParameterError("AR order exceeds the available autocovariance lags");
}

}  // namespace

double ARModel::spectral_radius() const { return companion_spectral_radius(coefficients); }

bool operator==(const ARModel& lhs, const ARModel& rhs) {
  if (lhs.order() != rhs.order()) return false;
  if (lhs.innovation_cov.rows() != rhs.innovation_cov.rows() ||
      lhs.innovation_cov.cols() != rhs.innovation_cov.cols() ||
      lhs.innovation_cov != rhs.innovation_cov) {
    return false;
  }
  for (Index j = 0; j < lhs.order(); ++j) {
    if (lhs.coefficients[j].rows() != rhs.coefficients[j].rows() ||
        lhs.coefficients[j] != rhs.coefficients[j]) {
      return false;
    }
  }
  return true;
}

Eigen::MatrixXd AutocovarianceSeq::block_toeplitz(Index p) const {
  const Index d = dimension();
  Eigen::MatrixXd r(p * d, p * d);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) r.block(i * d, j * d, d, d) = (*this)(j - i);
  }
  return r;
}

AutocovarianceSeq autocovariances(const TimeSeries& series, Index max_lag) {
  const Index T = series.length();
  if (max_lag < 0 || max_lag >= T) throw ParameterError("autocovariance lag must lie in [0, T)");
  const auto& x = series.values();
  AutocovarianceSeq out;
  out.lags.reserve(static_cast<std::size_t>(max_lag + 1));
  for (Index h = 0; h <= max_lag; ++h) {
    out.lags.push_back(x.bottomRows(T - h).transpose() * x.topRows(T - h) / static_cast<double>(T));
  }
  return out;
}

ARModel yule_walker_direct(const AutocovarianceSeq& acvs, Index p) {
  check_order(acvs, p);
  const Index d = acvs.dimension();
  if (p == 0) return {{}, symmetrize(acvs(0))};
  const Eigen::MatrixXd r = acvs.block_toeplitz(p);
  Eigen::MatrixXd g(d, p * d);
  for (Index j = 0; j < p; ++j) g.block(0, j * d, d, d) = acvs(j + 1);
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(r);
  const double rcond = ldlt.rcond();
  if (ldlt.info() != Eigen::Success || !(rcond > kMinRcond)) {
    throw FitError("Yule-Walker system is singular (rcond " + std::to_string(rcond) + ")", rcond);
  }
  const Eigen::MatrixXd a = ldlt.solve(g.transpose()).transpose();
  ARModel model;
  for (Index j = 0; j < p; ++j) model.coefficients.push_back(a.block(0, j * d, d, d));
  model.innovation_cov = innovation_covariance(acvs, model.coefficients);
  return model;
}

std::vector<ARModel> yule_walker_path(const AutocovarianceSeq& acvs, Index p_max) {
  check_order(acvs, p_max);
  std::vector<ARModel> path;
  path.push_back({{}, symmetrize(acvs(0))});
  std::vector<Eigen::MatrixXd> forward;
  std::vector<Eigen::MatrixXd> backward;
  Eigen::MatrixXd v_forward = acvs(0);
  Eigen::MatrixXd v_backward = acvs(0);
  bool recursion_ok = true;
  for (Index k = 1; k <= p_max; ++k) {
    if (recursion_ok) {
      Eigen::MatrixXd delta = acvs(k);
      for (Index j = 1; j < k; ++j) delta.noalias() -= forward[j - 1] * acvs(k - j);
      const auto a_kk = right_divide(delta, v_backward);
      const auto b_kk = right_divide(delta.transpose(), v_forward);
      if (a_kk && b_kk) {
        std::vector<Eigen::MatrixXd> next_forward(static_cast<std::size_t>(k));
        std::vector<Eigen::MatrixXd> next_backward(static_cast<std::size_t>(k));
        for (Index j = 1; j < k; ++j) {
          next_forward[j - 1] = forward[j - 1] - *a_kk * backward[k - j - 1];
          next_backward[j - 1] = backward[j - 1] - *b_kk * forward[k - j - 1];
        }
        next_forward[k - 1] = *a_kk;
        next_backward[k - 1] = *b_kk;
        v_forward = symmetrize(v_forward - *a_kk * delta.transpose());
        v_backward = symmetrize(v_backward - *b_kk * delta);
        forward = std::move(next_forward);
        backward = std::move(next_backward);
        path.push_back({forward, innovation_covariance(acvs, forward)});
        continue;
      }
      recursion_ok = false;
    }
    path.push_back(yule_walker_direct(acvs, k));
  }
  return path;
}

ARModel yule_walker(const AutocovarianceSeq& acvs, Index p) {
  return std::move(yule_walker_path(acvs, p).back());
}

ArSpectralDensity::ArSpectralDensity(ARModel model) : model_(std::move(model)) {
  if (!model_.is_stable()) throw FitError("AR model is not stable");
}

Eigen::MatrixXcd ArSpectralDensity::operator()(double lambda) const {
  const Index d = model_.dimension();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(d, d);
  for (Index j = 0; j < model_.order(); ++j) {
    a -= model_.coefficients[j].cast<Complex>() * std::polar(1.0, -lambda * static_cast<double>(j + 1));
  }
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const Eigen::MatrixXcd inv = lu.inverse();
  Eigen::MatrixXcd f = inv * model_.innovation_cov.cast<Complex>() * inv.adjoint() /
                       (2.0 * std::numbers::pi);
  return (f + f.adjoint()) / 2.0;
}

ArSpectralDensity ar_spectral_density(const ARModel& model) { return ArSpectralDensity(model); }

std::vector<Index> default_order_candidates(Index T) {
  const auto by_log = static_cast<Index>(std::ceil(10.0 * std::log10(static_cast<double>(T))));
  const Index upper = std::max<Index>(1, std::min(by_log, T / 20));
  std::vector<Index> out(static_cast<std::size_t>(upper));
  for (Index p = 1; p <= upper; ++p) out[p - 1] = p;
  return out;
}

OrderSelection aic_order(const TimeSeries& series, std::span<const Index> candidates, int workers) {
  if (candidates.empty()) throw ParameterError("AIC needs at least one candidate order");
  std::vector<Index> orders(candidates.begin(), candidates.end());
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  if (orders.front() < 0) throw ParameterError("AR orders must be non-negative");
  const Index T = series.length();
  const Index d = series.dimension();
  if (orders.back() >= T) throw ParameterError("AR order must be smaller than T");

  const auto path = yule_walker_path(autocovariances(series, orders.back()), orders.back());
  const auto dft = window_dft(series.values(), 1, T);
  const Index half = T / 2;
  const double norm = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(T));

  std::vector<double> scores(orders.size());
  parallel_for(
      Index(orders.size()),
      [&](Index i) {
        const Index p = orders[i];
        const ArSpectralDensity density(path[p]);
        double sum = 0.0;
        for (Index k = 1; k <= half; ++k) {
          const double lambda = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(T);
          const Eigen::MatrixXcd f = density(lambda);
          const Eigen::LLT<Eigen::MatrixXcd> llt(f);
          if (llt.info() != Eigen::Success) {
            throw FitError("fitted AR spectrum is not positive definite at order " + std::to_string(p));
          }
          double log_det = 0.0;
          for (Index c = 0; c < d; ++c) log_det += 2.0 * std::log(llt.matrixLLT()(c, c).real());
          const Eigen::VectorXcd j = dft.row(k - 1).transpose();
          // tr(f^{-1} J J^* norm) = norm * J^* f^{-1} J
          const double quad = (j.adjoint() * llt.solve(j))(0, 0).real() * norm;
          sum += log_det + quad;
        }
        scores[i] = 2.0 * std::numbers::pi / static_cast<double>(T) * sum +
                    static_cast<double>(p) / static_cast<double>(T);
      },
      workers);

  OrderSelection out;
  double best = 0.0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    out.scores[orders[i]] = scores[i];
    if (i == 0 || scores[i] < best) {
      best = scores[i];
      out.order = orders[i];
    }
  }
  return out;
}

ResidualFit residuals_and_cov(const TimeSeries& series, const ARModel& model) {
  const Index T = series.length();
  const Index p = model.order();
  const Index d = series.dimension();
  if (T <= p) throw ParameterError("series must be longer than the AR order");
  if (model.dimension() != d) throw ParameterError("AR model dimension does not match the series");
  const auto& x = series.values();
  ResidualFit out;
  out.residuals = x.bottomRows(T - p);
  for (Index i = 1; i <= p; ++i) {
    out.residuals.noalias() -= x.middleRows(p - i, T - p) * model.coefficients[i - 1].transpose();
  }
  out.mean = out.residuals.colwise().mean().transpose();
  const Eigen::MatrixXd centered = out.residuals.rowwise() - out.mean.transpose();
  out.covariance = symmetrize(centered.transpose() * centered / static_cast<double>(T - p));
  return out;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(sigma));
  if (eig.info() != Eigen::Success) throw FitError("eigen decomposition of the covariance failed");
  Eigen::VectorXd values = eig.eigenvalues();
  if (values.size() > 0 && values.minCoeff() < -1e-10) {
    throw FitError("innovation covariance is not positive semidefinite");
  }
  values = values.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

ArGenerator::ArGenerator(const ARModel& model)
    : order_(model.order()),
      stacked_(model.dimension(), model.order() * model.dimension()),
      root_(psd_sqrt(model.innovation_cov)) {
  if (!model.is_stable()) throw FitError("cannot simulate an unstable AR model");
  const Index d = model.dimension();
  for (Index j = 1; j <= order_; ++j) stacked_.middleCols((order_ - j) * d, d) = model.coefficients[j - 1];
}

TimeSeries ArGenerator::operator()(Index T, std::uint64_t seed) const {
  if (T < 1) throw ParameterError("series length must be positive");
  const Index d = root_.rows();
  const Index p = order_;
  const Index warmup = burn_in(p);
  GaussianStream gaussian(seed);
  const Eigen::MatrixXd innovations = gaussian.matrix(warmup + T, d) * root_;  // root is symmetric
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor path = RowMajor::Zero(p + warmup + T, d);
  for (Index s = 0; s < warmup + T; ++s) {
    const Eigen::Map<const Eigen::VectorXd> lags(path.data() + s * d, p * d);  // X_{s-p} .. X_{s-1}
    path.row(p + s) = innovations.row(s) + (stacked_ * lags).transpose();
  }
  return TimeSeries(Eigen::MatrixXd(path.bottomRows(T)));
}

TimeSeries ar_simulate(const ARModel& model, Index T, std::uint64_t seed) {
  return ArGenerator(model)(T, seed);
}

}  // namespace specbreak
