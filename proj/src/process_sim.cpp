#include "specbreak/process_sim.hpp"

#include "specbreak/random.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace specbreak {

namespace {

void validate_breakpoints(const std::vector<double>& breakpoints, std::size_t segments) {
  if (segments != breakpoints.size() + 1) {
    throw ConfigError("model needs exactly one more segment than breakpoints");
  }
  double previous = 0.0;
  for (double b : breakpoints) {
    if (!(b > previous) || !(b < 1.0)) {
      throw ConfigError("breakpoints must be strictly increasing inside (0, 1)");
    }
    previous = b;
  }
}

void check_square(const Eigen::MatrixXd& m, Index d) {
  if (m.rows() != d || m.cols() != d) {
    throw ConfigError("coefficient matrix is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + ", expected " + std::to_string(d) + "x" +
                      std::to_string(d));
  }
  if (!m.allFinite()) throw ConfigError("coefficient matrix has non-finite entries");
}

}  // namespace

void PiecewiseLinearModel::validate() const {
  if (dimension <= 0) throw ConfigError("model dimension must be positive");
  validate_breakpoints(breakpoints, segments.size());
  for (const auto& segment : segments) {
    if (segment.empty()) throw ConfigError("every segment needs at least Psi_0");
    for (const auto& psi : segment) check_square(psi, dimension);
  }
}

Index PiecewiseLinearModel::max_lag() const {
  Index lag = 0;
  for (const auto& segment : segments) lag = std::max<Index>(lag, Index(segment.size()) - 1);
  return lag;
}

void PiecewiseVarModel::validate() const {
  if (dimension <= 0) throw ConfigError("model dimension must be positive");
  validate_breakpoints(breakpoints, segments.size());
  for (const auto& segment : segments) {
    for (const auto& phi : segment) check_square(phi, dimension);
    if (companion_spectral_radius(segment) >= 1.0) {
      throw ConfigError("autoregressive segment is not stable (companion spectral radius >= 1)");
    }
  }
}

Index PiecewiseVarModel::order() const {
  Index p = 0;
  for (const auto& segment : segments) p = std::max<Index>(p, Index(segment.size()));
  return p;
}

Index segment_of(std::span<const double> breakpoints, Index t, Index T) {
  Index j = 0;
  for (double b : breakpoints) {
    if (b * static_cast<double>(T) < static_cast<double>(t)) ++j;
  }
  return j;
}

Index segment_at(std::span<const double> breakpoints, double u) {
  Index j = 0;
  for (double b : breakpoints) {
    if (b < u) ++j;
  }
  return j;
}

double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& coefficients) {
  if (coefficients.empty()) return 0.0;
  const Index d = coefficients.front().rows();
  const Index p = static_cast<Index>(coefficients.size());
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d * p, d * p);
  for (Index j = 0; j < p; ++j) companion.block(0, j * d, d, d) = coefficients[j];
  if (p > 1) companion.block(d, 0, d * (p - 1), d * (p - 1)).setIdentity();
  return Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues().cwiseAbs().maxCoeff();
}

TimeSeries simulate(const PiecewiseLinearModel& model, Index T, std::uint64_t seed) {
  model.validate();
  const Index lag = model.max_lag();
  if (T < std::max<Index>(1, 2 * lag)) {
    throw ParameterError("series length must be at least twice the MA truncation lag");
  }
  const Index d = model.dimension;
  GaussianStream gaussian(seed);
  // Row i holds Z_{i - lag + 1}, so every X_t sees a full coefficient window.
  const Eigen::MatrixXd z = gaussian.matrix(T + lag, d);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(T, d);
  for (Index t = 1; t <= T; ++t) {
    const auto& psi = model.segments[segment_of(model.breakpoints, t, T)];
    for (Index l = 0; l < Index(psi.size()); ++l) {
      x.row(t - 1).noalias() += z.row(t - 1 + lag - l) * psi[l].transpose();
    }
  }
  return TimeSeries(std::move(x));
}

TimeSeries simulate(const PiecewiseVarModel& model, Index T, std::uint64_t seed) {
  model.validate();
  if (T < 1) throw ParameterError("series length must be positive");
  const Index d = model.dimension;
  const Index p = model.order();
  const Index warmup = burn_in(p);
  GaussianStream gaussian(seed);
  const Eigen::MatrixXd z = gaussian.matrix(warmup + T, d);
  // Rows [0, p) are the zero initial values, row p + s is step s of the recursion.
  Eigen::MatrixXd path = Eigen::MatrixXd::Zero(p + warmup + T, d);
  for (Index s = 0; s < warmup + T; ++s) {
    const Index t = s - warmup + 1;
    const auto& phi = model.segments[t < 1 ? 0 : segment_of(model.breakpoints, t, T)];
    auto row = path.row(p + s);
    row = z.row(s);
    for (Index j = 0; j < Index(phi.size()); ++j) {
      row.noalias() += path.row(p + s - 1 - j) * phi[j].transpose();
    }
  }
  return TimeSeries(path.bottomRows(T));
}

TimeSeries simulate(const ProcessModel& model, Index T, std::uint64_t seed) {
  return std::visit([&](const auto& m) { return simulate(m, T, seed); }, model);
}

TimeSeries simulate_var1(const Eigen::MatrixXd& phi, Index T, std::uint64_t seed) {
  PiecewiseVarModel model{phi.rows(), {}, {{phi}}, "var1"};
  return simulate(model, T, seed);
}

SpectralDensityFn::SpectralDensityFn(PiecewiseLinearModel model) : model_(std::move(model)) {
  model_.validate();
}

Eigen::MatrixXcd SpectralDensityFn::segment(Index j, double lambda) const {
  const auto& psi = model_.segments.at(j);
  // Transfer function sum_l Psi_l e^{-i lambda l}; f = H H^* / 2pi.
  Eigen::MatrixXcd transfer = Eigen::MatrixXcd::Zero(model_.dimension, model_.dimension);
  for (Index l = 0; l < Index(psi.size()); ++l) {
    transfer += psi[l].cast<Complex>() * std::polar(1.0, -lambda * static_cast<double>(l));
  }
  Eigen::MatrixXcd f = transfer * transfer.adjoint() / (2.0 * std::numbers::pi);
  // Exact Hermitian symmetry.
  return (f + f.adjoint()) / 2.0;
}

Eigen::MatrixXcd SpectralDensityFn::operator()(double u, double lambda) const {
  return segment(segment_at(model_.breakpoints, u), lambda);
}

SpectralDensityFn spectral_density(const PiecewiseLinearModel& model) {
  return SpectralDensityFn(model);
}

Index break_count(const ProcessModel& model) {
  return std::visit([](const auto& m) { return m.break_count(); }, model);
}

const std::vector<double>& breakpoints(const ProcessModel& model) {
  return std::visit([](const auto& m) -> const std::vector<double>& { return m.breakpoints; },
                    model);
}

Index dimension(const ProcessModel& model) {
  return std::visit([](const auto& m) { return m.dimension; }, model);
}

const std::string& name(const ProcessModel& model) {
  return std::visit([](const auto& m) -> const std::string& { return m.name; }, model);
}

void validate(const ProcessModel& model) {
  std::visit([](const auto& m) { m.validate(); }, model);
}

}  // namespace specbreak
