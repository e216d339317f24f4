#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace specbreak {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Invalid model or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tuning parameter outside its admissible range (odd N, window too long, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Autoregressive fit failed; carries the reciprocal condition estimate of the system.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, double rcond = 0.0)
      : std::runtime_error(what), rcond_(rcond) {}
  [[nodiscard]] double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// Input data that cannot be analysed (zero-variance components, malformed CSV).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or unreadable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * A T x d real-valued observation matrix; row t-1 holds X_{t,T}.
 *
 * Entries are always finite. When `centered()` is true every column mean is
 * zero up to 1e-12 times the column scale.
 */
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(Eigen::MatrixXd values, bool centered = false);

  [[nodiscard]] Index length() const noexcept { return values_.rows(); }
  [[nodiscard]] Index dimension() const noexcept { return values_.cols(); }
  [[nodiscard]] bool centered() const noexcept { return centered_; }
  [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }

  /// Observation at 1-based time t, zero outside 1..T.
  [[nodiscard]] double at(Index t, Index component) const noexcept {
    return (t < 1 || t > length()) ? 0.0 : values_(t - 1, component);
  }

 private:
  Eigen::MatrixXd values_;
  bool centered_ = false;
};

/// Subtracts column means.
[[nodiscard]] TimeSeries center(const TimeSeries& series);

/// Scales every observation by `factor`; the centered flag is preserved.
[[nodiscard]] TimeSeries scale(const TimeSeries& series, double factor);

/// Index of the first column whose sample variance is zero, or -1.
[[nodiscard]] Index zero_variance_column(const TimeSeries& series);

}  // namespace specbreak
