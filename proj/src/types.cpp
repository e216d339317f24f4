#include "specbreak/types.hpp"

#include <cmath>

namespace specbreak {

TimeSeries::TimeSeries(Eigen::MatrixXd values, bool centered)
    : values_(std::move(values)), centered_(centered) {
  if (!values_.allFinite()) {
    throw DataError("time series contains non-finite values");
  }
  if (centered_ && values_.rows() > 0) {
    for (Index c = 0; c < values_.cols(); ++c) {
      const double mean = values_.col(c).mean();
      const double scale = std::max(1.0, values_.col(c).cwiseAbs().maxCoeff());
      if (std::abs(mean) > 1e-12 * scale) {
        throw DataError("series flagged as centered has non-zero column mean");
      }
    }
  }
}

TimeSeries center(const TimeSeries& series) {
  Eigen::MatrixXd values = series.values();
  if (values.rows() > 0) {
    values.rowwise() -= values.colwise().mean();
  }
  return TimeSeries(std::move(values), true);
}

TimeSeries scale(const TimeSeries& series, double factor) {
  return TimeSeries(series.values() * factor, series.centered());
}

Index zero_variance_column(const TimeSeries& series) {
  const auto& x = series.values();
  for (Index c = 0; c < x.cols(); ++c) {
    const double mean = x.col(c).mean();
    if (x.rows() == 0 || (x.col(c).array() - mean).square().sum() == 0.0) {
      return c;
    }
  }
  return -1;
}

}  // namespace specbreak
