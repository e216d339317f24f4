#include "specbreak/spectral.hpp"

#include "specbreak/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace specbreak {

namespace {

void check_window(Index N, Index T) {
  if (N < 2 || N % 2 != 0) throw ParameterError("window length N must be a positive even integer");
  if (N > T) throw ParameterError("window length N exceeds the series length");
}

// (1/N)(I_right - I_left) entry (a, b) at one Fourier frequency.
// Real arithmetic throughout; std::complex products take a slow NaN-recovery path.
inline Complex increment(Complex right_a, Complex right_b, Complex left_a, Complex left_b,
                         double scale) {
  const double re = right_a.real() * right_b.real() + right_a.imag() * right_b.imag() -
                    left_a.real() * left_b.real() - left_a.imag() * left_b.imag();
  const double im = right_a.imag() * right_b.real() - right_a.real() * right_b.imag() -
                    left_a.imag() * left_b.real() + left_a.real() * left_b.imag();
  return {re * scale, im * scale};
}

inline Complex rotate(Complex w, Complex z) {
  return {w.real() * z.real() - w.imag() * z.imag(), w.real() * z.imag() + w.imag() * z.real()};
}

inline double scale_for(Index N) {
  const double n = static_cast<double>(N);
  return 1.0 / (2.0 * std::numbers::pi * n * n);
}

}  // namespace

LocalPeriodogram local_periodogram(const TimeSeries& series, Index center, Index N) {
  check_window(N, series.length());
  LocalPeriodogram out{center, N, {}};
  const auto dft = window_dft(series.values(), center - N / 2 + 1, N);
  out.ordinates.reserve(static_cast<std::size_t>(N / 2));
  for (Index k = 0; k < N / 2; ++k) {
    out.ordinates.push_back(periodogram_matrix(dft.row(k).transpose(), N));
  }
  return out;
}

WindowDfts::WindowDfts(const TimeSeries& series, Index length, Index first, Index last, int workers)
    : length_(length), dimension_(series.dimension()), first_(first) {
  check_window(length, series.length());
  const Index count = std::max<Index>(0, last - first + 1);
  const Index h = half();
  data_.resize(static_cast<std::size_t>(count * h * dimension_));
  std::vector<Complex> twiddle(static_cast<std::size_t>(h));
  for (Index k = 1; k <= h; ++k) {
    twiddle[k - 1] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) /
                                         static_cast<double>(length));
  }
  const Index blocks = (count + kAnchorStride - 1) / kAnchorStride;
  parallel_for(
      blocks,
      [&](Index block) {
        const Index begin = first + block * kAnchorStride;
        const Index end = std::min(last, begin + kAnchorStride - 1);
        Eigen::Map<Eigen::MatrixXcd> anchor(data_.data() + (begin - first_) * h * dimension_, h,
                                            dimension_);
        anchor = window_dft(series.values(), begin, length);
        for (Index s = begin; s < end; ++s) {
          const Complex* current = data_.data() + (s - first_) * h * dimension_;
          Complex* next = data_.data() + (s + 1 - first_) * h * dimension_;
          for (Index c = 0; c < dimension_; ++c) {
            const double delta = series.at(s + length, c) - series.at(s, c);
            for (Index k = 0; k < h; ++k) {
              next[c * h + k] = rotate(twiddle[k], current[c * h + k] + delta);
            }
          }
        }
      },
      workers);
}

DGrid::DGrid(Index window, Index length, Index dimension)
    : window_(window), length_(length), dimension_(dimension) {
  if (window < 2 || window % 2 != 0) throw ParameterError("window length N must be a positive even integer");
  if (2 * window > length) throw ParameterError("d_grid requires 2N <= T");
  data_.assign(static_cast<std::size_t>(size() * (frequencies() + 1) * dimension * dimension),
               Complex(0.0, 0.0));
}

Index DGrid::clamp(double v) const {
  const double scaled = std::floor(v * static_cast<double>(length_));
  const double lo = static_cast<double>(first_index());
  const double hi = static_cast<double>(last_index());
  return static_cast<Index>(std::clamp(scaled, lo, hi));
}

Index DGrid::frequency_index(double omega) const {
  const double k = std::floor(std::clamp(omega, 0.0, 1.0) * static_cast<double>(frequencies()));
  return static_cast<Index>(k);
}

DGrid d_grid(const TimeSeries& series, Index N, int workers) {
  const Index T = series.length();
  const Index d = series.dimension();
  DGrid grid(N, T, d);
  const WindowDfts dfts(series, N, 1, T - N + 1, workers);
  const Index h = N / 2;
  const double scale = scale_for(N);
  parallel_for(
      grid.size(),
      [&](Index i) {
        const Index m = grid.first_index() + i;
        const auto left = dfts.at(m - N + 1);
        const auto right = dfts.at(m + 1);
        for (Index k = 1; k <= h; ++k) {
          auto current = grid.prefix(m, k);
          const auto previous = grid.prefix(m, k - 1);
          for (Index b = 0; b < d; ++b) {
            for (Index a = 0; a <= b; ++a) {
              current(a, b) = previous(a, b) + increment(right(k - 1, a), right(k - 1, b),
                                                         left(k - 1, a), left(k - 1, b), scale);
              current(b, a) = std::conj(current(a, b));
            }
          }
        }
      },
      workers);
  return grid;
}

double sup_statistic(const DGrid& grid) {
  const Index d = grid.dimension();
  double best = 0.0;
  for (Index m = grid.first_index(); m <= grid.last_index(); ++m) {
    for (Index k = 0; k <= grid.frequencies(); ++k) {
      const auto p = grid.prefix(m, k);
      for (Index b = 0; b < d; ++b) {
        for (Index a = 0; a <= b; ++a) best = std::max(best, std::norm(p(a, b)));
      }
    }
  }
  return std::sqrt(best);
}

double sup_statistic(const TimeSeries& series, Index N) {
  const Index T = series.length();
  const Index d = series.dimension();
  if (N < 2 || N % 2 != 0) throw ParameterError("window length N must be a positive even integer");
  if (2 * N > T) throw ParameterError("the statistic requires 2N <= T");
  const WindowDfts dfts(series, N, 1, T - N + 1);
  const Index h = N / 2;
  const double scale = scale_for(N);
  double best = 0.0;
  for (Index m = N; m <= T - N; ++m) {
    const auto left = dfts.at(m - N + 1);
    const auto right = dfts.at(m + 1);
    for (Index b = 0; b < d; ++b) {
      for (Index a = 0; a <= b; ++a) {
        const Complex* ra = right.data() + a * h;
        const Complex* rb = right.data() + b * h;
        const Complex* la = left.data() + a * h;
        const Complex* lb = left.data() + b * h;
        Complex value(0.0, 0.0);
        for (Index k = 0; k < h; ++k) {
          value = value + increment(ra[k], rb[k], la[k], lb[k], scale);
          best = std::max(best, value.real() * value.real() + value.imag() * value.imag());
        }
      }
    }
  }
  return std::sqrt(best);
}

double sup_over_omega(const DGrid& grid, Index m, Index a, Index b) {
  if (a < 0 || b < 0 || a >= grid.dimension() || b >= grid.dimension()) {
    throw ParameterError("component index out of range");
  }
  if (m < grid.first_index() || m > grid.last_index()) {
    throw ParameterError("grid index outside [N, T - N]");
  }
  double best = 0.0;
  for (Index k = 0; k <= grid.frequencies(); ++k) best = std::max(best, std::norm(grid.entry(m, k, a, b)));
  return std::sqrt(best);
}

Eigen::MatrixXcd d_hat(const TimeSeries& series, Index N, Index m, Index k) {
  const auto left = local_periodogram(series, m - N / 2, N);
  const auto right = local_periodogram(series, m + N / 2, N);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(series.dimension(), series.dimension());
  for (Index kappa = 1; kappa <= k; ++kappa) {
    out += (right.ordinates[kappa - 1] - left.ordinates[kappa - 1]) / static_cast<double>(N);
  }
  return out;
}

double limit_kernel(const KernelSpec& spec) {
  if (!(spec.c >= 2.0)) throw ParameterError("kernel requires c >= 2");
  const double inv_c = 1.0 / spec.c;
  auto clamp_v = [&](double v) { return std::min(std::max(v, inv_c), 1.0 - inv_c); };
  const double gap = std::abs(clamp_v(spec.v2) - clamp_v(spec.v1));
  double weight = 0.0;
  if (gap >= 2.0 * inv_c) {
    return 0.0;
  } else if (gap >= inv_c) {
    weight = -(2.0 - gap * spec.c);
  } else {
    weight = 2.0 - 3.0 * gap * spec.c;
  }
  const double upper = std::min(spec.omega1, spec.omega2) * std::numbers::pi;
  if (upper <= 0.0) return 0.0;
  auto rho = [&](double lambda) {
    const Eigen::MatrixXcd plus = spec.density(lambda);
    const Eigen::MatrixXcd minus = spec.density(-lambda);
    const Complex value = plus(spec.a1, spec.a2) * minus(spec.b1, spec.b2) +
                          plus(spec.a1, spec.b2) * minus(spec.b1, spec.a2);
    return value.real();
  };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(rho, 0.0, upper, 15, 1e-10);
  return weight / std::numbers::pi * integral;
}

}  // namespace specbreak
