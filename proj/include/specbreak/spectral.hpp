#pragma once

#include "specbreak/types.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace specbreak {

/**
 * DFT ordinates of one window.
 *
 * Returns the (N/2) x d matrix whose row k-1 is
 *   J(lambda_k) = sum_{s=0}^{N-1} X_{first+s} exp(-i lambda_k s),  lambda_k = 2 pi k / N,
 * for k = 1..N/2. Rows of `x` are observations at 1-based times 1..x.rows();
 * times outside that range contribute zero.
 */
template <typename Derived>
[[nodiscard]] Eigen::Matrix<std::complex<typename Derived::Scalar>, Eigen::Dynamic, Eigen::Dynamic>
window_dft(const Eigen::MatrixBase<Derived>& x, Index first, Index N) {
  using Scalar = typename Derived::Scalar;
  using ComplexScalar = std::complex<Scalar>;
  const Index half = N / 2;
  Eigen::Matrix<ComplexScalar, Eigen::Dynamic, Eigen::Dynamic> out(half, x.cols());
  Eigen::FFT<Scalar> fft;
  std::vector<Scalar> window(static_cast<std::size_t>(N));
  std::vector<ComplexScalar> spectrum;
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index s = 0; s < N; ++s) {
      const Index row = first + s - 1;
      window[s] = (row < 0 || row >= x.rows()) ? Scalar(0) : x(row, c);
    }
    fft.fwd(spectrum, window);
    for (Index k = 1; k <= half; ++k) out(k - 1, c) = spectrum[k];
  }
  return out;
}

/// I = J J^* / (2 pi N) for one DFT vector J; Hermitian by construction.
template <typename Derived>
[[nodiscard]] Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
periodogram_matrix(const Eigen::MatrixBase<Derived>& dft_row, Index N) {
  using ComplexScalar = typename Derived::Scalar;
  using Real = typename ComplexScalar::value_type;
  const Index d = dft_row.size();
  const Real norm = Real(1) / (Real(2) * std::numbers::pi_v<Real> * Real(N));
  Eigen::Matrix<ComplexScalar, Eigen::Dynamic, Eigen::Dynamic> out(d, d);
  for (Index b = 0; b < d; ++b) {
    for (Index a = 0; a <= b; ++a) {
      out(a, b) = dft_row(a) * std::conj(dft_row(b)) * norm;
      out(b, a) = std::conj(out(a, b));
    }
    out(b, b) = ComplexScalar(std::norm(dft_row(b)) * norm, Real(0));
  }
  return out;
}

/// Local periodogram I_N(u, lambda_k), k = 1..N/2, around center index floor(uT).
struct LocalPeriodogram {
  Index center = 0;
  Index window = 0;
  std::vector<Eigen::MatrixXcd> ordinates;  // ordinates[k - 1] = I_N(u, lambda_k)

  [[nodiscard]] double frequency(Index k) const {
    return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(window);
  }
};

/**
 * Periodogram of X_{c-N/2+1}, ..., X_{c+N/2} with c = `center`, using zero
 * for times outside 1..T. Throws ParameterError if N is odd, non-positive or
 * exceeds T.
 */
[[nodiscard]] LocalPeriodogram local_periodogram(const TimeSeries& series, Index center, Index N);

/**
 * DFT ordinates of every length-L window whose 1-based start lies in
 * [first, last].
 *
 * Consecutive windows are related by J_{s+1}(k) = e^{i lambda_k}(J_s(k) - X_s + X_{s+L});
 * an exact FFT re-anchors the recursion every `kAnchorStride` windows so the
 * rounding drift stays at the 1e-13 level.
 */
class WindowDfts {
 public:
  static constexpr Index kAnchorStride = 64;

  WindowDfts(const TimeSeries& series, Index length, Index first, Index last, int workers = 1);

  [[nodiscard]] Index length() const noexcept { return length_; }
  [[nodiscard]] Index half() const noexcept { return length_ / 2; }
  [[nodiscard]] Index dimension() const noexcept { return dimension_; }

  /// (L/2) x d ordinates of the window starting at `start`.
  [[nodiscard]] Eigen::Map<const Eigen::MatrixXcd> at(Index start) const {
    return {data_.data() + (start - first_) * half() * dimension_, half(), dimension_};
  }

 private:
  Index length_;
  Index dimension_;
  Index first_;
  std::vector<Complex> data_;
};

/**
 * The statistic D_T(v, omega) on the grid v = m/T, m = N..T-N, stored as prefix sums
 *
 *   P(m, k) = (1/N) sum_{kappa <= k} [ I_N(right window, lambda_kappa) - I_N(left window, lambda_kappa) ],
 *
 * k = 0..N/2, where the left window holds X_{m-N+1..m} and the right window
 * X_{m+1..m+N}. D_T(v, omega) = P(floor(vT), floor(omega N / 2)) with v clamped
 * to [N/T, 1 - N/T].
 */
class DGrid {
 public:
  DGrid(Index window, Index length, Index dimension);

  [[nodiscard]] Index window() const noexcept { return window_; }
  [[nodiscard]] Index length() const noexcept { return length_; }
  [[nodiscard]] Index dimension() const noexcept { return dimension_; }
  [[nodiscard]] Index first_index() const noexcept { return window_; }
  [[nodiscard]] Index last_index() const noexcept { return length_ - window_; }
  [[nodiscard]] Index size() const noexcept { return last_index() - first_index() + 1; }
  [[nodiscard]] Index frequencies() const noexcept { return window_ / 2; }
  [[nodiscard]] double location(Index m) const noexcept {
    return static_cast<double>(m) / static_cast<double>(length_);
  }

  [[nodiscard]] Eigen::Map<const Eigen::MatrixXcd> prefix(Index m, Index k) const {
    return {data_.data() + offset(m, k), dimension_, dimension_};
  }
  [[nodiscard]] Eigen::Map<Eigen::MatrixXcd> prefix(Index m, Index k) {
    return {data_.data() + offset(m, k), dimension_, dimension_};
  }
  [[nodiscard]] Complex entry(Index m, Index k, Index a, Index b) const {
    return data_[offset(m, k) + b * dimension_ + a];
  }

  /// Grid index floor(vT) clamped to [N, T - N].
  [[nodiscard]] Index clamp(double v) const;

  /// floor(omega N / 2) for omega in [0, 1].
  [[nodiscard]] Index frequency_index(double omega) const;

  /// D_T(v, omega) with boundary clamping.
  [[nodiscard]] Eigen::MatrixXcd operator()(double v, double omega) const {
    return prefix(clamp(v), frequency_index(omega));
  }

 private:
  [[nodiscard]] std::size_t offset(Index m, Index k) const {
    return static_cast<std::size_t>(((m - window_) * (frequencies() + 1) + k) * dimension_ * dimension_);
  }

  Index window_;
  Index length_;
  Index dimension_;
  std::vector<Complex> data_;
};

/// Builds the grid; requires N even, N >= 2 and 2N <= T.
[[nodiscard]] DGrid d_grid(const TimeSeries& series, Index N, int workers = 1);

/// max over grid v, k and (a, b) of |[P(m, k)]_{a,b}|.
[[nodiscard]] double sup_statistic(const DGrid& grid);

/// Same value as sup_statistic(d_grid(series, N)) without materializing the grid.
[[nodiscard]] double sup_statistic(const TimeSeries& series, Index N);

/// max over k of |[P(m, k)]_{a,b}| at grid index m.
[[nodiscard]] double sup_over_omega(const DGrid& grid, Index m, Index a, Index b);

/// D_T at grid index m and frequency index k from two local periodograms.
[[nodiscard]] Eigen::MatrixXcd d_hat(const TimeSeries& series, Index N, Index m, Index k);

/**
 * Inputs of the limiting covariance kernel: a stationary spectral density
 * f(lambda), ratio c = T/N, two component pairs and two points (v, omega).
 * Component indices are 0-based.
 */
struct KernelSpec {
  std::function<Eigen::MatrixXcd(double)> density;
  double c = 2.0;
  Index a1 = 0, b1 = 0, a2 = 0, b2 = 0;
  double v1 = 0.5, omega1 = 1.0;
  double v2 = 0.5, omega2 = 1.0;
};

/**
 * Covariance of the Gaussian limit G at two points,
 *
 *   0                                            if 2/c <= |v2 - v1|
 *   -(2 - |v2 - v1| c) / pi * int_0^{w pi} rho   if 1/c <= |v2 - v1| <= 2/c
 *   (2 - 3 |v2 - v1| c) / pi * int_0^{w pi} rho  if |v2 - v1| <= 1/c
 *
 * with w = min(omega1, omega2), v replaced by min(max(v, 1/c), 1 - 1/c) and
 * rho(l) = f_{a1 a2}(l) f_{b1 b2}(-l) + f_{a1 b2}(l) f_{b1 a2}(-l). The
 * frequency integral is adaptive Gauss-Kronrod to relative 1e-10; the real part
 * is returned.
 */
[[nodiscard]] double limit_kernel(const KernelSpec& spec);

}  // namespace specbreak
