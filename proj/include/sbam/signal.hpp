#pragma once

// Small digital-filter toolbox: Butterworth low-pass design, zero-phase filtering and
// prominence-based peak picking. Conventions follow the usual scipy.signal semantics
// (cutoff normalized to Nyquist, odd-extension padding, steady-state initial conditions).

#include "sbam/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace sbam::signal {

struct Filter {
  std::vector<double> b;
  std::vector<double> a;  // a[0] == 1
};

namespace detail {

inline std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

}  // namespace detail

/// Low-pass Butterworth of the given order via the prewarped bilinear transform.
/// `cutoff` is normalized to the Nyquist frequency, 0 < cutoff < 1.
inline Filter butterworth_lowpass(int order, double cutoff) {
  if (order < 1) throw InputError("butterworth: order must be >= 1");
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw InputError("butterworth: cutoff must be in (0, 1)");
  const double k = std::tan(M_PI * cutoff / 2.0);
  const double k2 = k * k;
  std::vector<double> b{1.0}, a{1.0};
  for (int i = 1; i <= order / 2; ++i) {
    // analog section 1 / (s^2 + 2 zeta s + 1)
    const double zeta = std::sin(M_PI * (2.0 * i - 1.0) / (2.0 * order));
    const double a0 = 1.0 + 2.0 * zeta * k + k2;
    b = detail::poly_mul(b, {k2 / a0, 2.0 * k2 / a0, k2 / a0});
    a = detail::poly_mul(a, {1.0, (2.0 * k2 - 2.0) / a0, (1.0 - 2.0 * zeta * k + k2) / a0});
  }
  if (order % 2 == 1) {
    const double a0 = 1.0 + k;
    b = detail::poly_mul(b, {k / a0, k / a0});
    a = detail::poly_mul(a, {1.0, (k - 1.0) / a0});
  }
  return {b, a};
}

/// Direct form II transposed filter with initial state `zi`.
inline std::vector<double> lfilter(const Filter& f, std::span<const double> x,
                                   std::vector<double> zi) {
  const std::size_t order = f.a.size() - 1;
  zi.resize(order, 0.0);
  std::vector<double> y(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double xm = x[m];
    const double ym = f.b[0] * xm + (order > 0 ? zi[0] : 0.0);
    for (std::size_t i = 0; i + 1 < order; ++i) zi[i] = f.b[i + 1] * xm + zi[i + 1] - f.a[i + 1] * ym;
    if (order > 0) zi[order - 1] = f.b[order] * xm - f.a[order] * ym;
    y[m] = ym;
  }
  return y;
}

/// Steady-state initial conditions for a unit step input.
inline std::vector<double> lfilter_zi(const Filter& f) {
  const std::size_t n = f.a.size() - 1;
  if (n == 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) companion(0, static_cast<Eigen::Index>(j)) = -f.a[j + 1];
  for (std::size_t i = 1; i < n; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) - companion.transpose();
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = f.b[i + 1] - f.a[i + 1] * f.b[0];
  const Eigen::VectorXd zi = lhs.colPivHouseholderQr().solve(rhs);
  return {zi.data(), zi.data() + zi.size()};
}

/// Zero-phase forward-backward filtering with odd-extension padding.
inline std::vector<double> filtfilt(const Filter& f, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::size_t pad = 3 * std::max(f.a.size(), f.b.size());
  if (pad >= n) pad = n - 1;
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const std::vector<double> zi = lfilter_zi(f);
  auto scaled = [&](double s) {
    std::vector<double> z(zi);
    for (double& v : z) v *= s;
    return z;
  };
  std::vector<double> y = lfilter(f, ext, scaled(ext.front()));
  std::reverse(y.begin(), y.end());
  y = lfilter(f, y, scaled(y.front()));
  std::reverse(y.begin(), y.end());
  return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

/// Interior local maxima; flat tops report their (left-biased) midpoint.
inline std::vector<std::size_t> local_maxima(std::span<const double> x) {
  std::vector<std::size_t> peaks;
  const std::size_t n = x.size();
  if (n < 3) return peaks;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        peaks.push_back((i + ahead - 1) / 2);
        i = ahead;
        continue;
      }
    }
    ++i;
  }
  return peaks;
}

/// Height of a peak above the higher of the two lowest points reachable on either side
/// without climbing above the peak.
inline double prominence(std::span<const double> x, std::size_t peak) {
  const double h = x[peak];
  double left_min = h;
  for (std::size_t i = peak + 1; i-- > 0;) {
    if (x[i] > h) break;
    left_min = std::min(left_min, x[i]);
  }
  double right_min = h;
  for (std::size_t i = peak; i < x.size(); ++i) {
    if (x[i] > h) break;
    right_min = std::min(right_min, x[i]);
  }
  return h - std::max(left_min, right_min);
}

inline std::vector<std::size_t> find_peaks(std::span<const double> x, double min_prominence) {
  std::vector<std::size_t> out;
  for (std::size_t p : local_maxima(x))
    if (prominence(x, p) >= min_prominence) out.push_back(p);
  return out;
}

}  // namespace sbam::signal
