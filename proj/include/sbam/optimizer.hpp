#pragma once

#include "sbam/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace sbam {

struct NelderMeadConfig {
  double tol_x = 1e-6;       // simplex size (max-norm distance to the best vertex)
  double tol_f = 1e-10;      // spread of function values over the simplex
  int max_iterations = 5000;
  double initial_step = 0.1; // used for every coordinate when `steps` is empty
  std::vector<double> steps;
  bool adaptive = true;      // dimension-dependent coefficients
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free simplex descent. With `adaptive` set the coefficients are
/// reflection 1, expansion 1 + 2/n, contraction 0.75 - 1/(2n) and shrink 1 - 1/n.
/// Non-finite function values are treated as +infinity.
template <class Objective>
NelderMeadResult nelder_mead(Objective&& objective, std::span<const double> x0, const NelderMeadConfig& cfg = {}) {
  const std::size_t n = x0.size();
  if (n == 0) throw InputError("nelder_mead: empty start point");
  if (!cfg.steps.empty() && cfg.steps.size() != n) throw InputError("nelder_mead: step vector has wrong size");

  const double dn = static_cast<double>(n);
  double alpha = 1.0, beta = 2.0, gamma = 0.5, delta = 0.5;
  if (cfg.adaptive && n >= 2) {
    beta = 1.0 + 2.0 / dn;
    gamma = 0.75 - 1.0 / (2.0 * dn);
    delta = 1.0 - 1.0 / dn;
  }

  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = objective(std::span<const double>(x));
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(x0.begin(), x0.end()));
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += cfg.steps.empty() ? cfg.initial_step : cfg.steps[i];
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  auto point = [&](std::vector<double>& out, double coef, const std::vector<double>& from) {
    // out = centroid + coef * (from - centroid)
    for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + coef * (from[k] - centroid[k]);
  };

  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> s2(n + 1);
      std::vector<double> f2(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        s2[i] = std::move(simplex[order[i]]);
        f2[i] = fv[order[i]];
      }
      simplex = std::move(s2);
      fv = std::move(f2);
    }

    double size = 0.0, spread = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(simplex[i][k] - simplex[0][k]));
      spread = std::max(spread, std::abs(fv[i] - fv[0]));
    }
    if (size <= cfg.tol_x || spread <= cfg.tol_f) {
      res.converged = true;
      break;
    }
    if (res.iterations >= cfg.max_iterations) break;
    ++res.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
    for (double& c : centroid) c /= dn;

    const std::vector<double>& worst = simplex[n];
    point(xr, -alpha, worst);
    const double fr = eval(xr);
    if (fr < fv[0]) {
      point(xe, beta, xr);
      const double fe = eval(xe);
      if (fe < fr) { simplex[n] = xe; fv[n] = fe; }
      else { simplex[n] = xr; fv[n] = fr; }
      continue;
    }
    if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
      continue;
    }
    if (fr < fv[n]) {
      point(xc, gamma, xr);  // outside contraction
      const double fc = eval(xc);
      if (fc <= fr) { simplex[n] = xc; fv[n] = fc; continue; }
    } else {
      point(xc, gamma, worst);  // inside contraction
      const double fc = eval(xc);
      if (fc < fv[n]) { simplex[n] = xc; fv[n] = fc; continue; }
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[0][k] + delta * (simplex[i][k] - simplex[0][k]);
      fv[i] = eval(simplex[i]);
    }
  }
  res.x = simplex[0];
  res.f = fv[0];
  return res;
}

}  // namespace sbam
