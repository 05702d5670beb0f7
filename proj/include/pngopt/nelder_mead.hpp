#pragma once

// Derivative-free Nelder-Mead simplex minimization.
//
// Uses dimension-adaptive coefficients (Gao & Han), which keep the method
// from stalling on the 10-15 dimensional Fourier problems. Deterministic:
// ties are broken by vertex index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pngopt {

struct NelderMeadOptions {
  std::size_t max_evaluations = 20000;
  double x_tol = 1e-6;  // simplex diameter, relative to max(1, |best|)
  double f_tol = 1e-10; // vertex value spread, relative to max(1, |f_best|)
  bool adaptive = true;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  std::vector<double> best_history; // best vertex value after each iteration
};

/// Minimizes f starting from x0 with per-coordinate initial simplex steps.
template <typename Objective>
NelderMeadResult nelder_mead(Objective&& f, const std::vector<double>& x0,
                             const std::vector<double>& steps, const NelderMeadOptions& opts = {}) {
  const std::size_t n = x0.size();
  if (n == 0 || steps.size() != n) throw std::invalid_argument("nelder_mead: dimension mismatch");

  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = opts.adaptive ? 1.0 + 2.0 / dn : 2.0;
  const double gamma = opts.adaptive ? 0.75 - 1.0 / (2.0 * dn) : 0.5;
  const double delta = opts.adaptive ? 1.0 - 1.0 / dn : 0.5;

  NelderMeadResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  vals[0] = eval(x0);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i + 1][i] += steps[i];
    vals[i + 1] = eval(pts[i + 1]);
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  const auto along = [&](std::vector<double>& out, double t, const std::vector<double>& worst) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (centroid[j] - worst[j]);
  };

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    // Convergence: simplex diameter relative to the best point, and value spread.
    double diam = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(pts[best][j]));
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) diam = std::max(diam, std::abs(pts[i][j] - pts[best][j]));
    }
    const double spread = vals[worst] - vals[best];
    if (diam <= opts.x_tol * std::max(1.0, scale) && spread <= opts.f_tol * std::max(1.0, std::abs(vals[best]))) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= opts.max_evaluations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / dn;
    }

    along(xr, alpha, pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      along(xe, alpha * beta, pts[worst]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      along(xc, outside ? alpha * gamma : -gamma, pts[worst]);
      const double fc = eval(xc);
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < n; ++j) {
            pts[i][j] = pts[best][j] + delta * (pts[i][j] - pts[best][j]);
          }
          vals[i] = eval(pts[i]);
        }
      }
    }
    ++res.iterations;
    res.best_history.push_back(*std::min_element(vals.begin(), vals.end()));
  }

  const auto it = std::min_element(vals.begin(), vals.end());
  res.x = pts[static_cast<std::size_t>(it - vals.begin())];
  res.f = *it;
  return res;
}

} // namespace pngopt
