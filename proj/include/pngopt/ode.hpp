#pragma once

// Fixed-step classical Runge-Kutta integration on a uniform time grid.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pngopt {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Samples of an N-component solution on a uniform grid, both endpoints included.
template <std::size_t N>
struct Trajectory {
  std::vector<double> t;
  std::vector<Vec<N>> rows;

  [[nodiscard]] std::size_t size() const noexcept { return t.size(); }
  [[nodiscard]] const Vec<N>& front() const { return rows.front(); }
  [[nodiscard]] const Vec<N>& back() const { return rows.back(); }
};

/// Thrown when the integrated solution stops being finite.
class IntegrationError : public std::runtime_error {
public:
  explicit IntegrationError(double time)
      : std::runtime_error("non-finite state encountered at t = " + std::to_string(time)),
        time_(time) {}
  [[nodiscard]] double time() const noexcept { return time_; }

private:
  double time_;
};

namespace detail {
template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, const Vec<N>& k) {
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
  return out;
}
} // namespace detail

/// Integrates dy/dt = flow(t, y) from t = 0 to t_end with `steps` RK4 steps.
/// The last grid time is exactly t_end.
template <std::size_t N, typename Flow>
Trajectory<N> integrate_rk4(Flow&& flow, const Vec<N>& y0, double t_end, std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("integrate_rk4: steps must be >= 1");
  if (!(t_end > 0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("integrate_rk4: t_end must be positive and finite");
  }
  const double h = t_end / static_cast<double>(steps);

  Trajectory<N> out;
  out.t.reserve(steps + 1);
  out.rows.reserve(steps + 1);
  out.t.push_back(0.0);
  out.rows.push_back(y0);

  Vec<N> y = y0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * h;
    const Vec<N> k1 = flow(t, y);
    const Vec<N> k2 = flow(t + 0.5 * h, detail::axpy(y, 0.5 * h, k1));
    const Vec<N> k3 = flow(t + 0.5 * h, detail::axpy(y, 0.5 * h, k2));
    const Vec<N> k4 = flow(t + h, detail::axpy(y, h, k3));
    for (std::size_t j = 0; j < N; ++j) {
      y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    const double t_next = (i + 1 == steps) ? t_end : static_cast<double>(i + 1) * h;
    for (double c : y) {
      if (!std::isfinite(c)) throw IntegrationError(t_next);
    }
    out.t.push_back(t_next);
    out.rows.push_back(y);
  }
  return out;
}

/// Composite trapezoid rule over paired samples.
inline double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  if (t.size() != f.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return acc;
}

} // namespace pngopt
