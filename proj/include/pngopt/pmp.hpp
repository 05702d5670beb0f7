#pragma once

// Minimum-principle conditions for the periodic speed-trajectory problem:
// Hamiltonian, optimal input, co-state dynamics, the combined 4-state flow
// and the periodic boundary / transversality residuals.

#include <array>
#include <stdexcept>
#include <vector>

#include "pngopt/ode.hpp"
#include "pngopt/vehicle_model.hpp"

namespace pngopt {

struct Costate {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Cost weights: speed reward C (g/m) and jerk penalty R.
struct Weights {
  double speed_weight = 0.0;
  double jerk_weight = 0.0;
};

/// (x1, x2, lambda1, lambda2), in that order everywhere.
struct AugmentedState {
  double x1 = 0.0;
  double x2 = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  [[nodiscard]] constexpr State state() const noexcept { return {x1, x2}; }
  [[nodiscard]] constexpr Vec<4> to_array() const noexcept { return {x1, x2, lambda1, lambda2}; }
  [[nodiscard]] static constexpr AugmentedState from_array(const Vec<4>& a) noexcept {
    return {a[0], a[1], a[2], a[3]};
  }
};

struct BoundaryResiduals {
  double r_x1 = 0.0;
  double r_x2 = 0.0;
  double r_l1 = 0.0;
  double r_l2 = 0.0;
  double r_trans = 0.0; // H(T) - J
};

inline AugmentedState augmented_equilibrium(const Equilibrium& e) noexcept {
  return {e.v, e.force, e.lambda1, e.lambda2};
}

/// Minimizer of the Hamiltonian over u: u = -lambda2 / R.
[[nodiscard]] inline double optimal_input(double lambda2, double r) {
  if (!(r > 0)) throw std::domain_error("optimal_input: jerk weight R must be positive");
  return -lambda2 / r;
}

[[nodiscard]] inline double hamiltonian(const AugmentedState& a, double u, const Weights& w,
                                        const VehicleParams& p = {}, const BsfcParams& b = {}) {
  const double xdot1 = state_derivative(a.state(), u, p)[0];
  return fuel_rate(power(a.state()), b) - w.speed_weight * a.x1 +
         0.5 * w.jerk_weight * u * u + a.lambda1 * xdot1 + a.lambda2 * u;
}

/// (d lambda1/dt, d lambda2/dt) = -dH/dx.
[[nodiscard]] inline std::array<double, 2> costate_derivative(const AugmentedState& a,
                                                              const Weights& w,
                                                              const VehicleParams& p = {},
                                                              const BsfcParams& b = {}) {
  const FuelPartials f = fuel_partials(a.state(), b);
  return {-f.d1 + w.speed_weight + p.drag_factor() * a.x1 / p.mass * a.lambda1,
          -f.d2 - a.lambda1 / p.mass};
}

/// State and co-state dynamics with the optimal input substituted.
[[nodiscard]] inline Vec<4> pmp_flow(const AugmentedState& a, const Weights& w,
                                     const VehicleParams& p = {}, const BsfcParams& b = {}) {
  const double u = optimal_input(a.lambda2, w.jerk_weight);
  const auto xs = state_derivative(a.state(), u, p);
  const auto ls = costate_derivative(a, w, p, b);
  return {xs[0], xs[1], ls[0], ls[1]};
}

/// Periodicity gaps over the sampled period and H(T) minus the time-averaged cost.
[[nodiscard]] inline BoundaryResiduals boundary_residuals(const Trajectory<4>& traj,
                                                          const Weights& w,
                                                          const VehicleParams& p = {},
                                                          const BsfcParams& b = {}) {
  if (traj.size() < 3) throw std::domain_error("boundary_residuals: need at least 3 samples");
  const double period = traj.t.back() - traj.t.front();
  if (!(period > 0)) throw std::domain_error("boundary_residuals: empty time span");

  std::vector<double> running(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto a = AugmentedState::from_array(traj.rows[i]);
    const double u = optimal_input(a.lambda2, w.jerk_weight);
    running[i] = fuel_rate(power(a.state()), b) - w.speed_weight * a.x1 +
                 0.5 * w.jerk_weight * u * u;
  }
  const double cost = trapezoid(traj.t, running) / period;

  const auto first = AugmentedState::from_array(traj.front());
  const auto last = AugmentedState::from_array(traj.back());
  const double h_end =
      hamiltonian(last, optimal_input(last.lambda2, w.jerk_weight), w, p, b);
  return BoundaryResiduals{
      .r_x1 = last.x1 - first.x1,
      .r_x2 = last.x2 - first.x2,
      .r_l1 = last.lambda1 - first.lambda1,
      .r_l2 = last.lambda2 - first.lambda2,
      .r_trans = h_end - cost,
  };
}

/// Integrates the augmented flow from a0 over [0, t_end].
[[nodiscard]] inline Trajectory<4> integrate_pmp(const AugmentedState& a0, const Weights& w,
                                                 double t_end, std::size_t steps,
                                                 const VehicleParams& p = {},
                                                 const BsfcParams& b = {}) {
  return integrate_rk4<4>(
      [&](double, const Vec<4>& y) { return pmp_flow(AugmentedState::from_array(y), w, p, b); },
      a0.to_array(), t_end, steps);
}

} // namespace pngopt
