#pragma once

// Longitudinal vehicle dynamics with a quadratic BSFC fuel model.
//
// States are velocity x1 (m/s) and propulsive force x2 (N); the input is the
// force rate u = dx2/dt (N/s). Engine power is P = x1 * x2 and the fuel rate is
// P * bsfc(P), with bsfc quadratic around its minimum at p0.

#include <array>
#include <stdexcept>

namespace pngopt {

/// Physical vehicle constants. Defaults describe a mid-size minivan.
struct VehicleParams {
  double mass = 1605.0;            // kg
  double air_density = 1.2;        // kg/m^3
  double frontal_area = 2.0;       // m^2
  double drag_coeff = 0.33;        // -
  double rolling_friction = 0.009; // -
  double gravity = 9.81;           // m/s^2

  /// rho * Cd * Af, the quantity that recurs in every drag expression.
  [[nodiscard]] constexpr double drag_factor() const noexcept {
    return air_density * drag_coeff * frontal_area;
  }
  [[nodiscard]] constexpr double rolling_force() const noexcept {
    return rolling_friction * mass * gravity;
  }
};

/// Quadratic brake-specific fuel consumption fit, bsfc(P) = beta0 + gamma/2 (P - p0)^2.
/// beta0 is in g/J, so fuel rates come out in g/s.
struct BsfcParams {
  double beta0 = 6.5e-5;  // g/J
  double gamma = 1.1e-13; // g/(J W^2)
  double p0 = 30000.0;    // W
};

/// Validates strict positivity of all parameters; throws std::invalid_argument.
inline void validate(const VehicleParams& p) {
  if (!(p.mass > 0 && p.air_density > 0 && p.frontal_area > 0 && p.drag_coeff > 0 &&
        p.rolling_friction > 0 && p.gravity > 0)) {
    throw std::invalid_argument("vehicle parameters must be strictly positive");
  }
}

inline void validate(const BsfcParams& b) {
  if (!(b.beta0 > 0 && b.gamma > 0 && b.p0 > 0)) {
    throw std::invalid_argument("bsfc parameters must be strictly positive");
  }
}

/// Vehicle state. The model is meaningful for x1 > 0 only; nothing clamps it.
struct State {
  double x1 = 0.0; // velocity, m/s
  double x2 = 0.0; // propulsive force, N
};

/// First and second partial derivatives of the fuel rate with respect to (x1, x2).
struct FuelPartials {
  double d1 = 0.0;
  double d2 = 0.0;
  double h11 = 0.0;
  double h12 = 0.0;
  double h22 = 0.0;
};

/// Steady cruise point of the optimality system together with the speed weight
/// C that makes it stationary.
struct Equilibrium {
  double v = 0.0;        // m/s
  double force = 0.0;    // N
  double lambda1 = 0.0;
  double lambda2 = 0.0;  // always exactly zero
  double weight_c = 0.0; // g/m
};

[[nodiscard]] constexpr double power(const State& s) noexcept { return s.x1 * s.x2; }

[[nodiscard]] constexpr double bsfc(double p, const BsfcParams& b = {}) noexcept {
  const double dp = p - b.p0;
  return b.beta0 + 0.5 * b.gamma * dp * dp;
}

[[nodiscard]] constexpr double fuel_rate(double p, const BsfcParams& b = {}) noexcept {
  return p * bsfc(p, b);
}

/// d(fuel_rate)/dP.
[[nodiscard]] constexpr double fuel_rate_dp(double p, const BsfcParams& b = {}) noexcept {
  const double dp = p - b.p0;
  return b.beta0 + 0.5 * b.gamma * dp * dp + b.gamma * p * dp;
}

/// d^2(fuel_rate)/dP^2 = gamma (3P - 2 p0); negative (concave) below 2 p0 / 3.
[[nodiscard]] constexpr double fuel_rate_dp2(double p, const BsfcParams& b = {}) noexcept {
  return b.gamma * (3.0 * p - 2.0 * b.p0);
}

[[nodiscard]] constexpr FuelPartials fuel_partials(const State& s,
                                                   const BsfcParams& b = {}) noexcept {
  const double p = power(s);
  const double g1 = fuel_rate_dp(p, b);
  const double g2 = fuel_rate_dp2(p, b);
  return FuelPartials{
      .d1 = s.x2 * g1,
      .d2 = s.x1 * g1,
      .h11 = s.x2 * s.x2 * g2,
      .h12 = g1 + p * g2,
      .h22 = s.x1 * s.x1 * g2,
  };
}

/// Time derivative (dx1/dt, dx2/dt) under force rate u.
[[nodiscard]] constexpr std::array<double, 2> state_derivative(const State& s, double u,
                                                               const VehicleParams& p = {}) noexcept {
  const double resist = 0.5 * p.drag_factor() * s.x1 * s.x1 + p.rolling_force();
  return {(s.x2 - resist) / p.mass, u};
}

/// Force needed to hold speed v on flat ground.
[[nodiscard]] constexpr double cruise_force(double v, const VehicleParams& p = {}) noexcept {
  return 0.5 * p.drag_factor() * v * v + p.rolling_force();
}

/// Back-solves the equilibrium of the optimality system at nominal speed v,
/// including the speed weight C that places the optimum there.
[[nodiscard]] inline Equilibrium equilibrium_for_speed(double v, const VehicleParams& p = {},
                                                       const BsfcParams& b = {}) {
  if (!(v > 0)) throw std::domain_error("equilibrium_for_speed: speed must be positive");
  const State s{v, cruise_force(v, p)};
  const FuelPartials f = fuel_partials(s, b);
  return Equilibrium{
      .v = v,
      .force = s.x2,
      .lambda1 = -p.mass * f.d2,
      .lambda2 = 0.0,
      .weight_c = f.d1 + f.d2 * p.drag_factor() * v,
  };
}

/// Time-averaged cost of cruising at constant speed v with speed weight c.
[[nodiscard]] inline double steady_cost(double v, double c, const VehicleParams& p = {},
                                        const BsfcParams& b = {}) {
  if (!(v > 0)) throw std::domain_error("steady_cost: speed must be positive");
  return fuel_rate(v * cruise_force(v, p), b) - c * v;
}

} // namespace pngopt
