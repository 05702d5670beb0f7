#pragma once

// Direct optimization of periodic speed trajectories.
//
// The force rate is a truncated Fourier series with fundamental omega; one
// period T = 2 pi / omega of the vehicle dynamics is simulated from a free
// initial state and the time-averaged cost is minimized with Nelder-Mead.
// Periodicity and x2 >= 0 enter through quadratic penalties whose weight is
// raised in stages.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "pngopt/linear_analysis.hpp"
#include "pngopt/nelder_mead.hpp"
#include "pngopt/ode.hpp"
#include "pngopt/pmp.hpp"
#include "pngopt/vehicle_model.hpp"

namespace pngopt {

/// u(t) = sum_k a_k sin(k omega t) + b_k cos(k omega t), k = 1..K.
struct FourierInput {
  double omega = 0.1; // rad/s
  std::vector<double> a;
  std::vector<double> b;

  [[nodiscard]] std::size_t harmonics() const noexcept { return a.size(); }
  [[nodiscard]] double period() const noexcept { return 2.0 * std::numbers::pi / omega; }
};

struct DecisionVector {
  double x1_0 = 0.0; // m/s
  double x2_0 = 0.0; // N
  FourierInput input;
};

struct EvaluationResult {
  double j_total = 0.0;
  double fuel_term = 0.0;  // time-average fuel rate
  double speed_term = 0.0; // -C * time-average speed
  double jerk_term = 0.0;  // time-average R u^2 / 2
  double r_x1 = 0.0;
  double r_x2 = 0.0;
  double min_x2 = 0.0;
  double min_x1 = 0.0;
  Trajectory<2> trajectory;
  std::vector<double> u; // input on the trajectory grid
};

struct PenaltyStage {
  double penalty = 0.0;
  double merit = 0.0;
  double j_total = 0.0;
  std::size_t evaluations = 0;
  bool simplex_converged = false;
};

struct OptimizeOptions {
  std::vector<double> penalties{1e2, 1e3, 1e4, 1e5};
  std::size_t steps = 4096;
  NelderMeadOptions simplex{};
  double tol_x1 = 1e-3;     // m/s
  double tol_x2 = 1e-2;     // N
  double tol_min_x2 = 1e-3; // N
  // Force dips below -force_floor are out of domain: the cubic fuel model is
  // unbounded below for negative power, which no finite quadratic penalty holds.
  double force_floor = 1.0; // N
  // Upper bound on the fundamental. As T -> 0 periodicity holds trivially at
  // any state and the cost is unbounded below.
  double omega_max = 1.0; // rad/s
  // Fresh simplices at the final penalty until the merit stops improving by
  // more than restart_tol (relative). A collapsed simplex can stall early in
  // the flat frequency direction.
  std::size_t max_restarts = 4;
  double restart_tol = 1e-9;
};

struct OptimizationResult {
  DecisionVector decision;
  EvaluationResult eval;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  bool converged = false;
  std::vector<PenaltyStage> penalty_history;
  std::string message;
};

class EvaluationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void validate(const FourierInput& f) {
  if (!(f.omega > 0) || !std::isfinite(f.omega)) {
    throw std::invalid_argument("fourier input: omega must be positive");
  }
  if (f.a.size() != f.b.size() || f.a.empty()) {
    throw std::invalid_argument("fourier input: a and b need the same, non-zero length");
  }
}

namespace detail {
/// Series value given sin and cos of the fundamental phase, expanding the
/// higher harmonics by angle addition.
inline double fourier_series(const FourierInput& f, double s1, double c1) noexcept {
  double sk = s1;
  double ck = c1;
  double u = 0.0;
  const std::size_t n = std::min(f.a.size(), f.b.size());
  for (std::size_t k = 0; k < n; ++k) {
    u += f.a[k] * sk + f.b[k] * ck;
    const double s_next = sk * c1 + ck * s1;
    ck = ck * c1 - sk * s1;
    sk = s_next;
  }
  return u;
}
} // namespace detail

[[nodiscard]] inline double input_signal(const FourierInput& f, double t) noexcept {
  const double th = f.omega * t;
  return detail::fourier_series(f, std::sin(th), std::cos(th));
}

/// Simulates one period and computes the time-averaged cost breakdown.
/// Throws EvaluationError if the dynamics blow up.
[[nodiscard]] inline EvaluationResult evaluate(const DecisionVector& d, const Weights& w,
                                               const VehicleParams& p = {},
                                               const BsfcParams& b = {}, std::size_t steps = 4096) {
  if (steps < 16) throw std::invalid_argument("evaluate: steps must be >= 16");
  validate(d.input);
  const double period = d.input.period();

  // Every time RK4 asks for is a multiple of h/2, so the input is tabulated
  // there once. The fundamental phasor advances by rotation, resynchronized
  // with sin/cos every 64 entries.
  const double half = 0.5 * period / static_cast<double>(steps);
  const std::size_t slots = 2 * steps + 1;
  std::vector<double> u_tab(slots);
  {
    const double rs = std::sin(d.input.omega * half);
    const double rc = std::cos(d.input.omega * half);
    double sn = 0.0;
    double cs = 1.0;
    for (std::size_t j = 0; j < slots; ++j) {
      if (j % 64 == 0) {
        const double th = d.input.omega * half * static_cast<double>(j);
        sn = std::sin(th);
        cs = std::cos(th);
      }
      u_tab[j] = detail::fourier_series(d.input, sn, cs);
      const double sn_next = sn * rc + cs * rs;
      cs = cs * rc - sn * rs;
      sn = sn_next;
    }
  }
  const auto u_at = [&](double t) {
    const double pos = t / half;
    const double j = std::nearbyint(pos);
    if (j >= 0 && j < static_cast<double>(slots) && std::abs(pos - j) < 1e-7) {
      return u_tab[static_cast<std::size_t>(j)];
    }
    return input_signal(d.input, t);
  };

  EvaluationResult r;
  try {
    r.trajectory = integrate_rk4<2>(
        [&](double t, const Vec<2>& y) { return state_derivative({y[0], y[1]}, u_at(t), p); },
        Vec<2>{d.x1_0, d.x2_0}, period, steps);
  } catch (const IntegrationError& e) {
    throw EvaluationError(std::string("evaluate: ") + e.what());
  }

  const auto& tr = r.trajectory;
  const std::size_t n = tr.size();
  std::vector<double> fuel(n), speed(n), jerk(n);
  r.u.resize(n);
  r.min_x1 = std::numeric_limits<double>::infinity();
  r.min_x2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& y = tr.rows[i];
    r.u[i] = u_tab[2 * i];
    fuel[i] = fuel_rate(y[0] * y[1], b);
    speed[i] = y[0];
    jerk[i] = 0.5 * w.jerk_weight * r.u[i] * r.u[i];
    r.min_x1 = std::min(r.min_x1, y[0]);
    r.min_x2 = std::min(r.min_x2, y[1]);
  }
  r.fuel_term = trapezoid(tr.t, fuel) / period;
  r.speed_term = -w.speed_weight * trapezoid(tr.t, speed) / period;
  r.jerk_term = trapezoid(tr.t, jerk) / period;
  r.j_total = r.fuel_term + r.speed_term + r.jerk_term;
  r.r_x1 = tr.back()[0] - tr.front()[0];
  r.r_x2 = tr.back()[1] - tr.front()[1];
  if (!std::isfinite(r.j_total)) throw EvaluationError("evaluate: non-finite cost");
  return r;
}

namespace detail {

inline std::vector<double> pack(const DecisionVector& d) {
  std::vector<double> x{d.x1_0, d.x2_0, d.input.omega};
  x.insert(x.end(), d.input.a.begin(), d.input.a.end());
  x.insert(x.end(), d.input.b.begin(), d.input.b.end());
  return x;
}

inline DecisionVector unpack(const std::vector<double>& x, std::size_t k) {
  DecisionVector d;
  d.x1_0 = x[0];
  d.x2_0 = x[1];
  d.input.omega = x[2];
  d.input.a.assign(x.begin() + 3, x.begin() + 3 + static_cast<std::ptrdiff_t>(k));
  d.input.b.assign(x.begin() + 3 + static_cast<std::ptrdiff_t>(k),
                   x.begin() + 3 + 2 * static_cast<std::ptrdiff_t>(k));
  return d;
}

inline std::vector<double> simplex_steps(const std::vector<double>& x) {
  std::vector<double> s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double floor = i == 0 ? 0.1 : i == 1 ? 1.0 : i == 2 ? 0.005 : 0.5;
    s[i] = std::max(0.05 * std::abs(x[i]), floor);
  }
  return s;
}

} // namespace detail

/// J + rho (r_x1^2 + r_x2^2) + rho max(0, -min x2)^2.
[[nodiscard]] inline double merit(const EvaluationResult& e, double rho) noexcept {
  const double neg = std::max(0.0, -e.min_x2);
  return e.j_total + rho * (e.r_x1 * e.r_x1 + e.r_x2 * e.r_x2) + rho * neg * neg;
}

[[nodiscard]] inline bool constraints_met(const EvaluationResult& e, const OptimizeOptions& o) noexcept {
  return std::abs(e.r_x1) < o.tol_x1 && std::abs(e.r_x2) < o.tol_x2 && e.min_x2 > -o.tol_min_x2;
}

/// Local penalty-continuation minimization from d0.
[[nodiscard]] inline OptimizationResult optimize(const DecisionVector& d0, const Weights& w,
                                                 const VehicleParams& p = {},
                                                 const BsfcParams& b = {},
                                                 const OptimizeOptions& opts = {}) {
  validate(d0.input);
  if (opts.penalties.empty()) throw std::invalid_argument("optimize: empty penalty schedule");
  const std::size_t k = d0.input.harmonics();
  {
    const EvaluationResult e0 = evaluate(d0, w, p, b, opts.steps);
    if (!std::isfinite(merit(e0, opts.penalties.front()))) {
      throw std::domain_error("optimize: initial decision has non-finite cost");
    }
  }

  // Out-of-domain decisions (omega outside (0, omega_max], non-positive speed
  // anywhere, force below the floor, blow-up) score +infinity.
  const auto objective = [&](double rho) {
    return [&, rho](const std::vector<double>& x) {
      const DecisionVector d = detail::unpack(x, k);
      if (!(d.input.omega > 0) || d.input.omega > opts.omega_max || !(d.x1_0 > 0)) return std::numeric_limits<double>::infinity();
      try {
        const EvaluationResult e = evaluate(d, w, p, b, opts.steps);
        if (!(e.min_x1 > 0) || e.min_x2 < -opts.force_floor) {
          return std::numeric_limits<double>::infinity();
        }
        return merit(e, rho);
      } catch (const EvaluationError&) {
        return std::numeric_limits<double>::infinity();
      }
    };
  };

  OptimizationResult res;
  std::vector<double> x = detail::pack(d0);
  bool last_converged = false;
  for (double rho : opts.penalties) {
    const NelderMeadResult nm =
        nelder_mead(objective(rho), x, detail::simplex_steps(x), opts.simplex);
    x = nm.x;
    res.iterations += nm.iterations;
    last_converged = nm.converged;
    const EvaluationResult e = evaluate(detail::unpack(x, k), w, p, b, opts.steps);
    res.penalty_history.push_back({rho, nm.f, e.j_total, nm.evaluations, nm.converged});
  }

  const double rho_final = opts.penalties.back();
  PenaltyStage& last = res.penalty_history.back();
  while (res.restarts < opts.max_restarts) {
    const NelderMeadResult nm =
        nelder_mead(objective(rho_final), x, detail::simplex_steps(x), opts.simplex);
    ++res.restarts;
    res.iterations += nm.iterations;
    last.evaluations += nm.evaluations;
    const double gain = last.merit - nm.f;
    if (nm.f < last.merit) {
      x = nm.x;
      last.merit = nm.f;
      last.j_total = evaluate(detail::unpack(x, k), w, p, b, opts.steps).j_total;
    }
    last_converged = nm.converged;
    last.simplex_converged = nm.converged;
    if (gain <= opts.restart_tol * std::max(1.0, std::abs(last.merit))) break;
  }

  res.decision = detail::unpack(x, k);
  res.eval = evaluate(res.decision, w, p, b, opts.steps);
  const bool feasible = constraints_met(res.eval, opts);
  res.converged = last_converged && feasible;
  if (!feasible) {
    res.message = "periodicity or force constraint not met";
  } else if (!last_converged) {
    res.message = "simplex iteration budget exhausted";
  } else {
    res.message = "converged";
  }
  return res;
}

/// Single-cosine starting point from the linear analysis: the cruise state at
/// v, the slower linearized oscillation frequency (0.1 rad/s when the
/// dynamics at (v, R) are not oscillatory) and an amplitude whose force swing
/// just touches zero.
[[nodiscard]] inline DecisionVector linear_seed(double v, double r, const VehicleParams& p = {},
                                                const BsfcParams& b = {}) {
  const Equilibrium eq = equilibrium_for_speed(v, p, b);
  double omega = 0.1;
  const LocusPoint pt = locus_point(v, r, p, b);
  if (pt.mode == ModeClass::Oscillatory) omega = pair_frequencies(pt.eigenvalues)[0];
  return DecisionVector{v, eq.force, FourierInput{omega, {0.0}, {omega * eq.force}}};
}

/// Appends a zero harmonic to a decision.
[[nodiscard]] inline DecisionVector extend_harmonics(const DecisionVector& d) {
  DecisionVector out = d;
  out.input.a.push_back(0.0);
  out.input.b.push_back(0.0);
  return out;
}

/// Re-optimizes with K = 2..k_target harmonics, each stage seeded with the
/// previous optimum. The returned sequence starts with the seed and stops at
/// the first stage that fails to converge (that stage is included).
[[nodiscard]] inline std::vector<OptimizationResult>
continuation(const OptimizationResult& seed, std::size_t k_target, const Weights& w,
             const VehicleParams& p = {}, const BsfcParams& b = {},
             const OptimizeOptions& opts = {}) {
  if (!seed.converged) throw std::invalid_argument("continuation: seed did not converge");
  std::vector<OptimizationResult> out{seed};
  for (std::size_t k = seed.decision.input.harmonics() + 1; k <= k_target; ++k) {
    OptimizationResult next = optimize(extend_harmonics(out.back().decision), w, p, b, opts);
    const bool ok = next.converged;
    out.push_back(std::move(next));
    if (!ok) break;
  }
  return out;
}

} // namespace pngopt
