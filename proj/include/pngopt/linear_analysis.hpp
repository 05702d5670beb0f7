#pragma once

// Linearization of the optimality system around a cruise equilibrium.
//
// The 4x4 system matrix has Hamiltonian structure, so its characteristic
// polynomial is even: s^4 + b s^2 + c. All four roots purely imaginary means
// the linearized optimal motion oscillates, i.e. pulse-and-glide is locally
// optimal; any root with positive real part rules it out. Sweeping the jerk
// weight R traces a root locus with a critical R where the two imaginary
// pairs collide and split off the axis.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pngopt/vehicle_model.hpp"

namespace pngopt {

using Complex = std::complex<double>;

/// Row-major 4x4 matrix in (x1, x2, lambda1, lambda2) ordering.
struct Jacobian4 {
  std::array<std::array<double, 4>, 4> m{};

  [[nodiscard]] constexpr double& operator()(int i, int j) noexcept { return m[i][j]; }
  [[nodiscard]] constexpr double operator()(int i, int j) const noexcept { return m[i][j]; }
  [[nodiscard]] constexpr double trace() const noexcept {
    return m[0][0] + m[1][1] + m[2][2] + m[3][3];
  }
};

/// s^4 + b s^2 + c.
struct EvenQuartic {
  double b = 0.0;
  double c = 0.0;

  [[nodiscard]] Complex operator()(Complex s) const noexcept {
    const Complex s2 = s * s;
    return s2 * s2 + b * s2 + c;
  }
};

/// Four eigenvalues, stored as {s1, -s1, s2, -s2}.
using EigenSet = std::array<Complex, 4>;

enum class ModeClass { Oscillatory, Unstable, Degenerate };

inline const char* to_string(ModeClass m) noexcept {
  switch (m) {
  case ModeClass::Oscillatory: return "Oscillatory";
  case ModeClass::Unstable: return "Unstable";
  case ModeClass::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

struct LocusPoint {
  double r_value = 0.0;
  EigenSet eigenvalues{};
  ModeClass mode = ModeClass::Degenerate;
};

struct CriticalResult {
  double v = 0.0;
  double r_crit = 0.0;
  double omega_at_crit = 0.0; // rad/s
  double period_at_crit = 0.0; // s
};

/// The characteristic polynomial had non-negligible odd coefficients.
class StructuralError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No oscillatory region exists in the searched jerk-weight bracket.
class NotPngCapable : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A search interval does not bracket the property being located.
class BracketError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[nodiscard]] inline Jacobian4 jacobian(double v, double r, const VehicleParams& p = {},
                                        const BsfcParams& b = {}) {
  if (!(v > 0)) throw std::domain_error("jacobian: speed must be positive");
  if (!(r > 0)) throw std::domain_error("jacobian: jerk weight R must be positive");
  const Equilibrium eq = equilibrium_for_speed(v, p, b);
  const FuelPartials f = fuel_partials({eq.v, eq.force}, b);
  const double k = p.drag_factor();
  const double a = k * v / p.mass;

  Jacobian4 j;
  j(0, 0) = -a;
  j(0, 1) = 1.0 / p.mass;
  j(1, 3) = -1.0 / r;
  j(2, 0) = -f.h11 + eq.lambda1 * k / p.mass;
  j(2, 1) = -f.h12;
  j(2, 2) = a;
  j(3, 0) = -f.h12;
  j(3, 1) = -f.h22;
  j(3, 2) = -1.0 / p.mass;
  return j;
}

/// Coefficients {1, c1, c2, c3, c4} of det(sI - A) = s^4 + c1 s^3 + c2 s^2 + c3 s + c4,
/// by the Faddeev-LeVerrier recursion.
[[nodiscard]] inline std::array<double, 5> faddeev_leverrier(const Jacobian4& a) {
  using Mat = std::array<std::array<double, 4>, 4>;
  std::array<double, 5> coef{};
  coef[0] = 1.0;
  Mat mk{}; // M_0 = 0
  for (int k = 1; k <= 4; ++k) {
    // M_k = A M_{k-1} + c_{k-1} I
    Mat next{};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        double acc = 0.0;
        for (int l = 0; l < 4; ++l) acc += a(i, l) * mk[l][j];
        next[i][j] = acc + (i == j ? coef[k - 1] : 0.0);
      }
    }
    mk = next;
    // c_k = -tr(A M_k) / k
    double tr = 0.0;
    for (int i = 0; i < 4; ++i) {
      for (int l = 0; l < 4; ++l) tr += a(i, l) * mk[l][i];
    }
    coef[k] = -tr / k;
  }
  return coef;
}

/// Even characteristic polynomial of a Hamiltonian-structured Jacobian.
/// Throws StructuralError when the odd coefficients do not vanish.
[[nodiscard]] inline EvenQuartic char_poly(const Jacobian4& j, double odd_tol = 1e-9) {
  const auto coef = faddeev_leverrier(j);
  double scale = 0.0;
  for (double c : coef) scale = std::max(scale, std::abs(c));
  if (std::abs(coef[1]) > odd_tol * scale || std::abs(coef[3]) > odd_tol * scale) {
    throw StructuralError("characteristic polynomial has non-vanishing odd coefficients");
  }
  return {coef[2], coef[4]};
}

/// The characteristic polynomial exactly as the closed-form expression is
/// usually printed for this model. Kept only as a cross-check: it flips the
/// sign of the drag term in b and omits the mixed-partial term in c.
[[nodiscard]] inline EvenQuartic char_poly_printed(double v, double r, const VehicleParams& p = {},
                                                   const BsfcParams& b = {}) {
  if (!(v > 0) || !(r > 0)) throw std::domain_error("char_poly_printed: v and R must be positive");
  const Equilibrium eq = equilibrium_for_speed(v, p, b);
  const FuelPartials f = fuel_partials({eq.v, eq.force}, b);
  const double kv = p.drag_factor() * v;
  const double m2 = p.mass * p.mass;
  return {kv * kv / m2 - f.h22 / r,
          (f.h11 + kv * kv * f.h22 + f.d2 * p.drag_factor()) / (r * m2)};
}

/// Roots of z^2 + b z + c, cancellation-free.
[[nodiscard]] inline std::array<Complex, 2> quadratic_roots(double b, double c) {
  const double disc = b * b - 4.0 * c;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    if (q == 0.0) return {Complex{0.0}, Complex{0.0}};
    return {Complex{q}, Complex{c / q}};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {Complex{-0.5 * b, im}, Complex{-0.5 * b, -im}};
}

/// Closed-form roots via z = s^2.
[[nodiscard]] inline EigenSet eigenvalues(const EvenQuartic& q) {
  const auto z = quadratic_roots(q.b, q.c);
  const Complex s1 = std::sqrt(z[0]);
  const Complex s2 = std::sqrt(z[1]);
  return {s1, -s1, s2, -s2};
}

/// General quartic roots (Aberth-Ehrlich iteration in extended precision
/// followed by a Newton polish). coef = {1, c1, c2, c3, c4}, leading first.
[[nodiscard]] inline EigenSet quartic_roots(const std::array<double, 5>& coef) {
  using CL = std::complex<long double>;
  if (coef[0] == 0.0) throw std::domain_error("quartic_roots: leading coefficient is zero");
  std::array<long double, 5> a{};
  for (int i = 0; i < 5; ++i) a[i] = static_cast<long double>(coef[i]) / coef[0];

  const auto eval = [&](CL x, CL& dp) {
    CL p = a[0];
    dp = 0;
    for (int i = 1; i < 5; ++i) {
      dp = dp * x + p;
      p = p * x + a[i];
    }
    return p;
  };

  // Fujiwara-style bound for the initial circle.
  long double radius = 0;
  for (int i = 1; i < 5; ++i) {
    radius = std::max(radius, std::pow(std::abs(a[i]), 1.0L / static_cast<long double>(i)));
  }
  if (radius == 0) return {};

  std::array<CL, 4> z;
  for (int i = 0; i < 4; ++i) {
    const long double ang = 2.0L * std::numbers::pi_v<long double> * i / 4 + 0.4L;
    z[i] = std::polar(radius, ang);
  }
  for (int iter = 0; iter < 500; ++iter) {
    long double max_step = 0;
    for (int i = 0; i < 4; ++i) {
      CL dp;
      const CL p = eval(z[i], dp);
      if (p == CL(0)) continue;
      const CL ratio = p / dp;
      CL sum = 0;
      for (int j = 0; j < 4; ++j) {
        if (j != i) sum += CL(1) / (z[i] - z[j]);
      }
      const CL step = ratio / (CL(1) - ratio * sum);
      z[i] -= step;
      max_step = std::max(max_step, std::abs(step) / std::max<long double>(1e-300L, std::abs(z[i])));
    }
    if (max_step < 1e-30L) break;
  }
  EigenSet out;
  for (int i = 0; i < 4; ++i) {
    CL dp;
    const CL p = eval(z[i], dp);
    if (std::abs(dp) > 0) z[i] -= p / dp;
    out[i] = Complex(static_cast<double>(z[i].real()), static_cast<double>(z[i].imag()));
  }
  return out;
}

/// Oscillatory iff every root is on the imaginary axis and away from zero;
/// Unstable iff some root has positive real part; Degenerate otherwise.
/// The real-part tolerance is scale_tol * max(1, max|s|).
[[nodiscard]] inline ModeClass classify(const EigenSet& e, double scale_tol = 1e-7) {
  double max_abs = 0.0;
  for (const auto& s : e) max_abs = std::max(max_abs, std::abs(s));
  const double re_tol = scale_tol * std::max(1.0, max_abs);
  bool on_axis = true;
  bool nonzero = true;
  for (const auto& s : e) {
    if (s.real() > re_tol) return ModeClass::Unstable;
    if (std::abs(s.real()) >= re_tol) on_axis = false;
    if (std::abs(s) <= scale_tol) nonzero = false;
  }
  return (on_axis && nonzero) ? ModeClass::Oscillatory : ModeClass::Degenerate;
}

/// Distinct oscillation frequencies |Im s| of the two root pairs, ascending.
[[nodiscard]] inline std::array<double, 2> pair_frequencies(const EigenSet& e) {
  std::array<double, 2> w{std::abs(e[0].imag()), std::abs(e[2].imag())};
  std::sort(w.begin(), w.end());
  return w;
}

[[nodiscard]] inline LocusPoint locus_point(double v, double r, const VehicleParams& p = {},
                                            const BsfcParams& b = {}) {
  const EigenSet e = eigenvalues(char_poly(jacobian(v, r, p, b)));
  return {r, e, classify(e)};
}

/// n logarithmically spaced values from lo to hi inclusive.
[[nodiscard]] inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0) || !(hi > lo) || n < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi, n >= 2");
  std::vector<double> g(n);
  const double l0 = std::log(lo);
  const double step = (std::log(hi) - l0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(l0 + step * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

[[nodiscard]] inline std::vector<LocusPoint> root_locus(double v, const std::vector<double>& r_grid,
                                                        const VehicleParams& p = {},
                                                        const BsfcParams& b = {}) {
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0) || (i > 0 && r_grid[i] < r_grid[i - 1])) {
      throw std::invalid_argument("root_locus: R grid must be positive and ascending");
    }
  }
  std::vector<LocusPoint> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) out.push_back(locus_point(v, r, p, b));
  return out;
}

/// Number of changes between Oscillatory and non-Oscillatory along the locus.
/// A well-behaved sweep below the critical speed has exactly one.
[[nodiscard]] inline std::size_t oscillatory_transitions(const std::vector<LocusPoint>& locus) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < locus.size(); ++i) {
    const bool a = locus[i - 1].mode == ModeClass::Oscillatory;
    const bool c = locus[i].mode == ModeClass::Oscillatory;
    if (a != c) ++n;
  }
  return n;
}

[[nodiscard]] inline bool is_oscillatory(double v, double r, const VehicleParams& p,
                                         const BsfcParams& b) {
  return locus_point(v, r, p, b).mode == ModeClass::Oscillatory;
}

/// Largest jerk weight at which the linearized dynamics at speed v are still
/// oscillatory, found by bisection in log R. The frequency reported is that of
/// the coalescing imaginary pair, sqrt(b/2).
[[nodiscard]] inline CriticalResult find_r_crit(double v, const VehicleParams& p = {},
                                                const BsfcParams& b = {}, double r_lo = 1e-8,
                                                double r_hi = 1e2, double tol_rel = 1e-6) {
  if (!(r_lo > 0) || !(r_hi > r_lo)) throw std::invalid_argument("find_r_crit: bad R bracket");
  if (!is_oscillatory(v, r_lo, p, b) || is_oscillatory(v, r_hi, p, b)) {
    throw NotPngCapable("not PnG-capable at this speed (v = " + std::to_string(v) + " m/s)");
  }
  double lo = r_lo;
  double hi = r_hi;
  for (int i = 0; i < 200 && hi / lo - 1.0 > tol_rel; ++i) {
    const double mid = std::sqrt(lo * hi);
    (is_oscillatory(v, mid, p, b) ? lo : hi) = mid;
  }
  // Polish onto the zero of the discriminant b^2 - 4c, which is continuous in R
  // and changes sign inside [lo, hi].
  const auto disc = [&](double r) {
    const EvenQuartic q = char_poly(jacobian(v, r, p, b));
    return q.b * q.b - 4.0 * q.c;
  };
  double dlo = disc(lo);
  if (dlo >= 0.0 && disc(hi) < 0.0) {
    for (int i = 0; i < 100 && hi / lo - 1.0 > 1e-15; ++i) {
      const double mid = std::sqrt(lo * hi);
      const double dm = disc(mid);
      if (dm >= 0.0) {
        lo = mid;
        dlo = dm;
      } else {
        hi = mid;
      }
    }
  }
  const EvenQuartic q = char_poly(jacobian(v, lo, p, b));
  const double omega = std::sqrt(std::max(0.0, q.b) / 2.0);
  return {v, lo, omega, 2.0 * std::numbers::pi / omega};
}

/// Whether any jerk weight in the default bracket gives oscillatory dynamics.
[[nodiscard]] inline bool png_capable(double v, const VehicleParams& p = {},
                                      const BsfcParams& b = {}, double r_lo = 1e-8) {
  return is_oscillatory(v, r_lo, p, b);
}

/// Speed at which equilibrium engine power reaches 2 p0 / 3, where the fuel
/// map turns from concave to convex.
[[nodiscard]] inline double concavity_speed(const VehicleParams& p = {}, const BsfcParams& b = {}) {
  const double target = 2.0 * b.p0 / 3.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi * cruise_force(hi, p) < target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * cruise_force(mid, p) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Speed above which no jerk weight gives oscillatory dynamics.
[[nodiscard]] inline double find_v_crit(const VehicleParams& p = {}, const BsfcParams& b = {},
                                        double v_lo = 2.0, double v_hi = 40.0, double tol = 1e-3) {
  if (!png_capable(v_lo, p, b) || png_capable(v_hi, p, b)) {
    throw BracketError("find_v_crit: PnG capability does not change over [" +
                       std::to_string(v_lo) + ", " + std::to_string(v_hi) + "] m/s");
  }
  double lo = v_lo;
  double hi = v_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (png_capable(mid, p, b) ? lo : hi) = mid;
  }
  const double v = 0.5 * (lo + hi);
  if (std::abs(v - concavity_speed(p, b)) > 0.5) {
    throw BracketError("find_v_crit: result disagrees with the fuel-map concavity speed");
  }
  return v;
}

struct SweepEntry {
  double v = 0.0;
  std::optional<CriticalResult> result; // empty marks a gap
  std::string error;
};

[[nodiscard]] inline std::vector<SweepEntry> rcrit_sweep(const std::vector<double>& v_grid,
                                                         const VehicleParams& p = {},
                                                         const BsfcParams& b = {}) {
  std::vector<SweepEntry> out;
  out.reserve(v_grid.size());
  for (double v : v_grid) {
    SweepEntry e{v, std::nullopt, {}};
    try {
      e.result = find_r_crit(v, p, b);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

} // namespace pngopt
