#pragma once

// CSV and JSON serialization of analysis and optimization results.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pngopt/linear_analysis.hpp"
#include "pngopt/trajectory_opt.hpp"

namespace pngopt {

inline constexpr const char* kLocusCsvHeader = "R,re1,im1,re2,im2,re3,im3,re4,im4,class";
inline constexpr const char* kSweepCsvHeader = "v_mps,r_crit,omega_rad_s,period_s";
inline constexpr const char* kTrajectoryCsvHeader = "t_s,x1_mps,x2_N,u_Nps,power_W,fuel_gps";

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::string num(double v) {
  if (v == 0.0) v = 0.0; // no "-0" in output
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
} // namespace detail

/// Eigenvalues ordered by imaginary part, then real part, both descending.
[[nodiscard]] inline EigenSet sorted_for_output(EigenSet e) {
  std::stable_sort(e.begin(), e.end(), [](const Complex& l, const Complex& r) {
    if (l.imag() != r.imag()) return l.imag() > r.imag();
    return l.real() > r.real();
  });
  return e;
}

[[nodiscard]] inline std::string locus_csv(const std::vector<LocusPoint>& locus) {
  std::ostringstream os;
  os << kLocusCsvHeader << '\n';
  for (const auto& pt : locus) {
    os << detail::num(pt.r_value);
    for (const auto& s : sorted_for_output(pt.eigenvalues)) {
      os << ',' << detail::num(s.real()) << ',' << detail::num(s.imag());
    }
    os << ',' << to_string(pt.mode) << '\n';
  }
  return os.str();
}

/// Failed speeds are written as gaps with nan fields.
[[nodiscard]] inline std::string sweep_csv(const std::vector<SweepEntry>& sweep) {
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const auto& e : sweep) {
    os << detail::num(e.v) << ',';
    if (e.result) {
      os << detail::num(e.result->r_crit) << ',' << detail::num(e.result->omega_at_crit) << ','
         << detail::num(e.result->period_at_crit) << '\n';
    } else {
      os << "nan,nan,nan\n";
    }
  }
  return os.str();
}

[[nodiscard]] inline std::string trajectory_csv(const EvaluationResult& e, const BsfcParams& b = {}) {
  std::ostringstream os;
  os << kTrajectoryCsvHeader << '\n';
  const auto& tr = e.trajectory;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double x1 = tr.rows[i][0];
    const double x2 = tr.rows[i][1];
    const double pw = x1 * x2;
    os << detail::num(tr.t[i]) << ',' << detail::num(x1) << ',' << detail::num(x2) << ','
       << detail::num(e.u[i]) << ',' << detail::num(pw) << ',' << detail::num(fuel_rate(pw, b))
       << '\n';
  }
  return os.str();
}

[[nodiscard]] inline nlohmann::json to_json(const Equilibrium& e) {
  return {{"v_mps", e.v},
          {"x2_0_N", e.force},
          {"lambda1_0", e.lambda1},
          {"lambda2_0", e.lambda2},
          {"weight_c_g_per_m", e.weight_c}};
}

[[nodiscard]] inline nlohmann::json to_json(const DecisionVector& d) {
  return {{"x1_0", d.x1_0},
          {"x2_0", d.x2_0},
          {"omega", d.input.omega},
          {"a", d.input.a},
          {"b", d.input.b}};
}

/// Reads a decision either from the top level or from a "decision" member.
[[nodiscard]] inline DecisionVector decision_from_json(const nlohmann::json& doc) {
  const nlohmann::json& d = doc.contains("decision") ? doc.at("decision") : doc;
  try {
    DecisionVector out;
    out.x1_0 = d.at("x1_0").get<double>();
    out.x2_0 = d.at("x2_0").get<double>();
    out.input.omega = d.at("omega").get<double>();
    out.input.a = d.at("a").get<std::vector<double>>();
    out.input.b = d.at("b").get<std::vector<double>>();
    validate(out.input);
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed decision JSON: ") + e.what());
  }
}

[[nodiscard]] inline nlohmann::json cost_json(const EvaluationResult& e) {
  return {{"j_total", e.j_total},
          {"fuel_term", e.fuel_term},
          {"speed_term", e.speed_term},
          {"jerk_term", e.jerk_term}};
}

[[nodiscard]] inline nlohmann::json to_json(const OptimizationResult& r) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : r.penalty_history) {
    stages.push_back({{"penalty", s.penalty},
                      {"merit", s.merit},
                      {"j_total", s.j_total},
                      {"evaluations", s.evaluations},
                      {"simplex_converged", s.simplex_converged}});
  }
  return {
      {"decision", to_json(r.decision)},
      {"cost", cost_json(r.eval)},
      {"residuals", {{"r_x1", r.eval.r_x1}, {"r_x2", r.eval.r_x2}, {"min_x2", r.eval.min_x2}}},
      {"convergence",
       {{"converged", r.converged},
        {"iterations", r.iterations},
        {"restarts", r.restarts},
        {"message", r.message},
        {"penalty_history", stages}}},
  };
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

[[nodiscard]] inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace pngopt
