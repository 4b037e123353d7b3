#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "imex_stepper.hpp"
#include "tableau.hpp"

namespace ssplab {

/// Nonlinear scalar test problem y' = (1 + sin y) + (y^2 - sin y), y(0) = 0,
/// exact solution y = tan t. The first parenthesis is treated explicitly, the
/// second implicitly; plain tableaux take the whole right-hand side.
namespace test_problem {

inline constexpr double t_final = 1.3;

inline double exact() { return std::tan(t_final); }

inline SplitSystem<double> split_system() {
  SplitSystem<double> sys;
  sys.f_explicit = [](double y) { return 1.0 + std::sin(y); };
  sys.g_implicit = [](double y) { return y * y - std::sin(y); };
  sys.stage_solver = [](double y_star, double c) {
    return scalar_stage_newton([](double y) { return y * y - std::sin(y); },
                               [](double y) { return 2.0 * y - std::cos(y); }, y_star, c);
  };
  return sys;
}

inline SplitSystem<double> unsplit_system() {
  SplitSystem<double> sys;
  sys.f_explicit = [](double y) { return 1.0 + y * y; };
  return sys;
}

}  // namespace test_problem

/// Error |y_num(1.3) - tan(1.3)| for a fixed step size. dt must divide the
/// interval to rounding accuracy.
inline double run_test_problem(const AnyTableau& t, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("run_test_problem: dt must be positive");
  const double steps = test_problem::t_final / dt;
  const long n = std::lround(steps);
  if (n < 1 || std::abs(steps - static_cast<double>(n)) > 1e-9 * steps)
    throw std::invalid_argument("run_test_problem: dt must divide 1.3");

  double y = 0.0;
  if (std::holds_alternative<AdditiveTableau>(t)) {
    const auto sys = test_problem::split_system();
    const auto& tab = std::get<AdditiveTableau>(t);
    for (long i = 0; i < n; ++i) y = step(sys, tab, y, dt).y_new;
  } else {
    const auto sys = test_problem::unsplit_system();
    const auto& tab = std::get<RKTableau>(t);
    for (long i = 0; i < n; ++i) y = step(sys, tab, y, dt).y_new;
  }
  return std::abs(y - test_problem::exact());
}

struct ConvergenceReport {
  std::string scheme;
  std::vector<double> step_sizes;  // decreasing
  std::vector<double> errors;
  double fitted_order = 0.0;     // free log-log least-squares slope
  double fitted_constant = 0.0;  // least squares of error = C * dt^p at fixed p
  double fit_residual = 0.0;     // rms residual of the free fit, log space
  int nominal_order = 0;
  bool valid = false;  // fitted order within 0.3 of nominal
};

namespace detail {

// log-log least squares: returns (slope, intercept, rms residual)
inline void loglog_fit(const std::vector<double>& dts, const std::vector<double>& errs,
                       double& slope, double& intercept, double& rms) {
  const size_t n = dts.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double d = n * sxx - sx * sx;
  slope = (n * sxy - sx * sy) / d;
  intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = std::log(errs[i]) - (intercept + slope * std::log(dts[i]));
    ss += r * r;
  }
  rms = std::sqrt(ss / n);
}

}  // namespace detail

/// Runs dt = 1.3/2^k over the given k range and fits error = C * dt^p.
inline ConvergenceReport fit_error_constant(const AnyTableau& t, int p, std::string scheme_label = "",
                                            int k_min = 6, int k_max = 12) {
  if (p < 1 || k_min >= k_max) throw std::invalid_argument("fit_error_constant: bad arguments");
  ConvergenceReport rep;
  rep.scheme = std::move(scheme_label);
  rep.nominal_order = p;
  for (int k = k_min; k <= k_max; ++k) {
    const double dt = test_problem::t_final / std::ldexp(1.0, k);
    rep.step_sizes.push_back(dt);
    rep.errors.push_back(run_test_problem(t, dt));
  }
  double slope, intercept, rms;
  detail::loglog_fit(rep.step_sizes, rep.errors, slope, intercept, rms);
  rep.fitted_order = slope;
  rep.fit_residual = rms;

  // constant with the exponent pinned at the nominal order
  double s = 0.0;
  for (size_t i = 0; i < rep.errors.size(); ++i)
    s += std::log(rep.errors[i]) - p * std::log(rep.step_sizes[i]);
  rep.fitted_constant = std::exp(s / rep.errors.size());
  rep.valid = std::abs(rep.fitted_order - p) <= 0.3;
  return rep;
}

struct GammaSweepPoint {
  double gamma;
  double constant;
  double fitted_order;
};

/// Error constant of the two-stage IMEX pair as a function of gamma.
inline std::vector<GammaSweepPoint> gamma_sweep(double lo = 0.05, double hi = 0.45,
                                                double step = 0.005) {
  if (step <= 0.0 || lo >= hi) throw std::invalid_argument("gamma_sweep: bad range");
  std::vector<GammaSweepPoint> out;
  for (double g = lo; g <= hi + 0.5 * step; g += step) {
    const auto rep = fit_error_constant(builtin("imex_ssp2_222", g), 2, "imex_ssp2_222");
    out.push_back({g, rep.fitted_constant, rep.fitted_order});
  }
  return out;
}

}  // namespace ssplab
