#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dense.hpp"
#include "tableau.hpp"

namespace ssplab {

/// Region of absolute monotonicity of an additive scheme: the per-part radii
/// and a sampled boundary curve (r, rtilde) in the first quadrant.
struct MonotonicityRegion {
  double radius_explicit = 0.0;
  double radius_implicit = 0.0;
  std::vector<std::pair<double, double>> boundary;
  double grid_step = 0.0;
};

namespace detail {

// Extended array [[A, 0], [b^T, 0]] of size (s+1) x (s+1).
inline std::vector<double> extended_array(const RKTableau& t) {
  const int n = t.stages + 1;
  std::vector<double> e(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < t.stages; ++i)
    for (int j = 0; j < t.stages; ++j) e[static_cast<size_t>(i) * n + j] = t.A(i, j);
  for (int j = 0; j < t.stages; ++j) e[static_cast<size_t>(t.stages) * n + j] = t.b[j];
  return e;
}

// Checks componentwise nonnegativity (within tol) of M^{-1} applied to each
// of the supplied extended arrays and to the ones vector, M = I + sum coeff*K.
inline bool am_check(const std::vector<const std::vector<double>*>& arrays,
                     const std::vector<double>& coeffs, int n, double tol) {
  std::vector<double> m(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) m[static_cast<size_t>(i) * n + i] = 1.0;
  for (size_t k = 0; k < arrays.size(); ++k)
    for (size_t idx = 0; idx < m.size(); ++idx) m[idx] += coeffs[k] * (*arrays[k])[idx];

  const int nrhs = static_cast<int>(arrays.size()) * n + 1;
  std::vector<double> rhs(static_cast<size_t>(n) * nrhs, 0.0);
  for (int i = 0; i < n; ++i) {
    for (size_t k = 0; k < arrays.size(); ++k)
      for (int j = 0; j < n; ++j)
        rhs[static_cast<size_t>(i) * nrhs + static_cast<int>(k) * n + j] = (*arrays[k])[static_cast<size_t>(i) * n + j];
    rhs[static_cast<size_t>(i) * nrhs + nrhs - 1] = 1.0;
  }
  if (!solve_dense(std::move(m), n, rhs, nrhs)) return false;  // singular: boundary of feasibility
  for (double v : rhs)
    if (v < -tol) return false;
  return true;
}

}  // namespace detail

/// Pointwise absolute-monotonicity test for an additive scheme via the
/// extended-array criterion.
inline bool am_at_point(const AdditiveTableau& t, double r, double rt, double tol = 1e-12) {
  if (!t.implicit_part.is_dirk())
    throw std::invalid_argument("am_at_point: implicit part must be DIRK");
  const int n = t.stages() + 1;
  const auto ae = detail::extended_array(t.explicit_part);
  const auto ai = detail::extended_array(t.implicit_part);
  return detail::am_check({&ae, &ai}, {r, rt}, n, tol);
}

/// Absolute monotonicity of a single tableau at radius r (Kraaijevanger
/// conditions via the extended array).
inline bool am_single(const RKTableau& t, double r, double tol = 1e-12) {
  const int n = t.stages + 1;
  const auto e = detail::extended_array(t);
  return detail::am_check({&e}, {r}, n, tol);
}

namespace detail {

// Largest x in [0, cap] with pred(x) true, bisection to the given accuracy.
// Assumes pred is a down-set (true on an interval containing 0).
template <class Pred>
double bisect_radius(Pred pred, double cap, double accuracy) {
  if (!pred(0.0)) return 0.0;
  double lo = 0.0, hi = cap;
  if (pred(cap)) return cap;
  while (hi - lo > accuracy) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Radius of absolute monotonicity of the implicit part of the gamma family,
/// closed form. The branches for gamma > 1/4 coincide with the rationalized
/// expression 2/((1-2g) + sqrt(4g-1)), which is also stable through the
/// branch points.
inline double radius_implicit_gamma(double gamma) {
  if (gamma < 0.0 || gamma > 0.5)
    throw std::invalid_argument("radius_implicit_gamma: gamma must lie in [0, 1/2]");
  if (gamma <= 0.25) return 1.0 / (1.0 - 3.0 * gamma);
  return 2.0 / ((1.0 - 2.0 * gamma) + std::sqrt(4.0 * gamma - 1.0));
}

inline MonotonicityRegion region_closed_form(std::string_view name,
                                             std::optional<double> gamma = std::nullopt,
                                             int samples = 256) {
  if (samples < 200) samples = 200;
  MonotonicityRegion reg;
  double r_max = 1.0;
  std::vector<double> rs;
  auto phi = [&]() -> std::function<double(double)> {
    if (name == "imex_ssp2_222") {
      const double g = gamma.value_or(default_gamma_222);
      if (g < 0.0 || g > 0.5) throw std::invalid_argument("region_closed_form: gamma out of range");
      r_max = (g <= 1.0 / 3) ? 1.0 : (1.0 - 2.0 * g) / g;
      reg.radius_explicit = 1.0;
      reg.radius_implicit = radius_implicit_gamma(g);
      return [g](double r) { return (1.0 - r) / (1.0 - g); };
    }
    if (name == "imex_ssp2_332") {
      r_max = 1.0;
      reg.radius_explicit = 2.0;
      reg.radius_implicit = 5.0 / 9 * (std::sqrt(70.0) - 4.0);
      return [](double r) {
        return 0.25 * (-28.0 + 9.0 * r) + 0.25 * std::sqrt(1264.0 - 984.0 * r + 201.0 * r * r);
      };
    }
    if (name == "imex_ssp3_333") {
      r_max = 1.0;
      reg.radius_explicit = 1.0;
      reg.radius_implicit = 5.0 / 47 * (13.0 - 2.0 * std::sqrt(7.0));
      return [](double r) {
        return 15.0 / 302 * (28.0 - 25.0 * r - std::sqrt(180.0 - 192.0 * r + 21.0 * r * r));
      };
    }
    throw std::invalid_argument("region_closed_form: no closed form for scheme " + std::string(name));
  }();

  reg.grid_step = r_max / (samples - 1);
  reg.boundary.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double r = r_max * i / (samples - 1);
    reg.boundary.emplace_back(r, std::max(0.0, phi(r)));
  }
  return reg;
}

/// Numeric scan of the region of absolute monotonicity. For each scanned r
/// the boundary holds the largest rtilde with am_at_point true; the radii are
/// per-part scans of the explicit and implicit tableau alone.
inline MonotonicityRegion region_numeric(const AdditiveTableau& t, double r_max, double rt_max,
                                         double step) {
  if (step <= 0.0) throw std::invalid_argument("region_numeric: step must be positive");
  MonotonicityRegion reg;
  reg.grid_step = step;
  reg.radius_explicit =
      detail::bisect_radius([&](double r) { return am_single(t.explicit_part, r); }, 100.0, 1e-7);
  reg.radius_implicit =
      detail::bisect_radius([&](double r) { return am_single(t.implicit_part, r); }, 100.0, 1e-7);

  for (double r = 0.0; r <= r_max + 1e-12; r += step) {
    if (!am_at_point(t, r, 0.0)) break;
    const double rt =
        detail::bisect_radius([&](double x) { return am_at_point(t, r, x); }, rt_max, step / 100.0);
    reg.boundary.emplace_back(r, rt);
  }
  return reg;
}

}  // namespace ssplab
