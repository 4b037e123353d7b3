#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dense.hpp"
#include "tableau.hpp"

namespace ssplab {

using Complex = std::complex<double>;

enum class StencilKind { threepoint, fourthorder };

inline StencilKind stencil_from_name(std::string_view name) {
  if (name == "threepoint" || name == "3pt") return StencilKind::threepoint;
  if (name == "fourthorder" || name == "4th") return StencilKind::fourthorder;
  throw std::invalid_argument("unknown stencil: " + std::string(name));
}

inline const char* stencil_name(StencilKind k) {
  return k == StencilKind::threepoint ? "threepoint" : "fourthorder";
}

/// Fourier symbol of the diffusion stencil scaled by dx^2, so that
/// z(theta, mu) = mu * symbol(theta). Nonpositive on [0, pi].
inline double stencil_symbol(StencilKind kind, double theta) {
  if (kind == StencilKind::threepoint) return 2.0 * std::cos(theta) - 2.0;
  return (-2.0 * std::cos(2.0 * theta) + 32.0 * std::cos(theta) - 30.0) / 12.0;
}

namespace detail {

// Stage solve (I - ze*A - zi*At)^{-1} * 1, then R = 1 + ze*b'Y + zi*bt'Y.
// ze multiplies the explicit arrays, zi the implicit ones; a plain tableau is
// handled by passing it in both slots with zi = 0.
inline Complex stability_value_impl(const RKTableau& ex, const RKTableau& im, Complex ze, Complex zi) {
  const int s = ex.stages;
  std::vector<Complex> m(static_cast<size_t>(s) * s, Complex{0.0});
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      Complex v = (i == j) ? Complex{1.0} : Complex{0.0};
      v -= ze * ex.A(i, j) + zi * im.A(i, j);
      m[static_cast<size_t>(i) * s + j] = v;
    }
  std::vector<Complex> y(static_cast<size_t>(s), Complex{1.0});
  if (!solve_dense(std::move(m), s, y, 1))
    return Complex{std::numeric_limits<double>::infinity(), 0.0};  // pole
  Complex r{1.0};
  for (int i = 0; i < s; ++i) r += (ze * ex.b[i] + zi * im.b[i]) * y[i];
  return r;
}

}  // namespace detail

/// Stability function of a plain tableau, R(z) = 1 + z b'(I - zA)^{-1} 1.
inline Complex stability_value(const RKTableau& t, Complex z) {
  return detail::stability_value_impl(t, t, z, Complex{0.0});
}

/// Stability function of an additive tableau on the split test equation:
/// Re(z) feeds the implicit part, i*Im(z) the explicit part.
inline Complex stability_value(const AdditiveTableau& t, Complex z) {
  return detail::stability_value_impl(t.explicit_part, t.implicit_part, Complex{0.0, z.imag()},
                                      Complex{z.real(), 0.0});
}

inline Complex stability_value(const AnyTableau& t, Complex z) {
  return std::visit([&](const auto& tab) { return stability_value(tab, z); }, t);
}

/// Printed rational stability functions of the implicit parts.
inline Complex implicit_stability_closed_form(std::string_view name, Complex z) {
  const double s2 = std::numbers::sqrt2;
  if (name == "imex_ssp2_222") {
    const Complex den = (2.0 - z + s2) * (2.0 - z + s2);
    return 2.0 * (1.0 + s2) * (1.0 + z + s2) / den;
  }
  if (name == "imex_ssp2_332") {
    const Complex den = 2.0 * (z - 5.0) * (z - 5.0) * (z - 3.0);
    return (-150.0 - 40.0 * z + 9.0 * z * z) / den;
  }
  if (name == "imex_ssp3_333") {
    const Complex den = 2.0 * (z - 15.0) * (z - 15.0);
    return (450.0 + 390.0 * z + 167.0 * z * z + 47.0 * z * z * z) / den;
  }
  throw std::invalid_argument("no printed implicit stability function for " + std::string(name));
}

enum class LimitClass { zero, finite_nonzero, infinite };

inline const char* limit_class_name(LimitClass c) {
  switch (c) {
    case LimitClass::zero: return "zero";
    case LimitClass::finite_nonzero: return "finite_nonzero";
    default: return "infinite";
  }
}

struct StabilityRegionReport {
  std::vector<Complex> boundary;       // refined points with | |R|-1 | < 1e-8
  std::optional<double> z_left;        // absent when the region is unbounded
  LimitClass limit_at_minus_infinity = LimitClass::finite_nonzero;
};

namespace detail {

inline double mod_r(const AnyTableau& t, Complex z) { return std::abs(stability_value(t, z)); }

// Refine a |R| = 1 crossing between two points by bisection.
inline Complex refine_boundary(const AnyTableau& t, Complex inside, Complex outside) {
  for (int it = 0; it < 60; ++it) {
    const Complex mid = 0.5 * (inside + outside);
    (mod_r(t, mid) < 1.0 ? inside : outside) = mid;
    if (std::abs(mod_r(t, 0.5 * (inside + outside)) - 1.0) < 1e-9) break;
  }
  return 0.5 * (inside + outside);
}

}  // namespace detail

/// Scans the rectangle [re_min, re_max] x [im_min, im_max] for the |R| = 1
/// boundary, locates z_left on the negative real axis, and classifies the
/// limit of |R| as Re(z) -> -infinity.
inline StabilityRegionReport scan_stability_region(const AnyTableau& t, double re_min, double re_max,
                                                   double im_min, double im_max, int resolution) {
  if (resolution < 64) throw std::invalid_argument("scan_stability_region: resolution must be >= 64");
  StabilityRegionReport rep;

  const double dre = (re_max - re_min) / resolution;
  const double dim = (im_max - im_min) / resolution;
  for (int j = 0; j <= resolution; ++j) {
    const double im = im_min + j * dim;
    double prev_mod = detail::mod_r(t, {re_min, im});
    for (int i = 1; i <= resolution; ++i) {
      const double re = re_min + i * dre;
      const double mod = detail::mod_r(t, {re, im});
      if ((prev_mod < 1.0) != (mod < 1.0)) {
        const Complex a{re - dre, im}, b{re, im};
        rep.boundary.push_back(prev_mod < 1.0 ? detail::refine_boundary(t, a, b)
                                              : detail::refine_boundary(t, b, a));
      }
      prev_mod = mod;
    }
  }

  // z_left: march down the negative real axis for the first exit from the
  // stability region, then bisect. Unbounded if still inside at -1e6.
  double x_in = 0.0;
  bool entered = false;
  double x = 0.0;
  std::optional<double> bracket;
  const double coarse_end = 200.0;
  for (x = 1e-3; x <= coarse_end; x *= 1.02) {
    if (detail::mod_r(t, {-x, 0.0}) < 1.0) {
      entered = true;
      x_in = x;
    } else if (entered) {
      bracket = x;
      break;
    }
  }
  if (entered && !bracket) {
    for (x = coarse_end; x <= 1e6; x *= 1.25) {
      if (detail::mod_r(t, {-x, 0.0}) >= 1.0) {
        bracket = x;
        break;
      }
      x_in = x;
    }
  }
  if (entered && bracket) {
    double lo = x_in, hi = *bracket;
    while (hi - lo > 1e-6 && (hi - lo) > 1e-9 * hi) {
      const double mid = 0.5 * (lo + hi);
      (detail::mod_r(t, {-mid, 0.0}) < 1.0 ? lo : hi) = mid;
    }
    rep.z_left = -0.5 * (lo + hi);
  }

  const double m3 = detail::mod_r(t, {-1e3, 0.0});
  const double m6 = detail::mod_r(t, {-1e6, 0.0});
  const double m9 = detail::mod_r(t, {-1e9, 0.0});
  if (m9 < 1e-2 && m9 < m6 && m6 < m3)
    rep.limit_at_minus_infinity = LimitClass::zero;
  else if (m9 > 1e2 && m9 > m6 && m6 > m3)
    rep.limit_at_minus_infinity = LimitClass::infinite;
  else
    rep.limit_at_minus_infinity = LimitClass::finite_nonzero;
  return rep;
}

inline StabilityRegionReport scan_stability_region(const AnyTableau& t, int resolution = 256) {
  return scan_stability_region(t, -12.0, 2.0, -8.0, 8.0, resolution);
}

/// Amplification factor g(theta, mu) of a tableau part applied to the heat
/// equation semi-discretized by the given stencil: R evaluated at
/// z = mu * symbol(theta), which is real for real tableaux.
inline double amplification(const RKTableau& part, StencilKind stencil, double theta, double mu) {
  if (theta < 0.0 || theta > std::numbers::pi + 1e-12)
    throw std::invalid_argument("amplification: theta must lie in [0, pi]");
  if (mu < 0.0) throw std::invalid_argument("amplification: mu must be nonnegative");
  const Complex r = stability_value(part, Complex{mu * stencil_symbol(stencil, theta), 0.0});
  return r.real();
}

struct DissipativityLandmarks {
  std::optional<double> first_zero;     // smallest mu > 0 with g(pi, mu) = 0
  std::optional<double> unit_modulus;   // smallest mu > 0 with |g(pi, mu)| = 1
};

/// Locates the dissipativity landmarks of g(pi, mu) by scan plus bisection,
/// searching mu in (0, 1e3].
inline DissipativityLandmarks locate_dissipativity_landmarks(const RKTableau& part, StencilKind stencil) {
  DissipativityLandmarks lm;
  const double mu_cap = 1e3;
  auto g = [&](double mu) { return amplification(part, stencil, std::numbers::pi, mu); };

  auto bisect = [&](auto f, double lo, double hi) {
    for (int it = 0; it < 80 && hi - lo > 1e-9; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((f(lo) < 0.0) == (f(mid) < 0.0) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  double prev_mu = 1e-6;
  double prev_g = g(prev_mu);
  bool have_zero = false, have_unit = false;
  for (double mu = prev_mu; mu < mu_cap && !(have_zero && have_unit);) {
    const double step = std::min(1e-3 * std::max(1.0, mu * 10.0), 1.0);
    const double next_mu = mu + step;
    const double cur_g = g(next_mu);
    if (!have_zero && (prev_g <= 0.0) != (cur_g <= 0.0)) {
      lm.first_zero = bisect([&](double m) { return g(m); }, mu, next_mu);
      have_zero = true;
    }
    if (!have_unit && (std::abs(prev_g) - 1.0 < 0.0) != (std::abs(cur_g) - 1.0 < 0.0)) {
      lm.unit_modulus = bisect([&](double m) { return std::abs(g(m)) - 1.0; }, mu, next_mu);
      have_unit = true;
    }
    prev_g = cur_g;
    mu = next_mu;
  }
  return lm;
}

}  // namespace ssplab
