#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "elliptic.hpp"
#include "grid.hpp"
#include "imex_stepper.hpp"
#include "linear_analysis.hpp"
#include "tableau.hpp"

namespace ssplab {

enum class AdvectScheme { upwind1, eno2 };

inline AdvectScheme advect_from_name(std::string_view name) {
  if (name == "upwind1") return AdvectScheme::upwind1;
  if (name == "eno2") return AdvectScheme::eno2;
  throw std::invalid_argument("unknown advection scheme: " + std::string(name));
}

/// Two transported scalars: temperature-like T and concentration-like c.
struct ScalarPair {
  GridField T, c;

  ScalarPair& operator+=(const ScalarPair& o) {
    T += o.T;
    c += o.c;
    return *this;
  }
  ScalarPair& operator*=(double a) {
    T *= a;
    c *= a;
    return *this;
  }
};

inline ScalarPair operator+(ScalarPair a, const ScalarPair& b) { return a += b; }
inline ScalarPair operator-(ScalarPair a, const ScalarPair& b) {
  a.T -= b.T;
  a.c -= b.c;
  return a;
}
inline ScalarPair operator*(double s, ScalarPair a) { return a *= s; }

struct CourantNumbers {
  double c = 0.2, T = 0.2, visc = 0.2, fluid = 0.2;
};

struct TransportProblem {
  ScalarPair fields;
  GridField vel_u, vel_v;  // prescribed, divergence-free
  double kappa_T = 1.0, kappa_c = 1.0;
  CourantNumbers courant;
  double eta_over_rho = 0.0;
  double gravity = 0.0;
  // vertical Dirichlet ghost rows, one entry per column
  std::vector<double> T_bottom, T_top, c_bottom, c_top;
};

struct DtLimits {
  double tau_c, tau_T, tau_visc, tau_fluid;
  double dt;
};

inline DtLimits explicit_dt_limit(const TransportProblem& p) {
  const GridField& f = p.fields.T;
  const double h2 = std::min(f.dx * f.dx, f.dy * f.dy);
  const double inf = std::numeric_limits<double>::infinity();
  DtLimits lim{};
  lim.tau_c = p.courant.c / p.kappa_c * h2;
  lim.tau_T = p.courant.T / p.kappa_T * h2;
  lim.tau_visc = (p.eta_over_rho > 0.0) ? p.courant.visc / p.eta_over_rho * h2 : inf;
  double umax = 0.0;
  for (size_t k = 0; k < p.vel_u.v.size(); ++k)
    umax = std::max(umax, std::hypot(p.vel_u.v[k], p.vel_v.v[k]));
  lim.tau_fluid = (umax > 0.0) ? p.courant.fluid / umax * std::min(f.dx, f.dy) : inf;
  lim.dt = std::min(std::min(lim.tau_c, lim.tau_T), std::min(lim.tau_visc, lim.tau_fluid));
  return lim;
}

inline double buoyancy_timescale(const TransportProblem& p) {
  if (p.gravity <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::min(p.fields.T.dx, p.fields.T.dy)) / std::sqrt(p.gravity);
}

namespace detail {

// ENO2 face reconstruction from the upwind side: base cell plus half of the
// smaller of the two one-sided slopes.
inline double eno2_face(double um, double u0, double up) {
  const double s1 = u0 - um, s2 = up - u0;
  return u0 + 0.5 * (std::abs(s1) <= std::abs(s2) ? s1 : s2);
}

}  // namespace detail

/// Conservative advection tendency -div(v * field), direction by direction.
/// Periodic horizontally; vertical ghosts are zero-gradient copies of the
/// boundary cells (the lab's prescribed velocities vanish at the walls).
inline GridField advect(const GridField& field, const GridField& u, const GridField& v,
                        AdvectScheme scheme) {
  if (!field.same_shape(u) || !field.same_shape(v))
    throw std::invalid_argument("advect: shape mismatch");
  const int nx = field.nx, ny = field.ny;
  GridField out(nx, ny, field.dx, field.dy);

  auto cell = [&](int i, int j) {
    i = (i % nx + nx) % nx;
    j = std::clamp(j, 0, ny - 1);
    return field.at(i, j);
  };

  // x-direction fluxes
  for (int j = 0; j < ny; ++j) {
    std::vector<double> flux(nx + 1);
    for (int i = 0; i <= nx; ++i) {
      const int ir = i % nx;
      const int il = (i - 1 + nx) % nx;
      const double uf = 0.5 * (u.at(il, j) + u.at(ir, j));
      double val;
      if (scheme == AdvectScheme::upwind1) {
        val = (uf >= 0.0) ? cell(il, j) : cell(ir, j);
      } else {
        val = (uf >= 0.0) ? detail::eno2_face(cell(il - 1, j), cell(il, j), cell(ir, j))
                          : detail::eno2_face(cell(ir + 1, j), cell(ir, j), cell(il, j));
      }
      flux[i] = uf * val;
    }
    for (int i = 0; i < nx; ++i) out.at(i, j) -= (flux[i + 1] - flux[i]) / field.dx;
  }

  if (ny > 1) {
    for (int i = 0; i < nx; ++i) {
      std::vector<double> flux(ny + 1, 0.0);
      for (int j = 1; j < ny; ++j) {
        const double vf = 0.5 * (v.at(i, j - 1) + v.at(i, j));
        double val;
        if (scheme == AdvectScheme::upwind1) {
          val = (vf >= 0.0) ? cell(i, j - 1) : cell(i, j);
        } else {
          val = (vf >= 0.0) ? detail::eno2_face(cell(i, j - 2), cell(i, j - 1), cell(i, j))
                            : detail::eno2_face(cell(i, j + 1), cell(i, j), cell(i, j - 1));
        }
        flux[j] = vf * val;
      }
      // closed walls: no advective flux through top and bottom
      flux[0] = 0.0;
      flux[ny] = 0.0;
      for (int j = 0; j < ny; ++j) out.at(i, j) -= (flux[j + 1] - flux[j]) / field.dy;
    }
  }
  return out;
}

/// Second-derivative tendency per direction with the selected stencil,
/// scaled by 1/dx^2 and 1/dy^2. Periodic horizontally; vertically the ghost
/// cells hold the supplied Dirichlet values (empty vectors select periodic).
inline GridField diffuse_stencil(const GridField& field, StencilKind kind,
                                 std::span<const double> bottom = {},
                                 std::span<const double> top = {}) {
  const int nx = field.nx, ny = field.ny;
  if (kind == StencilKind::fourthorder && nx < 5)
    throw std::invalid_argument("diffuse_stencil: fourthorder needs at least 5 points per direction");
  GridField out(nx, ny, field.dx, field.dy);
  const double ix2 = 1.0 / (field.dx * field.dx);
  const double iy2 = 1.0 / (field.dy * field.dy);

  auto fx = [&](int i, int j) { return field.at((i % nx + nx) % nx, j); };
  auto fy = [&](int i, int j) {
    if (j < 0) return bottom.empty() ? field.at(i, (j % ny + ny) % ny) : bottom[i];
    if (j >= ny) return top.empty() ? field.at(i, j % ny) : top[i];
    return field.at(i, j);
  };

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double lap;
      if (kind == StencilKind::threepoint) {
        lap = (fx(i + 1, j) - 2.0 * fx(i, j) + fx(i - 1, j)) * ix2;
      } else {
        lap = (-fx(i + 2, j) + 16.0 * fx(i + 1, j) - 30.0 * fx(i, j) + 16.0 * fx(i - 1, j) -
               fx(i - 2, j)) /
              12.0 * ix2;
      }
      if (ny > 1) {
        if (kind == StencilKind::threepoint || j < 2 || j >= ny - 2) {
          lap += (fy(i, j + 1) - 2.0 * fy(i, j) + fy(i, j - 1)) * iy2;
        } else {
          lap += (-fy(i, j + 2) + 16.0 * fy(i, j + 1) - 30.0 * fy(i, j) + 16.0 * fy(i, j - 1) -
                  fy(i, j - 2)) /
                 12.0 * iy2;
        }
      }
      out.at(i, j) = lap;
    }
  return out;
}

/// Counts two-point instabilities on one line of values: positions whose
/// four consecutive differences match an alternating sign pattern. Zeros
/// match neither sign.
inline int detect_two_point_instabilities(std::span<const double> line) {
  const int n = static_cast<int>(line.size());
  if (n < 5) throw std::invalid_argument("detect_two_point_instabilities: line too short");
  auto sgn = [](double d) { return (d > 0.0) - (d < 0.0); };
  int count = 0;
  for (int j = 2; j < n - 2; ++j) {
    const int s1 = sgn(line[j - 1] - line[j - 2]);
    const int s2 = sgn(line[j] - line[j - 1]);
    const int s3 = sgn(line[j + 1] - line[j]);
    const int s4 = sgn(line[j + 2] - line[j + 1]);
    const bool head = (s1 == 1 && s2 == -1 && s3 == 1 && s4 != 0) ||
                      (s1 == -1 && s2 == 1 && s3 == -1 && s4 != 0);
    const bool tail = (s1 != 0 && s2 == 1 && s3 == -1 && s4 == 1) ||
                      (s1 != 0 && s2 == -1 && s3 == 1 && s4 == -1);
    if (head || tail) ++count;
  }
  return count;
}

/// Largest per-row instability count over both fields (horizontal lines; a
/// flag enables the vertical direction for experimentation).
inline int max_row_instabilities(const ScalarPair& s, bool scan_vertical = false) {
  int worst = 0;
  auto scan_field = [&](const GridField& f) {
    if (f.nx >= 5)
      for (int j = 0; j < f.ny; ++j) {
        std::span<const double> row(&f.v[static_cast<size_t>(j) * f.nx], static_cast<size_t>(f.nx));
        worst = std::max(worst, detect_two_point_instabilities(row));
      }
    if (scan_vertical && f.ny >= 5) {
      std::vector<double> col(static_cast<size_t>(f.ny));
      for (int i = 0; i < f.nx; ++i) {
        for (int j = 0; j < f.ny; ++j) col[j] = f.at(i, j);
        worst = std::max(worst, detect_two_point_instabilities(col));
      }
    }
  };
  scan_field(s.T);
  scan_field(s.c);
  return worst;
}

struct StepControllerState {
  double dt = 0.0;
  int hold_remaining = 0;   // freeze window after a reduction
  int quiet_streak = 0;     // consecutive quiet updates
  double osc_limit_fraction = 0.1;
  double reduce_factor = 2.0 / 3.0;
  double grow_factor = 5.0 / 4.0;
  double dt_cap = std::numeric_limits<double>::infinity();
};

/// Two-point-instability step controller: reduce by 2/3 and freeze for 15
/// updates when more than osc_limit_fraction * line_length instabilities
/// appear; grow by 5/4 (capped) after more than 50 quiet updates.
inline StepControllerState controller_update(StepControllerState s, int osc_count, int line_length) {
  s.dt = std::min(s.dt, s.dt_cap);
  if (s.hold_remaining > 0) {
    --s.hold_remaining;
    return s;
  }
  if (osc_count > s.osc_limit_fraction * line_length) {
    s.dt *= s.reduce_factor;
    s.hold_remaining = 15;
    s.quiet_streak = 0;
    return s;
  }
  ++s.quiet_streak;
  if (s.quiet_streak > 50) {
    s.dt = std::min(s.dt * s.grow_factor, s.dt_cap);
    s.quiet_streak = 0;
  }
  return s;
}

/// Total variation along horizontal lines with periodic wrap, summed.
inline double total_variation(const GridField& f) {
  double tv = 0.0;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) tv += std::abs(f.at((i + 1) % f.nx, j) - f.at(i, j));
  return tv;
}

struct TrajectoryRow {
  int step;
  double time, dt;
  int osc_count, cg_iters;
  double tv_T, tv_c, min_c, max_c;
};

struct SimControl {
  double t_end = 1.0;
  bool controller_on = true;
  double dt_init = 0.0;        // 0: start from the fully explicit limit
  int max_steps = 2000000;
  bool scan_vertical = false;
  std::function<void(int, double, const ScalarPair&)> snapshot_sink;
  int snapshot_every = 0;
};

struct SimResult {
  std::vector<TrajectoryRow> rows;
  ScalarPair final_state;
  bool ok = false;
  std::string message;
};

/// Method-of-lines run: explicit advection, implicit diffusion for additive
/// schemes (fully explicit otherwise), optional adaptive step control.
inline SimResult run_simulation(const TransportProblem& p, const AnyTableau& tab, StencilKind stencil,
                                AdvectScheme advect_scheme, const SimControl& ctl) {
  SimResult result;
  const bool imex = std::holds_alternative<AdditiveTableau>(tab);
  const DtLimits expl = explicit_dt_limit(p);

  StepControllerState ctrl;
  ctrl.dt_cap = imex ? std::min(expl.tau_visc, expl.tau_fluid) : expl.dt;
  ctrl.dt = (ctl.dt_init > 0.0) ? ctl.dt_init : expl.dt;
  if (ctl.controller_on) ctrl.dt = std::min(ctrl.dt, ctrl.dt_cap);
  if (!std::isfinite(ctrl.dt) || ctrl.dt <= 0.0) {
    result.message = "no finite initial time step";
    return result;
  }

  int cg_iters_this_step = 0;
  auto sinkT = [&](int it) { cg_iters_this_step += it; };
  auto solveT = stage_solver_for_diffusion(
      GridField(p.fields.T.nx, p.fields.T.ny, p.fields.T.dx, p.fields.T.dy, p.kappa_T), p.T_bottom,
      p.T_top, 1e-10, 20000, sinkT, stencil);
  auto solveC = stage_solver_for_diffusion(
      GridField(p.fields.c.nx, p.fields.c.ny, p.fields.c.dx, p.fields.c.dy, p.kappa_c), p.c_bottom,
      p.c_top, 1e-10, 20000, sinkT, stencil);

  SplitSystem<ScalarPair> sys;
  sys.f_explicit = [&](const ScalarPair& s) {
    ScalarPair out{advect(s.T, p.vel_u, p.vel_v, advect_scheme),
                   advect(s.c, p.vel_u, p.vel_v, advect_scheme)};
    if (!imex) {
      out.T += p.kappa_T * diffuse_stencil(s.T, stencil, p.T_bottom, p.T_top);
      out.c += p.kappa_c * diffuse_stencil(s.c, stencil, p.c_bottom, p.c_top);
    }
    return out;
  };
  if (imex) {
    // G must match the operator the stage solver inverts exactly, or the
    // stage identity used to recover G at solved stages would not hold.
    sys.g_implicit = [&, kT = GridField(p.fields.T.nx, p.fields.T.ny, p.fields.T.dx, p.fields.T.dy,
                                        p.kappa_T),
                      kC = GridField(p.fields.c.nx, p.fields.c.ny, p.fields.c.dx, p.fields.c.dy,
                                     p.kappa_c)](const ScalarPair& s) {
      return ScalarPair{diffusion_tendency(s.T, kT, p.T_bottom, p.T_top, stencil),
                        diffusion_tendency(s.c, kC, p.c_bottom, p.c_top, stencil)};
    };
    sys.stage_solver = [&](const ScalarPair& y_star, double coeff) {
      return ScalarPair{solveT(y_star.T, coeff), solveC(y_star.c, coeff)};
    };
  }

  ScalarPair state = p.fields;
  double time = 0.0;
  const int line_len = p.fields.T.nx;
  for (int n = 1; n <= ctl.max_steps && time < ctl.t_end * (1.0 - 1e-15); ++n) {
    const double dt = std::min(ctrl.dt, ctl.t_end - time);
    if (ctrl.dt < 1e-12 * ctrl.dt_cap && std::isfinite(ctrl.dt_cap)) {
      result.message = "time step underflow at t = " + std::to_string(time);
      result.final_state = state;
      return result;
    }
    cg_iters_this_step = 0;
    try {
      state = imex ? step(sys, std::get<AdditiveTableau>(tab), state, dt).y_new
                   : step(sys, std::get<RKTableau>(tab), state, dt).y_new;
    } catch (const std::exception& e) {
      result.message = e.what();
      result.final_state = state;
      return result;
    }
    time += dt;

    if (!std::isfinite(state.T.max_abs()) || !std::isfinite(state.c.max_abs())) {
      result.message = "solution lost finiteness at t = " + std::to_string(time);
      result.final_state = state;
      return result;
    }

    const int osc = max_row_instabilities(state, ctl.scan_vertical);
    result.rows.push_back({n, time, dt, osc, cg_iters_this_step, total_variation(state.T),
                           total_variation(state.c), state.c.min(), state.c.max()});
    if (ctl.snapshot_sink && ctl.snapshot_every > 0 && n % ctl.snapshot_every == 0)
      ctl.snapshot_sink(n, time, state);

    if (ctl.controller_on) ctrl = controller_update(ctrl, osc, line_len);
  }
  result.final_state = state;
  result.ok = true;
  return result;
}

}  // namespace ssplab
