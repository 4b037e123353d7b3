#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "linear_analysis.hpp"

namespace ssplab {

/// Generalized elliptic problem g*phi - div(h grad phi) = f on a rectangular
/// grid, periodic horizontally, Dirichlet ghost values top and bottom.
/// h lives at cell centers; face values are arithmetic means. The horizontal
/// derivative may use the fourth-order stencil (uniform h assumed there);
/// vertical fluxes stay second order.
struct EllipticProblem {
  int nx = 0, ny = 0;
  double dx = 1.0, dy = 1.0;
  GridField g_coeff;
  GridField h_coeff;
  GridField rhs;
  StencilKind x_stencil = StencilKind::threepoint;
  std::vector<double> dirichlet_bottom;  // ghost row below j = 0
  std::vector<double> dirichlet_top;     // ghost row above j = ny-1

  void validate() const {
    if (nx <= 0 || ny <= 0) throw std::invalid_argument("elliptic: bad grid shape");
    if (g_coeff.nx != nx || g_coeff.ny != ny || h_coeff.nx != nx || h_coeff.ny != ny ||
        rhs.nx != nx || rhs.ny != ny)
      throw std::invalid_argument("elliptic: field shapes inconsistent");
    if (ny > 1 && (static_cast<int>(dirichlet_bottom.size()) != nx ||
                   static_cast<int>(dirichlet_top.size()) != nx))
      throw std::invalid_argument("elliptic: Dirichlet value rows must have nx entries");
    for (double g : g_coeff.v)
      if (g < 0.0) throw std::invalid_argument("elliptic: g coefficient must be nonnegative");
  }
};

namespace detail {

inline GridField apply_elliptic(const EllipticProblem& p, const GridField& phi, bool include_bc) {
  GridField out(p.nx, p.ny, p.dx, p.dy);
  const double ix2 = 1.0 / (p.dx * p.dx);
  const double iy2 = 1.0 / (p.dy * p.dy);
  for (int j = 0; j < p.ny; ++j) {
    for (int i = 0; i < p.nx; ++i) {
      const int il = (i + p.nx - 1) % p.nx, ir = (i + 1) % p.nx;
      const double h = p.h_coeff.at(i, j);
      const double c = phi.at(i, j);
      double div;
      if (p.x_stencil == StencilKind::threepoint) {
        const double hl = 0.5 * (h + p.h_coeff.at(il, j));
        const double hr = 0.5 * (h + p.h_coeff.at(ir, j));
        div = hr * (phi.at(ir, j) - c) * ix2 - hl * (c - phi.at(il, j)) * ix2;
      } else {
        const int il2 = (i + p.nx - 2) % p.nx, ir2 = (i + 2) % p.nx;
        div = h *
              (-phi.at(ir2, j) + 16.0 * phi.at(ir, j) - 30.0 * c + 16.0 * phi.at(il, j) -
               phi.at(il2, j)) /
              12.0 * ix2;
      }

      if (p.ny > 1) {  // single-row problems are horizontal-only
        const double hd = (j > 0) ? 0.5 * (h + p.h_coeff.at(i, j - 1)) : h;
        const double hu = (j < p.ny - 1) ? 0.5 * (h + p.h_coeff.at(i, j + 1)) : h;
        const double below = (j > 0) ? phi.at(i, j - 1) : (include_bc ? p.dirichlet_bottom[i] : 0.0);
        const double above = (j < p.ny - 1) ? phi.at(i, j + 1) : (include_bc ? p.dirichlet_top[i] : 0.0);
        div += hu * (above - c) * iy2 - hd * (c - below) * iy2;
      }

      out.at(i, j) = p.g_coeff.at(i, j) * c - div;
    }
  }
  return out;
}

}  // namespace detail

/// Applies the discrete operator, Dirichlet ghost values included.
inline GridField apply_operator(const EllipticProblem& p, const GridField& phi) {
  if (phi.nx != p.nx || phi.ny != p.ny) throw std::invalid_argument("apply_operator: shape mismatch");
  return detail::apply_elliptic(p, phi, true);
}

struct CGResult {
  GridField phi;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Conjugate gradients on the SPD homogeneous operator with the Dirichlet
/// contribution moved to the right-hand side. Relative residual is measured
/// against the original affine problem. The raw CG residual is not monotone;
/// the solver keeps the best iterate seen and reports its residual, so the
/// recorded history is non-increasing.
inline CGResult solve_cg(const EllipticProblem& p, double tol, int max_iter, bool jacobi = false,
                         std::vector<double>* residual_history = nullptr) {
  p.validate();
  if (tol <= 0.0) throw std::invalid_argument("solve_cg: tol must be positive");

  GridField zero(p.nx, p.ny, p.dx, p.dy);
  const GridField bc_part = detail::apply_elliptic(p, zero, true);
  GridField b = p.rhs;
  b -= bc_part;

  GridField diag(p.nx, p.ny, p.dx, p.dy, 1.0);
  if (jacobi) {
    const double ix2 = 1.0 / (p.dx * p.dx), iy2 = 1.0 / (p.dy * p.dy);
    for (int j = 0; j < p.ny; ++j)
      for (int i = 0; i < p.nx; ++i) {
        const int il = (i + p.nx - 1) % p.nx, ir = (i + 1) % p.nx;
        const double h = p.h_coeff.at(i, j);
        const double hl = 0.5 * (h + p.h_coeff.at(il, j)), hr = 0.5 * (h + p.h_coeff.at(ir, j));
        const double hd = (j > 0) ? 0.5 * (h + p.h_coeff.at(i, j - 1)) : h;
        const double hu = (j < p.ny - 1) ? 0.5 * (h + p.h_coeff.at(i, j + 1)) : h;
        double d = p.g_coeff.at(i, j);
        d += (p.x_stencil == StencilKind::threepoint) ? (hl + hr) * ix2 : h * 2.5 * ix2;
        if (p.ny > 1) d += (hd + hu) * iy2;
        diag.at(i, j) = (d > 0.0) ? d : 1.0;
      }
  }
  auto precond = [&](const GridField& r) {
    if (!jacobi) return r;
    GridField z = r;
    for (size_t k = 0; k < z.v.size(); ++k) z.v[k] /= diag.v[k];
    return z;
  };

  const double bnorm = norm2(p.rhs);
  const double scale = (bnorm > 0.0) ? bnorm : 1.0;

  CGResult res;
  res.phi = zero;
  GridField r = b;
  GridField z = precond(r);
  GridField d = z;
  double rz = dot(r, z);
  double rnorm = norm2(r);
  res.residual = rnorm / scale;
  if (residual_history) residual_history->push_back(res.residual);
  if (res.residual <= tol) {
    res.converged = true;
    return res;
  }

  GridField phi(p.nx, p.ny, p.dx, p.dy);
  GridField best_phi = phi;
  double best_res = res.residual;
  for (int it = 1; it <= max_iter; ++it) {
    const GridField ad = detail::apply_elliptic(p, d, false);
    const double dad = dot(d, ad);
    if (dad <= 0.0) break;  // operator not SPD on this direction; give up
    const double alpha = rz / dad;
    phi += alpha * d;
    r -= alpha * ad;
    res.iterations = it;
    rnorm = norm2(r);
    if (rnorm / scale < best_res) {
      best_res = rnorm / scale;
      best_phi = phi;
    }
    res.residual = best_res;
    if (residual_history) residual_history->push_back(res.residual);
    if (res.residual <= tol) {
      res.phi = best_phi;
      res.converged = true;
      return res;
    }
    z = precond(r);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    d = z + beta * d;
  }
  res.phi = best_phi;
  return res;  // not converged: best iterate and its residual are carried along
}

/// Implicit-stage solver for diffusion: given y_star and coeff = dt*a_ii,
/// solves y/coeff - div(kappa grad y) = y_star/coeff. The Dirichlet ghost
/// rows are held at the supplied values of the transported field.
inline std::function<GridField(const GridField&, double)> stage_solver_for_diffusion(
    GridField kappa, std::vector<double> dirichlet_bottom, std::vector<double> dirichlet_top,
    double tol = 1e-10, int max_iter = 10000, std::function<void(int)> iteration_sink = nullptr,
    StencilKind x_stencil = StencilKind::threepoint) {
  return [kappa = std::move(kappa), bot = std::move(dirichlet_bottom), top = std::move(dirichlet_top),
          tol, max_iter, sink = std::move(iteration_sink), x_stencil](const GridField& y_star,
                                                                      double coeff) {
    if (coeff <= 0.0) throw std::invalid_argument("diffusion stage solver: coeff must be positive");
    EllipticProblem p;
    p.nx = y_star.nx;
    p.ny = y_star.ny;
    p.dx = y_star.dx;
    p.dy = y_star.dy;
    p.g_coeff = GridField(p.nx, p.ny, p.dx, p.dy, 1.0 / coeff);
    p.h_coeff = kappa;
    p.rhs = (1.0 / coeff) * y_star;
    p.x_stencil = x_stencil;
    p.dirichlet_bottom = bot;
    p.dirichlet_top = top;
    CGResult r = solve_cg(p, tol, max_iter, true);
    if (sink) sink(r.iterations);
    if (!r.converged)
      throw std::runtime_error("diffusion stage solve: CG did not converge, residual " +
                               std::to_string(r.residual));
    return r.phi;
  };
}

/// div(kappa grad y) with the same discretization the stage solver inverts.
inline GridField diffusion_tendency(const GridField& y, const GridField& kappa,
                                    const std::vector<double>& dirichlet_bottom,
                                    const std::vector<double>& dirichlet_top,
                                    StencilKind x_stencil = StencilKind::threepoint) {
  EllipticProblem p;
  p.nx = y.nx;
  p.ny = y.ny;
  p.dx = y.dx;
  p.dy = y.dy;
  p.g_coeff = GridField(p.nx, p.ny, p.dx, p.dy, 0.0);
  p.h_coeff = kappa;
  p.rhs = p.g_coeff;
  p.x_stencil = x_stencil;
  p.dirichlet_bottom = dirichlet_bottom;
  p.dirichlet_top = dirichlet_top;
  return -1.0 * detail::apply_elliptic(p, y, true);
}

}  // namespace ssplab
