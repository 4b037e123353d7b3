#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tableau.hpp"

namespace ssplab {

/// Split right-hand side dy/dt = F(y) + G(y) with a caller-supplied solver
/// for the implicit stage equation y = y_star + coeff * G(y).
template <class State>
struct SplitSystem {
  std::function<State(const State&)> f_explicit;
  std::function<State(const State&)> g_implicit;
  std::function<State(const State&, double)> stage_solver;
};

template <class State>
struct StepRecord {
  State y_new;
  std::vector<State> stage_values;
  int f_evals = 0;
  int g_solves = 0;
};

struct StageSolveError : std::runtime_error {
  int stage;
  explicit StageSolveError(int stage_index, const std::string& what)
      : std::runtime_error("implicit stage " + std::to_string(stage_index) + ": " + what),
        stage(stage_index) {}
};

/// One step of an additive DIRK-IMEX method. Stages are computed in order;
/// the explicit field is evaluated once per stage, and G at a solved stage is
/// recovered from the stage identity instead of a fresh evaluation.
template <class State>
StepRecord<State> step(const SplitSystem<State>& sys, const AdditiveTableau& t, const State& y_old,
                       double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step: dt must be positive");
  const int s = t.stages();
  const RKTableau& ae = t.explicit_part;
  const RKTableau& ai = t.implicit_part;

  StepRecord<State> rec;
  rec.stage_values.reserve(s);
  std::vector<State> fv, gv;
  fv.reserve(s);
  gv.reserve(s);

  const bool has_g = static_cast<bool>(sys.g_implicit);
  for (int i = 0; i < s; ++i) {
    State y_star = y_old;
    for (int j = 0; j < i; ++j) {
      if (ae.A(i, j) != 0.0) y_star = y_star + (dt * ae.A(i, j)) * fv[j];
      if (has_g && ai.A(i, j) != 0.0) y_star = y_star + (dt * ai.A(i, j)) * gv[j];
    }
    State yi = y_star;
    const double diag = ai.A(i, i);
    if (has_g && diag != 0.0) {
      if (!sys.stage_solver) throw StageSolveError(i, "no stage solver supplied");
      try {
        yi = sys.stage_solver(y_star, dt * diag);
      } catch (const std::exception& e) {
        throw StageSolveError(i, e.what());
      }
      ++rec.g_solves;
      gv.push_back((1.0 / (dt * diag)) * (yi - y_star));
    } else if (has_g) {
      gv.push_back(sys.g_implicit(yi));
    }
    fv.push_back(sys.f_explicit(yi));
    ++rec.f_evals;
    rec.stage_values.push_back(yi);
  }

  State y_new = y_old;
  for (int j = 0; j < s; ++j) {
    if (ae.b[j] != 0.0) y_new = y_new + (dt * ae.b[j]) * fv[j];
    if (has_g && ai.b[j] != 0.0) y_new = y_new + (dt * ai.b[j]) * gv[j];
  }
  rec.y_new = std::move(y_new);
  return rec;
}

/// Plain explicit stepping as the degenerate case: the whole right-hand side
/// lives in f_explicit.
template <class State>
StepRecord<State> step(const SplitSystem<State>& sys, const RKTableau& t, const State& y_old,
                       double dt) {
  AdditiveTableau at;
  at.explicit_part = t;
  at.implicit_part.stages = t.stages;
  at.implicit_part.a.assign(static_cast<size_t>(t.stages) * t.stages, 0.0);
  at.implicit_part.b.assign(static_cast<size_t>(t.stages), 0.0);
  at.implicit_part.b[0] = 1.0;  // weights unused: g_implicit is dropped below
  SplitSystem<State> explicit_only{sys.f_explicit, nullptr, nullptr};
  return step(explicit_only, at, y_old, dt);
}

template <class State, class Tableau>
State integrate(const SplitSystem<State>& sys, const Tableau& t, State y, double t_end, double dt) {
  if (dt <= 0.0 || t_end < 0.0) throw std::invalid_argument("integrate: bad dt or t_end");
  double time = 0.0;
  while (time < t_end * (1.0 - 1e-15)) {
    const double h = std::min(dt, t_end - time);
    y = step(sys, t, y, h).y_new;
    time += h;
  }
  return y;
}

template <class State>
State integrate(const SplitSystem<State>& sys, const AnyTableau& t, State y, double t_end, double dt) {
  return std::visit([&](const auto& tab) { return integrate(sys, tab, std::move(y), t_end, dt); }, t);
}

/// Safeguarded scalar Newton for stage equations y = y_star + c*G(y).
/// Falls back to bisection steps when Newton leaves the bracket.
inline double scalar_stage_newton(const std::function<double(double)>& g,
                                  const std::function<double(double)>& dg, double y_star, double c,
                                  double tol = 1e-14, int max_iter = 50) {
  auto res = [&](double y) { return y - y_star - c * g(y); };
  double y = y_star;
  // bracket the root nearest to y_star: march in the direction that raises
  // the residual toward a sign change
  double lo = y_star, hi = y_star;
  {
    const double r0 = res(y_star);
    double w = 1e-3 * std::max(1.0, std::abs(y_star));
    if (r0 < 0.0) {
      while (res(hi) < 0.0) {
        hi += w;
        w *= 1.7;
        if (w > 1e12) throw std::runtime_error("stage solve: failed to bracket root");
      }
    } else if (r0 > 0.0) {
      while (res(lo) > 0.0) {
        lo -= w;
        w *= 1.7;
        if (w > 1e12) throw std::runtime_error("stage solve: failed to bracket root");
      }
    } else {
      return y_star;
    }
  }
  if (res(lo) > 0.0) std::swap(lo, hi);

  for (int it = 0; it < max_iter; ++it) {
    const double f = res(y);
    if (std::abs(f) <= tol * std::max(1.0, std::abs(y))) return y;
    const double d = 1.0 - c * dg(y);
    double y_next = (d != 0.0) ? y - f / d : 0.5 * (lo + hi);
    if (y_next <= std::min(lo, hi) || y_next >= std::max(lo, hi)) y_next = 0.5 * (lo + hi);
    (res(y_next) < 0.0 ? lo : hi) = y_next;
    y = y_next;
  }
  if (std::abs(res(y)) > 1e-10) throw std::runtime_error("stage solve: Newton did not converge");
  return y;
}

}  // namespace ssplab
