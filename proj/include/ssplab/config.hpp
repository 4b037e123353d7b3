#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "advdiff.hpp"
#include "tableau.hpp"

namespace ssplab {

/// key = value simulation config; '#' starts a comment.
struct SimConfig {
  int nx = 64, ny = 1;
  double Lx = 1.0, Ly = 1.0;
  double kappa_T = 1.0, kappa_c = 1.0;
  double courant_c = 0.2, courant_T = 0.2, courant_visc = 0.2, courant_fluid = 0.2;
  double eta_over_rho = 0.0, gravity = 0.0;
  std::string scheme = "imex_ssp2_222";
  std::optional<double> gamma;
  std::string stencil = "threepoint";
  std::string advect = "upwind1";
  std::string init = "gaussian";  // gaussian | step | sawtooth
  double u0 = 0.0;                // uniform horizontal velocity
  double t_end = 0.1;
  bool controller = true;
  double dt_init = 0.0;    // absolute; 0 means derive from dt_factor
  double dt_factor = 0.0;  // multiple of the fully explicit limit; 0 means default start
  int snapshot_every = 0;
  unsigned seed = 0;
  double perturb_amp = 0.0;
  bool scan_vertical = false;
  double bc_T_bottom = 0.0, bc_T_top = 0.0, bc_c_bottom = 0.0, bc_c_top = 0.0;
  int max_steps = 2000000;
};

namespace detail {

inline bool parse_bool(const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean value '" + v + "'");
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline SimConfig parse_sim_config(std::istream& in) {
  SimConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    try {
      if (key == "nx") c.nx = std::stoi(val);
      else if (key == "ny") c.ny = std::stoi(val);
      else if (key == "Lx") c.Lx = std::stod(val);
      else if (key == "Ly") c.Ly = std::stod(val);
      else if (key == "kappa_T") c.kappa_T = std::stod(val);
      else if (key == "kappa_c") c.kappa_c = std::stod(val);
      else if (key == "courant_c") c.courant_c = std::stod(val);
      else if (key == "courant_T") c.courant_T = std::stod(val);
      else if (key == "courant_visc") c.courant_visc = std::stod(val);
      else if (key == "courant_fluid") c.courant_fluid = std::stod(val);
      else if (key == "eta_over_rho") c.eta_over_rho = std::stod(val);
      else if (key == "gravity") c.gravity = std::stod(val);
      else if (key == "scheme") c.scheme = val;
      else if (key == "gamma") c.gamma = std::stod(val);
      else if (key == "stencil") c.stencil = val;
      else if (key == "advect") c.advect = val;
      else if (key == "init") c.init = val;
      else if (key == "u0") c.u0 = std::stod(val);
      else if (key == "t_end") c.t_end = std::stod(val);
      else if (key == "controller") c.controller = detail::parse_bool(val);
      else if (key == "dt_init") c.dt_init = std::stod(val);
      else if (key == "dt_factor") c.dt_factor = std::stod(val);
      else if (key == "snapshot_every") c.snapshot_every = std::stoi(val);
      else if (key == "seed") c.seed = static_cast<unsigned>(std::stoul(val));
      else if (key == "perturb_amp") c.perturb_amp = std::stod(val);
      else if (key == "scan_vertical") c.scan_vertical = detail::parse_bool(val);
      else if (key == "bc_T_bottom") c.bc_T_bottom = std::stod(val);
      else if (key == "bc_T_top") c.bc_T_top = std::stod(val);
      else if (key == "bc_c_bottom") c.bc_c_bottom = std::stod(val);
      else if (key == "bc_c_top") c.bc_c_top = std::stod(val);
      else if (key == "max_steps") c.max_steps = std::stoi(val);
      else throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad value '" + val + "'");
    }
  }
  return c;
}

inline SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse_sim_config(in);
}

/// Builds the transport problem the config describes: fields, prescribed
/// velocity, Dirichlet rows, optional seeded perturbation.
inline TransportProblem build_problem(const SimConfig& c) {
  if (c.nx <= 0 || c.ny <= 0 || c.Lx <= 0.0 || c.Ly <= 0.0)
    throw std::invalid_argument("config: bad grid dimensions");
  const double dx = c.Lx / c.nx, dy = c.Ly / c.ny;
  TransportProblem p;
  p.fields.T = GridField(c.nx, c.ny, dx, dy);
  p.fields.c = GridField(c.nx, c.ny, dx, dy);
  p.vel_u = GridField(c.nx, c.ny, dx, dy, c.u0);
  p.vel_v = GridField(c.nx, c.ny, dx, dy, 0.0);
  p.kappa_T = c.kappa_T;
  p.kappa_c = c.kappa_c;
  p.courant = {c.courant_c, c.courant_T, c.courant_visc, c.courant_fluid};
  p.eta_over_rho = c.eta_over_rho;
  p.gravity = c.gravity;
  if (c.ny > 1) {
    p.T_bottom.assign(c.nx, c.bc_T_bottom);
    p.T_top.assign(c.nx, c.bc_T_top);
    p.c_bottom.assign(c.nx, c.bc_c_bottom);
    p.c_top.assign(c.nx, c.bc_c_top);
  }

  for (int j = 0; j < c.ny; ++j)
    for (int i = 0; i < c.nx; ++i) {
      const double x = p.fields.T.x_of(i), y = p.fields.T.y_of(j);
      double v;
      if (c.init == "gaussian") {
        const double rx = (x - 0.5 * c.Lx) / (0.1 * c.Lx);
        const double ry = (c.ny > 1) ? (y - 0.5 * c.Ly) / (0.1 * c.Ly) : 0.0;
        v = std::exp(-0.5 * (rx * rx + ry * ry));
      } else if (c.init == "step") {
        v = (x > 0.25 * c.Lx && x < 0.75 * c.Lx) ? 1.0 : 0.0;
      } else if (c.init == "sawtooth") {
        v = 0.5 + 0.5 * ((i % 2 == 0) ? 1.0 : -1.0);
      } else {
        throw std::invalid_argument("config: unknown init '" + c.init + "'");
      }
      p.fields.T.at(i, j) = v;
      p.fields.c.at(i, j) = v;
    }

  if (c.perturb_amp > 0.0) {
    std::mt19937 rng(c.seed);
    std::uniform_real_distribution<double> u(-c.perturb_amp, c.perturb_amp);
    for (double& x : p.fields.T.v) x += u(rng);
    for (double& x : p.fields.c.v) x += u(rng);
  }
  return p;
}

inline SimControl build_control(const SimConfig& c, const TransportProblem& p) {
  SimControl ctl;
  ctl.t_end = c.t_end;
  ctl.controller_on = c.controller;
  ctl.max_steps = c.max_steps;
  ctl.scan_vertical = c.scan_vertical;
  ctl.snapshot_every = c.snapshot_every;
  if (c.dt_init > 0.0)
    ctl.dt_init = c.dt_init;
  else if (c.dt_factor > 0.0)
    ctl.dt_init = c.dt_factor * explicit_dt_limit(p).dt;
  return ctl;
}

}  // namespace ssplab
