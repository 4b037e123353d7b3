#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ssplab/accuracy.hpp"
#include "ssplab/advdiff.hpp"
#include "ssplab/config.hpp"
#include "ssplab/linear_analysis.hpp"
#include "ssplab/monotonicity.hpp"
#include "ssplab/tableau.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct GammaRange {
  double lo = 0.0, hi = 0.0, step = 0.0;
  bool set = false;
};

GammaRange parse_gamma_range(const std::string& text) {
  GammaRange r;
  const auto c1 = text.find(':');
  const auto c2 = text.rfind(':');
  if (c1 == std::string::npos || c2 == c1)
    throw CLI::ValidationError("--gamma-range", "expected lo:hi:step");
  r.lo = std::stod(text.substr(0, c1));
  r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  r.step = std::stod(text.substr(c2 + 1));
  if (r.step <= 0.0 || r.lo > r.hi)
    throw CLI::ValidationError("--gamma-range", "need lo <= hi and step > 0");
  r.set = true;
  return r;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open output file: " + p.string());
  f.precision(12);
  return f;
}

int nominal_order(const std::string& scheme) {
  if (scheme == "forward_euler") return 1;
  if (scheme == "ssprk33" || scheme == "heun3" || scheme == "imex_ssp3_333") return 3;
  return 2;
}

std::string scheme_tag(const std::string& scheme, std::optional<double> gamma) {
  if (!gamma) return scheme;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_g%.4f", scheme.c_str(), *gamma);
  return buf;
}

json stability_entry(const ssplab::AnyTableau& tab, int resolution, const fs::path& out_dir,
                     const std::string& tag) {
  const auto rep = ssplab::scan_stability_region(tab, resolution);
  auto csv = open_out(out_dir / (tag + "_boundary.csv"));
  csv << "re,im\n";
  for (const auto& z : rep.boundary) csv << z.real() << "," << z.imag() << "\n";
  json j;
  j["scheme"] = tag;
  if (rep.z_left)
    j["z_left"] = *rep.z_left;
  else
    j["z_left"] = "unbounded";
  j["limit_at_minus_infinity"] = ssplab::limit_class_name(rep.limit_at_minus_infinity);
  return j;
}

int cmd_stability(const std::vector<std::string>& schemes, std::optional<double> gamma,
                  const GammaRange& grange, int resolution, const fs::path& out_dir) {
  json summary = json::array();
  for (const auto& name : schemes) {
    if (grange.set) {
      if (name != "imex_ssp2_222") {
        std::cerr << "gamma-range only applies to imex_ssp2_222\n";
        return kExitUsage;
      }
      for (double g = grange.lo; g <= grange.hi + 0.5 * grange.step; g += grange.step)
        summary.push_back(
            stability_entry(ssplab::builtin(name, g), resolution, out_dir, scheme_tag(name, g)));
    } else {
      const auto tab = (name == "imex_ssp2_222" && gamma) ? ssplab::builtin(name, gamma)
                                                          : ssplab::builtin(name);
      summary.push_back(stability_entry(tab, resolution, out_dir,
                                        scheme_tag(name, name == "imex_ssp2_222" ? gamma
                                                                                 : std::nullopt)));
    }
  }
  open_out(out_dir / "stability_summary.json") << summary.dump(2) << "\n";
  return 0;
}

int cmd_dissipativity(const std::vector<std::string>& schemes,
                      const std::vector<std::string>& stencils, std::optional<double> gamma,
                      const std::string& part, const fs::path& out_path) {
  json rows = json::array();
  for (const auto& name : schemes) {
    const auto any =
        (name == "imex_ssp2_222" && gamma) ? ssplab::builtin(name, gamma) : ssplab::builtin(name);
    ssplab::RKTableau tab;
    if (const auto* at = std::get_if<ssplab::AdditiveTableau>(&any))
      tab = (part == "explicit") ? at->explicit_part : at->implicit_part;
    else
      tab = std::get<ssplab::RKTableau>(any);
    for (const auto& sname : stencils) {
      const auto stencil = ssplab::stencil_from_name(sname);
      const auto lm = ssplab::locate_dissipativity_landmarks(tab, stencil);
      json r;
      r["scheme"] = scheme_tag(name, name == "imex_ssp2_222" ? gamma : std::nullopt);
      r["part"] = std::holds_alternative<ssplab::AdditiveTableau>(any) ? part : "whole";
      r["stencil"] = sname;
      r["first_zero"] = lm.first_zero ? json(*lm.first_zero) : json(nullptr);
      r["unit_modulus"] = lm.unit_modulus ? json(*lm.unit_modulus) : json(nullptr);
      rows.push_back(r);
    }
  }
  open_out(out_path) << rows.dump(2) << "\n";
  return 0;
}

int cmd_monotonicity(const std::string& scheme, std::optional<double> gamma, const std::string& mode,
                     double step, const fs::path& out_dir) {
  const auto tag = scheme_tag(scheme, scheme == "imex_ssp2_222" ? gamma : std::nullopt);
  ssplab::MonotonicityRegion reg;
  if (mode == "closed") {
    reg = ssplab::region_closed_form(scheme, gamma);
  } else {
    const auto tab = ssplab::builtin_additive(scheme, scheme == "imex_ssp2_222" ? gamma
                                                                                : std::nullopt);
    reg = ssplab::region_numeric(tab, 3.0, 6.0, step);
  }
  auto csv = open_out(out_dir / (tag + "_region.csv"));
  csv << "r,rtilde\n";
  for (const auto& [r, rt] : reg.boundary) csv << r << "," << rt << "\n";
  json j;
  j["scheme"] = tag;
  j["mode"] = mode;
  j["radius_explicit"] = reg.radius_explicit;
  j["radius_implicit"] = reg.radius_implicit;
  open_out(out_dir / (tag + "_radii.json")) << j.dump(2) << "\n";
  return 0;
}

int cmd_convergence(const std::vector<std::string>& schemes, std::optional<double> gamma,
                    const fs::path& out_dir) {
  json summary = json::array();
  auto csv = open_out(out_dir / "convergence.csv");
  csv << "scheme,gamma,dt,error\n";
  for (const auto& name : schemes) {
    const auto g = (name == "imex_ssp2_222") ? gamma : std::nullopt;
    const auto tab = g ? ssplab::builtin(name, g) : ssplab::builtin(name);
    const auto rep = ssplab::fit_error_constant(tab, nominal_order(name), scheme_tag(name, g));
    for (size_t i = 0; i < rep.step_sizes.size(); ++i)
      csv << rep.scheme << "," << (g ? std::to_string(*g) : "") << "," << rep.step_sizes[i] << ","
          << rep.errors[i] << "\n";
    json j;
    j["scheme"] = rep.scheme;
    j["nominal_order"] = rep.nominal_order;
    j["fitted_order"] = rep.fitted_order;
    j["fitted_constant"] = rep.fitted_constant;
    j["fit_residual"] = rep.fit_residual;
    j["valid"] = rep.valid;
    summary.push_back(j);
    if (!rep.valid) {
      open_out(out_dir / "convergence_summary.json") << summary.dump(2) << "\n";
      std::cerr << "fitted order for " << rep.scheme << " deviates from nominal\n";
      return kExitNumerical;
    }
  }
  open_out(out_dir / "convergence_summary.json") << summary.dump(2) << "\n";
  return 0;
}

int cmd_gamma_sweep(const GammaRange& grange, const fs::path& out_path) {
  const auto pts = grange.set ? ssplab::gamma_sweep(grange.lo, grange.hi, grange.step)
                              : ssplab::gamma_sweep();
  auto csv = open_out(out_path);
  csv << "gamma,constant,fitted_order\n";
  for (const auto& p : pts) csv << p.gamma << "," << p.constant << "," << p.fitted_order << "\n";
  return 0;
}

void write_snapshot(const fs::path& path, const ssplab::GridField& f) {
  auto out = open_out(path);
  out << "# nx " << f.nx << " ny " << f.ny << " dx " << f.dx << " dy " << f.dy << "\n";
  out << "i,j,value\n";
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) out << i << "," << j << "," << f.at(i, j) << "\n";
}

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir,
                 std::optional<unsigned> seed) {
  ssplab::SimConfig cfg = ssplab::load_sim_config(config_path.string());
  if (seed) cfg.seed = *seed;
  const auto problem = ssplab::build_problem(cfg);
  auto ctl = ssplab::build_control(cfg, problem);
  const auto tab = ssplab::builtin(cfg.scheme, cfg.scheme == "imex_ssp2_222" ? cfg.gamma
                                                                             : std::nullopt);
  const auto stencil = ssplab::stencil_from_name(cfg.stencil);
  const auto advect = ssplab::advect_from_name(cfg.advect);

  fs::create_directories(out_dir);
  if (ctl.snapshot_every > 0)
    ctl.snapshot_sink = [&](int n, double, const ssplab::ScalarPair& s) {
      write_snapshot(out_dir / ("snapshot_T_" + std::to_string(n) + ".csv"), s.T);
      write_snapshot(out_dir / ("snapshot_c_" + std::to_string(n) + ".csv"), s.c);
    };

  const auto result = ssplab::run_simulation(problem, tab, stencil, advect, ctl);

  auto csv = open_out(out_dir / "trajectory.csv");
  csv << "step,time,dt,osc_count,cg_iters,tv_T,tv_c,min_c,max_c\n";
  for (const auto& r : result.rows)
    csv << r.step << "," << r.time << "," << r.dt << "," << r.osc_count << "," << r.cg_iters << ","
        << r.tv_T << "," << r.tv_c << "," << r.min_c << "," << r.max_c << "\n";
  write_snapshot(out_dir / "final_T.csv", result.final_state.T);
  write_snapshot(out_dir / "final_c.csv", result.final_state.c);

  if (!result.ok) {
    json diag;
    diag["error"] = result.message;
    diag["steps_completed"] = result.rows.size();
    open_out(out_dir / "failure.json") << diag.dump(2) << "\n";
    std::cerr << "simulation failed: " << result.message << "\n";
    return kExitNumerical;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SSP/IMEX Runge-Kutta analysis and advection-diffusion lab"};
  app.require_subcommand(1);

  std::vector<std::string> schemes;
  std::vector<std::string> stencils{"threepoint", "fourthorder"};
  std::optional<double> gamma;
  std::string gamma_range_text, mode = "numeric", part = "implicit";
  int resolution = 256;
  double step = 0.01;
  std::string out = "out";
  std::string config_path;
  std::optional<unsigned> seed;

  auto add_common = [&](CLI::App* sub, bool need_scheme) {
    if (need_scheme)
      sub->add_option("--scheme", schemes, "builtin scheme name(s)")->required();
    sub->add_option("--gamma", gamma, "gamma for imex_ssp2_222");
    sub->add_option("--out", out, "output file or directory");
  };

  auto* st = app.add_subcommand("stability", "stability-region boundaries and z_left");
  add_common(st, true);
  st->add_option("--gamma-range", gamma_range_text, "lo:hi:step sweep for imex_ssp2_222");
  st->add_option("--resolution", resolution, "grid resolution of the scan");

  auto* di = app.add_subcommand("dissipativity", "amplification landmarks at theta = pi");
  add_common(di, true);
  di->add_option("--stencil", stencils, "stencil name(s)");
  di->add_option("--part", part, "implicit|explicit part of additive schemes");

  auto* mo = app.add_subcommand("monotonicity", "region of absolute monotonicity");
  add_common(mo, true);
  mo->add_option("--mode", mode, "closed|numeric");
  mo->add_option("--step", step, "scan step for numeric mode");

  auto* co = app.add_subcommand("convergence", "error constants on the nonlinear test problem");
  add_common(co, true);

  auto* gs = app.add_subcommand("gamma-sweep", "error constant vs gamma for the two-stage pair");
  gs->add_option("--gamma-range", gamma_range_text, "lo:hi:step");
  gs->add_option("--out", out, "output CSV path");

  auto* si = app.add_subcommand("simulate", "run an advection-diffusion experiment");
  si->add_option("--config", config_path, "key = value config file")->required();
  si->add_option("--out", out, "output directory");
  si->add_option("--seed", seed, "override the config perturbation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    GammaRange grange;
    if (!gamma_range_text.empty()) grange = parse_gamma_range(gamma_range_text);
    if (st->parsed()) return cmd_stability(schemes, gamma, grange, resolution, out);
    if (di->parsed()) {
      if (part != "implicit" && part != "explicit") {
        std::cerr << "--part must be implicit or explicit\n";
        return kExitUsage;
      }
      return cmd_dissipativity(schemes, stencils, gamma, part, out);
    }
    if (mo->parsed()) {
      if (schemes.size() != 1) {
        std::cerr << "monotonicity takes exactly one --scheme\n";
        return kExitUsage;
      }
      return cmd_monotonicity(schemes[0], gamma, mode, step, out);
    }
    if (co->parsed()) return cmd_convergence(schemes, gamma, out);
    if (gs->parsed()) return cmd_gamma_sweep(grange, out);
    if (si->parsed()) return cmd_simulate(config_path, out, seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
