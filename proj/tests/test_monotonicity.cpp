#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ssplab/monotonicity.hpp"

using namespace ssplab;

namespace {

double single_radius(const RKTableau& t) {
  return detail::bisect_radius([&](double r) { return am_single(t, r); }, 100.0, 1e-7);
}

}  // namespace

TEST_CASE("single-tableau radii of the explicit schemes") {
  CHECK(single_radius(builtin_plain("forward_euler")) == Catch::Approx(1.0).margin(1e-4));
  CHECK(single_radius(builtin_plain("ssprk22")) == Catch::Approx(1.0).margin(1e-4));
  CHECK(single_radius(builtin_plain("ssprk32")) == Catch::Approx(2.0).margin(1e-4));
  CHECK(single_radius(builtin_plain("ssprk33")) == Catch::Approx(1.0).margin(1e-4));
  CHECK(single_radius(builtin_plain("heun3")) == Catch::Approx(0.0).margin(1e-4));
}

TEST_CASE("per-part radii of the three additive pairs match the closed forms") {
  const double sqrt2 = std::sqrt(2.0);
  struct Row {
    const char* name;
    double re, ri;
  } rows[] = {
      {"imex_ssp2_222", 1.0, 1.0 + sqrt2},
      {"imex_ssp2_332", 2.0, 5.0 / 9 * (std::sqrt(70.0) - 4.0)},
      {"imex_ssp3_333", 1.0, 5.0 / 47 * (13.0 - 2.0 * std::sqrt(7.0))},
  };
  for (const auto& row : rows) {
    auto reg = region_numeric(builtin_additive(row.name), 0.0, 6.0, 0.5);
    CHECK(reg.radius_explicit == Catch::Approx(row.re).margin(1e-4));
    CHECK(reg.radius_implicit == Catch::Approx(row.ri).margin(1e-4));
  }
}

TEST_CASE("gamma-family implicit radius: branches, continuity, maximum") {
  CHECK(radius_implicit_gamma(0.0) == Catch::Approx(1.0));
  CHECK(radius_implicit_gamma(0.2) == Catch::Approx(2.5));
  // both branches meet at the branch point; the approach from above goes
  // with the square root of the offset
  CHECK(radius_implicit_gamma(0.25 - 1e-9) == Catch::Approx(4.0).margin(1e-6));
  CHECK(radius_implicit_gamma(0.25 + 1e-9) == Catch::Approx(4.0).margin(1e-3));
  // at the default gamma the radius is exactly 1 + sqrt(2)
  CHECK(radius_implicit_gamma(default_gamma_222) ==
        Catch::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
  // decreasing on the upper branch
  CHECK(radius_implicit_gamma(0.30) > radius_implicit_gamma(0.35));
  CHECK(radius_implicit_gamma(0.35) > radius_implicit_gamma(0.45));
  CHECK_THROWS_AS(radius_implicit_gamma(-0.1), std::invalid_argument);
}

TEST_CASE("gamma-family radius curve: closed form vs numeric at 50 gammas") {
  for (int k = 0; k < 50; ++k) {
    const double g = 0.005 + k * (0.49 / 49.0);
    const double closed = radius_implicit_gamma(g);
    const auto tab = builtin_additive("imex_ssp2_222", g);
    const double numeric = detail::bisect_radius(
        [&](double r) { return am_single(tab.implicit_part, r); }, 100.0, 1e-7);
    CHECK(numeric == Catch::Approx(closed).margin(1e-3));
  }
}

TEST_CASE("absolute monotonicity is a down-set in (r, rtilde)") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (const char* name : {"imex_ssp2_222", "imex_ssp2_332", "imex_ssp3_333"}) {
    auto t = builtin_additive(name);
    for (int k = 0; k < 60; ++k) {
      const double r = u(rng), rt = u(rng);
      if (am_at_point(t, r, rt)) {
        CHECK(am_at_point(t, 0.5 * r, rt));
        CHECK(am_at_point(t, r, 0.5 * rt));
        CHECK(am_at_point(t, 0.0, 0.0));
      }
    }
  }
}

TEST_CASE("closed-form region boundaries lie on the numeric membership edge") {
  for (const char* name : {"imex_ssp2_222", "imex_ssp2_332", "imex_ssp3_333"}) {
    auto t = builtin_additive(name);
    auto reg = region_closed_form(name);
    const double eps = 2e-3;
    int checked = 0;
    for (const auto& [r, rt] : reg.boundary) {
      if (r > reg.boundary.back().first - 1e-9) continue;  // corner point
      if (rt <= eps) continue;
      CHECK(am_at_point(t, r, rt - eps));
      CHECK_FALSE(am_at_point(t, r, rt + eps));
      ++checked;
    }
    CHECK(checked > 100);
  }
}

TEST_CASE("numeric region scan matches the closed forms within twice the step") {
  const double step = 0.02;
  for (const char* name : {"imex_ssp2_222", "imex_ssp2_332", "imex_ssp3_333"}) {
    auto t = builtin_additive(name);
    auto closed = region_closed_form(name);
    const double r_max = closed.boundary.back().first;
    auto numeric = region_numeric(t, r_max, 6.0, step);
    REQUIRE(numeric.boundary.size() > 10);
    for (const auto& [r, rt] : numeric.boundary) {
      // closed-form value at this r by linear interpolation
      const double g = r / r_max * (closed.boundary.size() - 1);
      const size_t i = std::min(static_cast<size_t>(g), closed.boundary.size() - 2);
      const double w = g - i;
      const double ref = (1 - w) * closed.boundary[i].second + w * closed.boundary[i + 1].second;
      CHECK(std::abs(rt - ref) <= 2.0 * step);
    }
  }
}

TEST_CASE("gamma-family region: phi(r) = (1-r)/(1-gamma) and the r extent") {
  // on the flat branch of the family the region reaches r = 1 exactly
  for (double g : {0.1, 0.3, default_gamma_222}) {
    auto t = builtin_additive("imex_ssp2_222", g);
    const double phi_half = (1.0 - 0.5) / (1.0 - g);
    CHECK(am_at_point(t, 0.5, phi_half - 1e-4));
    CHECK_FALSE(am_at_point(t, 0.5, phi_half + 1e-4));
    CHECK(am_at_point(t, 1.0 - 1e-6, 1e-8));
    CHECK_FALSE(am_at_point(t, 1.0 + 1e-4, 0.0));
  }
  // beyond gamma = 1/3 the extent along r shrinks to (1-2g)/g
  const double g = 0.4;
  auto t = builtin_additive("imex_ssp2_222", g);
  const double r_end = (1.0 - 2.0 * g) / g;
  CHECK(am_at_point(t, r_end - 1e-4, 0.0));
  CHECK_FALSE(am_at_point(t, r_end + 1e-4, 0.0));
}

TEST_CASE("the unmodified three-stage pair has a trivial region") {
  auto t = builtin_additive("pr_ssp2_332_original");
  CHECK(am_at_point(t, 0.0, 0.0));
  CHECK(am_at_point(t, 0.0, 1.0));
  CHECK_FALSE(am_at_point(t, 1e-3, 0.0));
  CHECK_FALSE(am_at_point(t, 0.5, 0.5));
}

TEST_CASE("region_closed_form rejects schemes without a closed form") {
  CHECK_THROWS_AS(region_closed_form("pr_ssp2_332_original"), std::invalid_argument);
  CHECK_THROWS_AS(region_closed_form("imex_ssp2_222", 0.7), std::invalid_argument);
}
