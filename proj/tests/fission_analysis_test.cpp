#include <cmath>

#include "doctest.h"
#include "ragdepth/errors.hpp"
#include "ragdepth/fission/analysis.hpp"
#include "ragdepth/random.hpp"

using namespace ragdepth;
using namespace ragdepth::fission;

namespace {

// Independent transcription of f used as the oracle below.
double f_oracle(double t, double p, double q, int n) {
  const double qn = std::pow(q, n);
  return (qn - p * qn) * (std::pow(q, -n * t) - 1.0 + t) + p;
}

RecurrenceParams random_params(Rng& rng) {
  return {rng.uniform() * 0.999, 0.01 + 0.98 * rng.uniform(), 1 + static_cast<int>(rng.index(24))};
}

}  // namespace

TEST_CASE("f spot values") {
  CHECK(eval_f(0.0, {0.3, 0.5, 4}) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(eval_f(1.0, {0.3, 0.5, 4}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(eval_f(0.5, {0.2, 0.5, 8}) - 0.24844) < 1e-5);
  CHECK(eval_f(0.5, {0.2, 0.5, 8}) == doctest::Approx(f_oracle(0.5, 0.2, 0.5, 8)).epsilon(1e-14));
  CHECK(eval_g(0.0, {0.3, 0.5, 4}) == doctest::Approx(0.3));
  CHECK(std::abs(eval_g(1.0, {0.3, 0.5, 4})) < 1e-14);
}

TEST_CASE("f endpoints, monotonicity and g' against finite differences") {
  Rng rng(21);
  for (int k = 0; k < 300; ++k) {
    const auto prm = random_params(rng);
    CAPTURE(prm.p);
    CAPTURE(prm.q);
    CAPTURE(prm.n);
    CHECK(std::abs(eval_f(0.0, prm) - prm.p) < 1e-12);
    CHECK(std::abs(eval_f(1.0, prm) - 1.0) < 1e-12);
    double prev = eval_f(0.0, prm);
    for (int i = 1; i <= 50; ++i) {
      const double v = eval_f(i / 50.0, prm);
      CHECK(v >= prev);
      const double t = i / 50.0;
      const double fp = (1 - prm.p) * std::pow(prm.q, prm.n) *
                        (1 - prm.n * std::log(prm.q) * std::pow(prm.q, -prm.n * t));
      CHECK(fp > 0.0);
      prev = v;
    }
    const double t = 0.05 + 0.9 * rng.uniform();
    const double h = 1e-6;
    const double fd = (eval_g(t + h, prm) - eval_g(t - h, prm)) / (2 * h);
    const double an = eval_g_prime(t, prm);
    CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("critical point") {
  const auto c = critical_point({0.3, 0.5, 4});
  REQUIRE(c.has_value());
  CHECK(std::abs(*c - 0.7446) < 1e-4);
  CHECK(std::abs(eval_g_prime(*c, {0.3, 0.5, 4})) < 1e-9);
  const auto c2 = critical_point({0.1, 0.2, 8});
  REQUIRE(c2.has_value());
  CHECK(*c2 > 0.0);
  CHECK(*c2 < 1.0);
  CHECK(std::abs(eval_g_prime(*c2, {0.1, 0.2, 8})) < 1e-9);
  // Finite-difference oracle: g is flat at t*.
  const double h = 1e-5;
  CHECK(std::abs(eval_g(*c + h, {0.3, 0.5, 4}) - eval_g(*c - h, {0.3, 0.5, 4})) < 1e-9);
}

TEST_CASE("threshold h") {
  CHECK(std::abs(threshold_h(0.1, 2) - 0.78333) < 1e-5);
  CHECK(std::abs(threshold_h(0.8, 16) - 0.7221) < 1e-4);
  CHECK(std::abs(threshold_h(0.45, 9) - 0.861) < 0.005);
  const double near_one = threshold_h(1.0 - 1e-7, 2);
  CHECK(near_one > -1e-12);
  CHECK(near_one < 1e-6);
  CHECK_THROWS_AS(threshold_h(1.0, 2), DomainError);
  CHECK_THROWS_AS(threshold_h(0.5, 0), DomainError);
}

TEST_CASE("first zero") {
  const auto r = first_zero({0.3, 0.5, 4});
  REQUIRE(r.has_fixed_point);
  REQUIRE(r.t_hat.has_value());
  CHECK(std::abs(*r.t_hat - 0.411) < 1e-3);
  CHECK(std::abs(eval_g(*r.t_hat, {0.3, 0.5, 4})) <= 1e-10);
  CHECK(r.negative_beyond);

  const auto d = first_zero({0.0, 0.5, 4});
  CHECK(d.degenerate);
  REQUIRE(d.t_hat.has_value());
  CHECK(*d.t_hat == 0.0);

  const auto e = first_zero({0.75, 0.1, 2});
  REQUIRE(e.has_fixed_point);
  CHECK(*e.t_hat > 0.0);
  CHECK(*e.t_hat < 1.0);

  const auto none = first_zero({0.8, 0.5, 4});
  CHECK_FALSE(none.has_fixed_point);
  CHECK(first_zero_or_one({0.8, 0.5, 4}) == 1.0);
  CHECK_THROWS_AS(first_zero({0.3, 0.5, 4}, 0.0), DomainError);
}

TEST_CASE("fixed point exists exactly below the threshold") {
  Rng rng(5);
  int below = 0;
  int above = 0;
  while (below < 200 || above < 200) {
    const auto prm = random_params(rng);
    if (prm.p == 0.0) continue;
    const double h = threshold_h(prm.q, prm.n);
    const auto r = first_zero(prm);
    if (prm.p < h) {
      if (below >= 200) continue;
      ++below;
      REQUIRE(r.has_fixed_point);
      CHECK(*r.t_hat > 0.0);
      CHECK(*r.t_hat < 1.0);
      CHECK(std::abs(eval_g(*r.t_hat, prm)) <= 1e-10);
      for (int i = 1; i < 100; ++i) {
        const double t = *r.t_hat + (1.0 - *r.t_hat) * i / 100.0;
        CHECK(eval_g(t, prm) < 0.0);
      }
    } else {
      if (above >= 200) continue;
      ++above;
      CHECK_FALSE(r.has_fixed_point);
      for (int i = 0; i <= 100; ++i) CHECK(eval_g(i / 100.0, prm) >= -1e-9);
    }
  }
}

TEST_CASE("layer erasure requirement") {
  const auto r = erase_layer_requirement(0.9, 0.5, 4);
  CHECK(std::abs(r.p_exact - 0.6345) < 1e-3);
  CHECK(std::abs(r.p_approx - 0.6259) < 1e-3);
  // As delta -> 1 the exact requirement tends to h(q, n), not to 1.
  const auto near_sure = erase_layer_requirement(1.0 - 1e-9, 0.5, 4);
  CHECK(near_sure.epsilon < 1e-6);
  CHECK(std::abs(near_sure.p_exact - threshold_h(0.5, 4)) < 1e-6);
  CHECK(near_sure.p_exact > r.p_exact);
  const auto wide = erase_layer_requirement(0.5, 0.8, 16);
  CHECK(wide.p_exact >= wide.p_approx - 0.02);
  CHECK_THROWS_AS(erase_layer_requirement(1.0, 0.5, 4), DomainError);

  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    const double q = 0.05 + 0.9 * rng.uniform();
    const int n = 1 + static_cast<int>(rng.index(20));
    double prev_exact = 2.0;
    double prev_approx = 2.0;
    for (int i = 1; i < 50; ++i) {
      const double eps = i / 50.0;
      const double pe = required_p_exact_from_epsilon(eps, q, n);
      const double pa = required_p_approx_from_epsilon(eps, q, n);
      CHECK(pe < prev_exact);
      CHECK(pa < prev_approx);
      prev_exact = pe;
      prev_approx = pa;
    }
  }
}

TEST_CASE("coupled grid") {
  const auto grid = coupled_grid(15);
  REQUIRE(grid.size() == 15);
  CHECK(grid.front().n == 2);
  CHECK(grid.front().q == doctest::Approx(0.1));
  CHECK(grid.back().n == 16);
  CHECK(grid.back().q == doctest::Approx(0.8));
  double lowest = 2.0;
  GridPoint at{};
  for (const auto& g : grid) {
    const double h = threshold_h(g.q, g.n);
    if (h < lowest) {
      lowest = h;
      at = g;
    }
    if (g.n == 9) CHECK(g.q == doctest::Approx(0.45));
  }
  CHECK(std::abs(lowest - 0.722) < 0.005);
  CHECK(at.n == 16);
  CHECK_THROWS(coupled_grid(1));
}

TEST_CASE("curves") {
  CurveConfig cfg;
  const auto fvt = figure_curves(CurveKind::FVsT, cfg);
  REQUIRE(fvt.rows.size() == 101);
  const double t_hat = *first_zero(cfg.params).t_hat;
  // The first sign change of f - t brackets t_hat.
  for (std::size_t i = 1; i < fvt.rows.size(); ++i) {
    const double a = fvt.number(i - 1, "f_t") - fvt.number(i - 1, "t");
    const double b = fvt.number(i, "f_t") - fvt.number(i, "t");
    if (a > 0 && b <= 0) {
      CHECK(fvt.number(i - 1, "t") <= t_hat);
      CHECK(fvt.number(i, "t") >= t_hat);
      break;
    }
  }

  // Over the wide bottom layers (n >= 10) the requirement falls toward layer 0;
  // the narrow, densely wired top layers bend the curve back down.
  for (double delta : {0.5, 0.9}) {
    cfg.deltas = {delta};
    const auto by_layer = figure_curves(CurveKind::ThresholdByLayer, cfg);
    REQUIRE(by_layer.rows.size() == 10);
    for (std::size_t i = 1; i < by_layer.rows.size(); ++i) {
      if (by_layer.number(i, "n") < 10) break;
      CHECK(by_layer.number(i, "p_exact") > by_layer.number(i - 1, "p_exact"));
    }
  }
  cfg.layers = 1;
  CHECK(figure_curves(CurveKind::ThresholdByLayer, cfg).rows.size() == 1);
}

TEST_CASE("depth budget") {
  const auto tie = depth_budget(0.5, 3, 6);
  CHECK(tie.cutoff_layer == doctest::Approx(6));
  CHECK(tie.extract_depth == doctest::Approx(6));
  CHECK(tie.tie);
  CHECK_FALSE(tie.extraction_beneficial);
  const auto cheap = depth_budget(0.5, 0, 4);
  CHECK(cheap.extract_depth == doctest::Approx(2));
  CHECK(cheap.extraction_beneficial);
  const auto costly = depth_budget(0.8, 2, 5);
  CHECK(costly.extract_depth == doctest::Approx(6));
  CHECK_FALSE(costly.extraction_beneficial);
  CHECK_FALSE(costly.tie);
  CHECK_THROWS_AS(depth_budget(1.0, 1, 1), DomainError);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(eval_f(0.5, {1.5, 0.5, 4}), DomainError);
  CHECK_THROWS_AS(eval_f(1.5, {0.3, 0.5, 4}), DomainError);
  CHECK_THROWS_AS(eval_f(0.5, {0.3, 0.0, 4}), DomainError);
  CHECK_THROWS_AS(eval_f(0.5, {0.3, 0.5, 0}), DomainError);
}
