#include <cmath>

#include "doctest.h"
#include "ragdepth/bounds.hpp"
#include "ragdepth/errors.hpp"
#include "ragdepth/random.hpp"

using namespace ragdepth;
using namespace ragdepth::bounds;

TEST_CASE("Fano lower bound") {
  CHECK(fano_error_lower(8, 5).value == doctest::Approx(0.25).epsilon(1e-12));
  const auto perfect = fano_error_lower(8, 8);
  CHECK(perfect.value == 0.0);
  CHECK(perfect.raw < 0.0);
  const auto one_bit = fano_error_lower(1, 0);
  CHECK(one_bit.value == 0.0);
  CHECK(one_bit.raw == 0.0);
  CHECK_THROWS_AS(fano_error_lower(8, 9), DomainError);
}

TEST_CASE("distraction fraction") {
  CHECK(distraction_fraction(0.5, 0.25) == doctest::Approx(0.25));
  CHECK(distraction_fraction(1.0, 0.3) == 0.0);
  CHECK(distraction_fraction(1.0, 0.0) == 0.0);
  for (double d : {0.1, 0.4, 0.9}) CHECK(distraction_fraction(d, 0.5) == doctest::Approx(1 - d));
  CHECK_THROWS_AS(distraction_fraction(0.0, 0.5), DomainError);
}

TEST_CASE("composition with the Fano bound gives the closed form") {
  Rng rng(12);
  int checked = 0;
  while (checked < 500) {
    const double H = 1.5 + 20 * rng.uniform();
    const double I = rng.uniform() * H;
    const double delta = 0.01 + 0.99 * rng.uniform();
    const auto pe = fano_error_lower(H, I);
    if (pe.raw <= 0.0 || pe.raw >= 1.0) continue;
    ++checked;
    const double two_step = distraction_fraction(delta, pe.value);
    const double direct = distraction_lower_bound(delta, H, I);
    CHECK(std::abs(two_step - direct) < 1e-12);
  }
}

TEST_CASE("noise impact bound") {
  BoundInputs in;
  in.H_w = 7;
  in.I_wz = 3;
  in.H_Zr = 10;
  in.delta = 0.5;
  CHECK(std::abs(noise_impact_bound(in) - 3.1623) < 1e-4);
  in.c2 = 0.7;
  in.delta = 1.0;
  CHECK(noise_impact_bound(in) == doctest::Approx(0.7));
  in.delta = 0.3;
  in.H_Zr = 0;
  CHECK(noise_impact_bound(in) == doctest::Approx(0.7));

  BoundInputs base;
  base.H_w = 12;
  base.H_Zr = 6;
  for (int i = 0; i < 10; ++i) {
    BoundInputs a = base;
    a.I_wz = i;
    double prev = 1e300;
    for (int k = 1; k < 40; ++k) {
      a.delta = k / 40.0;
      const double v = noise_impact_bound(a);
      CHECK(v < prev);
      prev = v;
    }
  }
  for (int k = 1; k < 10; ++k) {
    BoundInputs a = base;
    a.delta = k / 10.0;
    double prev = 1e300;
    for (int i = 0; i <= 11; ++i) {
      a.I_wz = i;
      const double v = noise_impact_bound(a);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("spread budget") {
  CHECK(lora_spread_budget(0.0) == 0.0);
  CHECK(std::abs(lora_spread_budget(0.1) - 0.10536) < 1e-5);
  CHECK(std::abs(lora_spread_budget(0.5) - 0.69315) < 1e-5);
  CHECK(lora_spread_budget(1.0 - 1e-9) > 20.0);
  CHECK_THROWS_AS(lora_spread_budget(1.0), DomainError);
  double prev = lora_spread_budget(0.0);
  double prev_slope = 0.0;
  for (int i = 1; i < 100; ++i) {
    const double v = lora_spread_budget(i / 100.0);
    CHECK(v > prev);
    const double slope = v - prev;
    CHECK(slope > prev_slope);
    prev_slope = slope;
    prev = v;
  }
}

TEST_CASE("noise gap") {
  CHECK(std::abs(lora_noise_gap(0.1, 0.1, 100) - 0.1) < 1e-12);
  CHECK(std::abs(lora_noise_gap(0.0, 1.0, 1)) < 1e-12);
  CHECK(std::abs(lora_noise_gap(0.2, 0.05, 400) - 0.2) < 1e-12);
  CHECK(lora_noise_gap(0.0, 0.01, 10) < 0.0);
  CHECK_THROWS_AS(lora_noise_gap(0.1, 0.0, 10), DomainError);
}

TEST_CASE("MLP failure bound") {
  BoundInputs in;
  in.H_v = 6;
  in.delta = 0.8;
  in.I_what_v = 7;
  in.H_what = 8;
  in.I_sv = 4;
  in.C = 8;
  const auto r = mlp_failure_bound(in, 0.5);
  CHECK(std::abs(r.raw - 0.35) < 1e-4);
  CHECK(r.clamped == doctest::Approx(0.35));
  CHECK_FALSE(r.vacuous);
  // H(w^|v) = 1 removes the radical.
  in.c2 = 0.25;
  CHECK(mlp_failure_bound(in, 0.5).t_prime == doctest::Approx(0.75));
  in.delta = 0.0;
  CHECK(mlp_failure_bound(in, 0.0).raw == doctest::Approx(6.0 / 8));
  in.C = 1;
  const auto big = mlp_failure_bound(in, 0.0);
  CHECK(big.vacuous);
  CHECK(big.clamped == 1.0);
}

TEST_CASE("sweep covers the grid") {
  BoundInputs base;
  base.H_w = 8;
  base.H_Zr = 4;
  const auto t = sweep(base, {0.2, 0.5, 0.8}, {0, 2, 4, 6}, 0.1);
  CHECK(t.rows.size() == 12);
  CHECK(t.column_index("eq1_bound") < t.columns.size());
}
