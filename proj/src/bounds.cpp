#include "ragdepth/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ragdepth/errors.hpp"

namespace ragdepth::bounds {

using detail::require;

void BoundInputs::validate() const {
  require(H_w >= 0 && H_Zr >= 0 && H_v >= 0 && H_what >= 0, "entropies must be non-negative");
  require(I_wz >= 0 && I_wz <= H_w, "I(w;z) must lie in [0, H(w)]");
  require(I_sv >= 0 && I_what_v >= 0, "mutual informations must be non-negative");
  require(I_what_v <= H_what, "I(w^;v) cannot exceed H(w^)");
  require(delta >= 0 && delta <= 1, "delta must lie in [0, 1]");
  require(std::isfinite(c1) && std::isfinite(c2), "constants must be finite");
}

ClampedValue fano_error_lower(double H_w, double I_wz) {
  require(H_w > 0, "H(w) must be positive");
  require(I_wz >= 0 && I_wz <= H_w, "I(w;z) must lie in [0, H(w)]");
  const double raw = (H_w - I_wz - 1.0) / H_w;
  return {raw, std::clamp(raw, 0.0, 1.0)};
}

double distraction_fraction(double delta, double p_e) {
  require(delta > 0 && delta <= 1, "delta must lie in (0, 1]");
  require(p_e >= 0 && p_e <= 1, "p_e must lie in [0, 1]");
  const double noise = (1.0 - delta) * p_e;
  const double denom = noise + delta * (1.0 - p_e);
  if (noise == 0.0) return 0.0;
  require(denom > 0, "distraction fraction undefined");
  return noise / denom;
}

double distraction_lower_bound(double delta, double H_w, double I_wz) {
  require(delta > 0 && delta <= 1, "delta must lie in (0, 1]");
  require(H_w > 0 && I_wz >= 0 && I_wz <= H_w, "invalid information quantities");
  const double slack = H_w - I_wz - 1.0;
  require(slack > 0, "bound is only informative when H(w) - I(w;z) > 1");
  return (1.0 - delta) / (delta * H_w / slack - 2.0 * delta + 1.0);
}

double noise_impact_bound(const BoundInputs& in) {
  in.validate();
  require(in.delta > 0, "delta must be positive");
  const double radicand =
      (1.0 - in.delta) * in.H_w_given_z() / (in.delta * (in.I_wz + 1.0)) * in.H_Zr;
  return in.c1 * std::sqrt(radicand) + in.c2;
}

double lora_spread_budget(double epsilon) {
  require(epsilon >= 0 && epsilon < 1, "epsilon must lie in [0, 1)");
  return std::log(1.0 / (1.0 - epsilon));
}

double lora_noise_gap(double delta_spread, double epsilon, double n_tokens) {
  require(epsilon > 0, "epsilon must be positive");
  require(n_tokens >= 1, "need at least one token");
  return delta_spread + std::log(epsilon * epsilon * n_tokens);
}

MlpFailureBound mlp_failure_bound(const BoundInputs& in, double t_base) {
  in.validate();
  require(in.C > 0, "C must be positive");
  require(in.H_what > 0, "H(w^) must be positive");
  MlpFailureBound out;
  out.raw = (in.H_v - in.delta * (in.I_what_v + 1.0) / in.H_what * in.I_sv) / in.C;
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  out.vacuous = out.raw <= 0.0 || out.raw >= 1.0;
  // H(w^|v) < 1 would make the radicand negative; it is floored at zero.
  const double radicand =
      std::max(0.0, (1.0 - in.delta) * (in.H_what_given_v() - 1.0) / in.H_what * in.I_sv);
  out.t_prime = t_base + in.c1 * std::sqrt(radicand) + in.c2;
  return out;
}

Table sweep(const BoundInputs& base, const std::vector<double>& deltas,
            const std::vector<double>& I_wz_values, double t_base) {
  Table table;
  table.columns = {"H_w",     "I_wz",        "H_w_given_z",  "H_Zr",         "H_v",
                   "I_sv",    "H_what",      "I_what_v",     "delta",        "c1",
                   "c2",      "C",           "fano_raw",     "fano_p_e",     "alpha",
                   "eq1_bound", "mlp_raw",   "mlp_clamped",  "mlp_vacuous",  "t_prime"};
  for (double delta : deltas) {
    for (double I : I_wz_values) {
      BoundInputs in = base;
      in.delta = delta;
      in.I_wz = I;
      const auto fano = fano_error_lower(in.H_w, in.I_wz);
      const auto mlp = mlp_failure_bound(in, t_base);
      table.add_row({in.H_w, in.I_wz, in.H_w_given_z(), in.H_Zr, in.H_v, in.I_sv, in.H_what,
                     in.I_what_v, in.delta, in.c1, in.c2, in.C, fano.raw, fano.value,
                     distraction_fraction(in.delta, fano.value), noise_impact_bound(in), mlp.raw,
                     mlp.clamped, mlp.vacuous, mlp.t_prime});
    }
  }
  return table;
}

}  // namespace ragdepth::bounds
