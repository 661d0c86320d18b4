#pragma once

#include <vector>

#include "ragdepth/table.hpp"

// Calculators over user-supplied information quantities. Entropies and mutual
// informations are in bits; the spread budget and noise gap use natural
// logarithms. c1, c2 and C are opaque constants (defaults 1, 0, 1 are
// "normalized units").
namespace ragdepth::bounds {

struct BoundInputs {
  double H_w = 8.0;
  double I_wz = 0.0;
  double H_Zr = 0.0;
  double H_v = 0.0;
  double I_sv = 0.0;
  double H_what = 1.0;
  double I_what_v = 0.0;
  double delta = 1.0;
  double c1 = 1.0;
  double c2 = 0.0;
  double C = 1.0;

  double H_w_given_z() const { return H_w - I_wz; }
  double H_what_given_v() const { return H_what - I_what_v; }
  void validate() const;
};

struct ClampedValue {
  double raw = 0.0;
  double value = 0.0;
};

// Fano: p_e >= (H(w) - I(w;z) - 1) / H(w), clamped to [0, 1].
ClampedValue fano_error_lower(double H_w, double I_wz);

// Share of distractors surviving a filter with error rate p_e.
double distraction_fraction(double delta, double p_e);

// Closed-form lower bound on the distraction share written directly in terms
// of H(w) and I(w;z). Agrees with distraction_fraction(delta, fano) whenever
// the Fano bound is strictly inside (0, 1).
double distraction_lower_bound(double delta, double H_w, double I_wz);

// c1 sqrt((1 - delta) H(w|z) / (delta (I(w;z) + 1)) * H(Z_r)) + c2
double noise_impact_bound(const BoundInputs& in);

// ln(1 / (1 - epsilon))
double lora_spread_budget(double epsilon);

// delta + ln(epsilon^2 n); may be negative.
double lora_noise_gap(double delta_spread, double epsilon, double n_tokens);

struct MlpFailureBound {
  double raw = 0.0;
  double clamped = 0.0;
  bool vacuous = false;
  double t_prime = 0.0;
};

MlpFailureBound mlp_failure_bound(const BoundInputs& in, double t_base);

// Sweep of delta x I(w;z) around a base input; one row per grid point.
Table sweep(const BoundInputs& base, const std::vector<double>& deltas,
            const std::vector<double>& I_wz_values, double t_base = 0.0);

}  // namespace ragdepth::bounds
