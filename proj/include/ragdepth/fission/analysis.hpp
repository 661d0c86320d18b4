#pragma once

#include <optional>
#include <vector>

#include "ragdepth/table.hpp"

namespace ragdepth::fission {

// Parameters of one layer transition: retrieval probability p of the child
// layer, its non-connection probability q, and the node count n of the layer
// above.
struct RecurrenceParams {
  double p = 0.0;
  double q = 0.5;
  int n = 1;

  void validate() const;
};

// Expected erased fraction of a layer given erased fraction t of the layer above:
//   f(t) = (q^n - p q^n) (q^{-n t} - 1 + t) + p
double eval_f(double t, const RecurrenceParams& params);
double eval_g(double t, const RecurrenceParams& params);
double eval_g_prime(double t, const RecurrenceParams& params);

// Unclamped location where g' vanishes. Requires p < 1.
double critical_point_raw(const RecurrenceParams& params);
// Same, but absent unless it lies strictly inside (0, 1).
std::optional<double> critical_point(const RecurrenceParams& params);

// Fission threshold h(q, n) = 1 - 1 / (q^n - n ln q). Written as q^n - ln q^n
// in some sources; the two are the same quantity.
double threshold_h(double q, int n);

struct FixedPointReport {
  RecurrenceParams params;
  double threshold_h = 0.0;
  bool has_fixed_point = false;
  // p == 0: g(0) = 0, the cascade never starts.
  bool degenerate = false;
  std::optional<double> critical_t;
  std::optional<double> t_hat;
  double residual = 0.0;
  // g < 0 held on every sampled point of (t_hat, 1).
  bool negative_beyond = false;
  int iterations = 0;
};

inline constexpr double kDefaultRootTolerance = 1e-10;
inline constexpr int kMaxBisectionSteps = 200;

// First zero of g on (0, 1) by bisection over [0, t*].
FixedPointReport first_zero(const RecurrenceParams& params, double tol = kDefaultRootTolerance,
                            int grid_points = 100);

// Analytic first zero used for comparisons with simulation: t_hat when it
// exists, 0 for the degenerate p == 0 case, and 1 otherwise (g >= 0 on [0, 1]
// so the cascade runs to the full layer).
double first_zero_or_one(const RecurrenceParams& params);

struct LayerErasureRequirement {
  double delta = 0.0;
  double q = 0.0;
  int n = 0;
  double z = 0.0;
  double epsilon = 0.0;
  double xi = 0.0;
  double p_exact = 0.0;
  double p_approx = 0.0;
};

// Retrieval probability needed so a whole layer is erased with probability delta.
LayerErasureRequirement erase_layer_requirement(double delta, double q, int n);

// Exact and approximate requirement as functions of epsilon directly.
double required_p_exact_from_epsilon(double epsilon, double q, int n);
double required_p_approx_from_epsilon(double epsilon, double q, int n);

struct CoupledRange {
  double q_lo = 0.1;
  double q_hi = 0.8;
  int n_lo = 2;
  int n_hi = 16;
};

struct GridPoint {
  double q;
  int n;
};

// Points on the line q(n) = q_lo + (q_hi - q_lo)(n - n_lo)/(n_hi - n_lo), with n
// spaced evenly and rounded; q is computed from the rounded n.
std::vector<GridPoint> coupled_grid(int steps, const CoupledRange& range = {});

enum class CurveKind { FVsT, ThresholdByLayer };

struct CurveConfig {
  // FVsT
  RecurrenceParams params{0.3, 0.5, 4};
  int samples = 101;
  // ThresholdByLayer: layer 0 is the bottom (widest) layer.
  int layers = 10;
  std::vector<double> deltas{0.5, 0.9};
  CoupledRange range{};
};

// FVsT: columns t,f_t,identity. ThresholdByLayer: layer,q,n,delta,p_exact,p_approx.
Table figure_curves(CurveKind kind, const CurveConfig& config);

Table fixed_point_table(const std::vector<FixedPointReport>& reports);

struct DepthBudget {
  double lambda = 0.0;
  double t_filter_layers = 0.0;
  double layer = 0.0;
  double cutoff_layer = 0.0;
  double extract_depth = 0.0;
  // extract_depth == layer within 1e-12.
  bool tie = false;
  // extract_depth < layer: using the document is shallower than reasoning.
  bool extraction_beneficial = false;
};

DepthBudget depth_budget(double lambda, double t_filter_layers, double layer);

}  // namespace ragdepth::fission
