#include "ragdepth/fission/analysis.hpp"

#include <cmath>
#include <string>

#include "ragdepth/errors.hpp"

namespace ragdepth::fission {

using detail::require;

void RecurrenceParams::validate() const {
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1], got " + std::to_string(p));
  require(q > 0.0 && q < 1.0, "q must lie in (0, 1), got " + std::to_string(q));
  require(n >= 1, "n must be a positive integer, got " + std::to_string(n));
}

double eval_f(double t, const RecurrenceParams& params) {
  params.validate();
  require(t >= 0.0 && t <= 1.0, "t must lie in [0, 1], got " + std::to_string(t));
  const double qn = std::pow(params.q, params.n);
  return (qn - params.p * qn) * (std::pow(params.q, -params.n * t) - 1.0 + t) + params.p;
}

double eval_g(double t, const RecurrenceParams& params) { return eval_f(t, params) - t; }

double eval_g_prime(double t, const RecurrenceParams& params) {
  params.validate();
  require(t >= 0.0 && t <= 1.0, "t must lie in [0, 1], got " + std::to_string(t));
  const double qn = std::pow(params.q, params.n);
  const double n = params.n;
  return (1.0 - params.p) * qn * (-n * std::pow(params.q, -n * t) * std::log(params.q) + 1.0) -
         1.0;
}

double critical_point_raw(const RecurrenceParams& params) {
  params.validate();
  require(params.p < 1.0, "critical point needs p < 1");
  const double n = params.n;
  const double lnq = std::log(params.q);
  const double qn = std::pow(params.q, params.n);
  const double ratio = (params.p - 1.0) * n * lnq / (1.0 - (1.0 - params.p) * qn);
  return 1.0 + std::log(ratio) / (n * lnq);
}

std::optional<double> critical_point(const RecurrenceParams& params) {
  if (params.p >= 1.0) {
    params.validate();
    return std::nullopt;
  }
  const double t = critical_point_raw(params);
  if (t > 0.0 && t < 1.0) return t;
  return std::nullopt;
}

double threshold_h(double q, int n) {
  require(q > 0.0 && q < 1.0, "q must lie in (0, 1), got " + std::to_string(q));
  require(n >= 1, "n must be a positive integer");
  return 1.0 - 1.0 / (std::pow(q, n) - n * std::log(q));
}

FixedPointReport first_zero(const RecurrenceParams& params, double tol, int grid_points) {
  params.validate();
  require(tol > 0.0, "tolerance must be positive");

  FixedPointReport report;
  report.params = params;
  report.threshold_h = threshold_h(params.q, params.n);
  report.critical_t = critical_point(params);

  if (params.p == 0.0) {
    report.has_fixed_point = true;
    report.degenerate = true;
    report.t_hat = 0.0;
    report.residual = 0.0;
    return report;
  }
  if (params.p >= report.threshold_h || !report.critical_t) {
    return report;
  }

  double lo = 0.0;
  double hi = *report.critical_t;
  double mid = 0.5 * (lo + hi);
  double g_mid = eval_g(mid, params);
  int it = 0;
  for (; it < kMaxBisectionSteps; ++it) {
    mid = 0.5 * (lo + hi);
    g_mid = eval_g(mid, params);
    if (std::abs(g_mid) <= tol && hi - lo < 1e-12) break;
    if (g_mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 0.0) break;
  }
  report.iterations = it;
  report.residual = std::abs(g_mid);
  if (!(report.residual <= tol)) {
    throw NumericError("bisection for the first zero did not reach tolerance", it);
  }
  report.has_fixed_point = true;
  report.t_hat = mid;

  report.negative_beyond = true;
  for (int k = 1; k <= grid_points; ++k) {
    const double t = mid + (1.0 - mid) * k / (grid_points + 1.0);
    if (!(eval_g(t, params) < 0.0)) {
      report.negative_beyond = false;
      break;
    }
  }
  return report;
}

double first_zero_or_one(const RecurrenceParams& params) {
  const auto report = first_zero(params);
  return report.t_hat.value_or(1.0);
}

double required_p_exact_from_epsilon(double epsilon, double q, int n) {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(q > 0.0 && q < 1.0, "q must lie in (0, 1)");
  require(n >= 1, "n must be a positive integer");
  const double z = 1.0 - epsilon;
  const double qn = std::pow(q, n);
  const double xi = std::pow(q, n - n * z) + qn * z - qn;
  return (z - xi) / (1.0 - xi);
}

double required_p_approx_from_epsilon(double epsilon, double q, int n) {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(q > 0.0 && q < 1.0, "q must lie in (0, 1)");
  require(n >= 1, "n must be a positive integer");
  return 1.0 - epsilon / (1.0 - std::pow(q, epsilon * n));
}

LayerErasureRequirement erase_layer_requirement(double delta, double q, int n) {
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1), got " + std::to_string(delta));
  LayerErasureRequirement r;
  r.delta = delta;
  r.q = q;
  r.n = n;
  r.z = std::pow(delta, 1.0 / n);
  r.epsilon = 1.0 - r.z;
  const double qn = std::pow(q, n);
  r.xi = std::pow(q, n - n * r.z) + qn * r.z - qn;
  r.p_exact = required_p_exact_from_epsilon(r.epsilon, q, n);
  r.p_approx = required_p_approx_from_epsilon(r.epsilon, q, n);
  return r;
}

std::vector<GridPoint> coupled_grid(int steps, const CoupledRange& range) {
  require(steps >= 2, "coupled grid needs at least 2 steps");
  require(range.n_hi > range.n_lo && range.n_lo >= 1, "invalid n range");
  std::vector<GridPoint> grid;
  grid.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    const double n_real = range.n_lo + (range.n_hi - range.n_lo) * static_cast<double>(k) / (steps - 1);
    const int n = static_cast<int>(std::lround(n_real));
    const double q = range.q_lo + (range.q_hi - range.q_lo) * (n - range.n_lo) /
                                      static_cast<double>(range.n_hi - range.n_lo);
    grid.push_back({q, n});
  }
  return grid;
}

Table figure_curves(CurveKind kind, const CurveConfig& config) {
  Table table;
  if (kind == CurveKind::FVsT) {
    require(config.samples >= 2, "curve needs at least 2 samples");
    table.columns = {"t", "f_t", "identity"};
    for (int k = 0; k < config.samples; ++k) {
      const double t = static_cast<double>(k) / (config.samples - 1);
      table.add_row({t, eval_f(t, config.params), t});
    }
    return table;
  }

  require(config.layers >= 1, "need at least one layer");
  table.columns = {"layer", "q", "n", "delta", "p_exact", "p_approx"};
  const auto& r = config.range;
  for (int layer = 0; layer < config.layers; ++layer) {
    // Widest layer at the bottom, following the coupled line upward.
    const double frac = config.layers == 1 ? 0.0 : static_cast<double>(layer) / (config.layers - 1);
    const int n = static_cast<int>(std::lround(r.n_hi - (r.n_hi - r.n_lo) * frac));
    const double q = r.q_lo + (r.q_hi - r.q_lo) * (n - r.n_lo) / static_cast<double>(r.n_hi - r.n_lo);
    for (double delta : config.deltas) {
      const auto req = erase_layer_requirement(delta, q, n);
      table.add_row({static_cast<std::int64_t>(layer), q, static_cast<std::int64_t>(n), delta,
                     req.p_exact, req.p_approx});
    }
  }
  return table;
}

Table fixed_point_table(const std::vector<FixedPointReport>& reports) {
  Table table;
  table.columns = {"p", "q", "n", "h", "critical_t", "t_hat", "residual"};
  const double nan = std::nan("");
  for (const auto& r : reports) {
    table.add_row({r.params.p, r.params.q, static_cast<std::int64_t>(r.params.n), r.threshold_h,
                   r.critical_t.value_or(nan), r.t_hat.value_or(nan), r.residual});
  }
  return table;
}

DepthBudget depth_budget(double lambda, double t_filter_layers, double layer) {
  require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
  require(t_filter_layers >= 0.0, "filter depth must be non-negative");
  require(layer >= 0.0, "layer must be non-negative");
  DepthBudget b;
  b.lambda = lambda;
  b.t_filter_layers = t_filter_layers;
  b.layer = layer;
  b.cutoff_layer = t_filter_layers / (1.0 - lambda);
  b.extract_depth = lambda * layer + t_filter_layers;
  b.tie = std::abs(b.extract_depth - layer) <= 1e-12;
  b.extraction_beneficial = !b.tie && b.extract_depth < layer;
  return b;
}

}  // namespace ragdepth::fission
