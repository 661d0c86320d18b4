#include "ragdepth/toy/delta_w.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ragdepth/errors.hpp"

namespace ragdepth::toy {

using detail::require;

void DeltaWInstance::validate() const {
  const auto n = base_scores.rows();
  require(n >= 2 && base_scores.cols() == n, "base scores must be square");
  require(embeddings.rows() == n, "one embedding per token expected");
  require(static_cast<Eigen::Index>(relevant.size()) == n, "one mask flag per column expected");
  require(std::count(relevant.begin(), relevant.end(), true) >= 2,
          "need at least two relevant columns");
}

namespace {

RowVector softmax(const RowVector& x) {
  RowVector e = (x.array() - x.maxCoeff()).exp().matrix();
  return e / e.sum();
}

Matrix masked_target(const Matrix& base, const std::vector<bool>& relevant) {
  Matrix t = Matrix::Zero(base.rows(), base.cols());
  for (Eigen::Index i = 0; i < base.rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < base.cols(); ++j) {
      if (relevant[j]) mx = std::max(mx, base(i, j));
    }
    double sum = 0.0;
    for (Eigen::Index j = 0; j < base.cols(); ++j) {
      if (relevant[j]) sum += t(i, j) = std::exp(base(i, j) - mx);
    }
    t.row(i) /= sum;
  }
  return t;
}

}  // namespace

DeltaWInstance gen_delta_w_instance(int n_tokens, int embed_dim, int noise_columns, Rng& rng) {
  require(n_tokens >= 3 && embed_dim >= 1, "invalid instance size");
  require(noise_columns >= 0 && noise_columns <= n_tokens - 2, "need at least two relevant columns");
  DeltaWInstance inst;
  inst.embeddings.resize(n_tokens, embed_dim);
  const double s = 1.0 / std::sqrt(static_cast<double>(embed_dim));
  for (Eigen::Index i = 0; i < inst.embeddings.size(); ++i) {
    inst.embeddings.data()[i] = rng.normal(0.0, s);
  }
  Matrix w(embed_dim, embed_dim);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.normal(0.0, 1.5);
  inst.base_scores = inst.embeddings * w * inst.embeddings.transpose();
  inst.relevant.assign(n_tokens, true);
  // Noise columns are a random subset.
  std::vector<int> order(n_tokens);
  for (int i = 0; i < n_tokens; ++i) order[i] = i;
  for (int i = n_tokens - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
  for (int k = 0; k < noise_columns; ++k) inst.relevant[order[k]] = false;
  return inst;
}

double masked_epsilon(const Matrix& base_scores, const std::vector<bool>& relevant,
                      const Matrix& offset) {
  const Matrix target = masked_target(base_scores, relevant);
  double eps = 0.0;
  for (Eigen::Index i = 0; i < base_scores.rows(); ++i) {
    const RowVector s = softmax(base_scores.row(i) + offset.row(i));
    for (Eigen::Index j = 0; j < base_scores.cols(); ++j) {
      if (relevant[j]) eps = std::max(eps, std::abs(s(j) / target(i, j) - 1.0));
    }
  }
  return eps;
}

double relevant_spread(const Matrix& offset, const std::vector<bool>& relevant) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index j = 0; j < offset.cols(); ++j) {
    if (!relevant[j]) continue;
    lo = std::min(lo, offset.col(j).minCoeff());
    hi = std::max(hi, offset.col(j).maxCoeff());
  }
  return hi - lo;
}

DeltaWFit fit_delta_w(const DeltaWInstance& instance, std::optional<double> allowed_spread,
                      const DeltaWConfig& config, const Matrix* warm_start) {
  instance.validate();
  require(!allowed_spread || *allowed_spread >= 0.0, "allowed spread must be non-negative");
  require(config.lr > 0.0, "learning rate must be positive");
  require(config.power >= 2 && config.power % 2 == 0, "loss power must be even and >= 2");
  const Matrix& x = instance.embeddings;
  const Matrix& base = instance.base_scores;
  const auto n = base.rows();
  const Matrix target = masked_target(base, instance.relevant);

  Matrix dw = warm_start ? *warm_start : Matrix::Zero(x.cols(), x.cols());
  auto project = [&](Matrix& m) {
    if (!allowed_spread) return;
    const double spread = relevant_spread(x * m * x.transpose(), instance.relevant);
    if (spread > *allowed_spread) m *= *allowed_spread / spread;
  };
  project(dw);

  DeltaWFit best;
  best.base_scores = base;
  best.mask = instance.relevant;
  best.allowed_spread = allowed_spread;
  best.achieved_epsilon = std::numeric_limits<double>::infinity();
  auto consider = [&](const Matrix& m, std::size_t step) {
    const Matrix offset = x * m * x.transpose();
    const double eps = masked_epsilon(base, instance.relevant, offset);
    if (eps < best.achieved_epsilon) {
      best.achieved_epsilon = eps;
      best.delta_w = m;
      best.fitted_offset = offset;
      best.steps_run = step;
    }
    return eps;
  };

  consider(dw, 0);
  for (std::size_t step = 1; step <= config.steps; ++step) {
    if (config.target_epsilon && best.achieved_epsilon <= *config.target_epsilon) break;
    const Matrix offset = x * dw * x.transpose();
    // Loss: mean over rows of sum_j r_ij^k with r_ij = log s_ij - log target_ij
    // on relevant columns; d r_ij / d offset_il = [j == l] - s_il.
    Matrix g_offset(n, n);
    const int k = config.power;
    for (Eigen::Index i = 0; i < n; ++i) {
      const RowVector s = softmax(base.row(i) + offset.row(i));
      RowVector dr = RowVector::Zero(n);
      double total = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!instance.relevant[j]) continue;
        const double r = std::log(s(j)) - std::log(target(i, j));
        dr(j) = k * std::pow(r, k - 1);
        total += dr(j);
      }
      g_offset.row(i) = (dr - total * s) / static_cast<double>(n);
    }
    dw -= config.lr * (x.transpose() * g_offset * x);
    if (!dw.allFinite()) throw NumericError("delta-W fit diverged", step);
    project(dw);
    consider(dw, step);
  }
  best.spread_delta = relevant_spread(best.fitted_offset, instance.relevant);
  best.budget_epsilon = 1.0 - std::exp(-best.spread_delta);
  return best;
}

std::vector<DeltaWFit> delta_w_sweep(const DeltaWInstance& instance,
                                     std::span<const double> allowed_spreads,
                                     const DeltaWConfig& config) {
  std::vector<double> budgets(allowed_spreads.begin(), allowed_spreads.end());
  require(std::is_sorted(budgets.begin(), budgets.end()), "spread budgets must be ascending");
  std::vector<DeltaWFit> fits;
  const Matrix* warm = nullptr;
  for (double budget : budgets) {
    fits.push_back(fit_delta_w(instance, budget, config, warm));
    warm = &fits.back().delta_w;
  }
  return fits;
}

Table delta_w_table() {
  Table t;
  t.columns = {"instance_id", "allowed_spread", "measured_spread", "achieved_epsilon"};
  return t;
}

void append_delta_w_rows(Table& table, std::int64_t instance_id, const std::vector<DeltaWFit>& fits) {
  for (const auto& f : fits) {
    table.add_row({instance_id, f.allowed_spread.value_or(std::nan("")), f.spread_delta,
                   f.achieved_epsilon});
  }
}

}  // namespace ragdepth::toy
