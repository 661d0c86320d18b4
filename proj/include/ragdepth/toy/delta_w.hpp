#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ragdepth/random.hpp"
#include "ragdepth/table.hpp"
#include "ragdepth/toy/attention_net.hpp"

namespace ragdepth::toy {

// A frozen attention pattern over n tokens: base_scores(i, j) = x_i^T W x_j for
// token embeddings x (rows of `embeddings`), plus a relevant/noise flag per
// column. Fine-tuning may only add x_i^T dW x_j, so offsets on noise and
// relevant columns are coupled through the shared embeddings.
struct DeltaWInstance {
  Matrix base_scores;
  Matrix embeddings;
  std::vector<bool> relevant;

  void validate() const;
};

DeltaWInstance gen_delta_w_instance(int n_tokens, int embed_dim, int noise_columns, Rng& rng);

struct DeltaWConfig {
  std::size_t steps = 3000;
  double lr = 0.05;
  // Even power of the log-ratio loss; larger values track the max deviation.
  int power = 4;
  // Stop early once this epsilon is reached (unconstrained mode only).
  std::optional<double> target_epsilon;
};

struct DeltaWFit {
  Matrix base_scores;
  std::vector<bool> mask;
  Matrix delta_w;
  // x_i^T dW x_j for every pair.
  Matrix fitted_offset;
  std::optional<double> allowed_spread;
  double achieved_epsilon = 0.0;
  double spread_delta = 0.0;
  // 1 - exp(-spread): the epsilon at which ln(1/(1-eps)) equals the spread.
  double budget_epsilon = 0.0;
  std::size_t steps_run = 0;
};

// Worst relative deviation of softmax(base + offset) from the masked target
// softmax over relevant columns, across all rows.
double masked_epsilon(const Matrix& base_scores, const std::vector<bool>& relevant,
                      const Matrix& offset);

// max - min of offset over relevant columns, across all rows.
double relevant_spread(const Matrix& offset, const std::vector<bool>& relevant);

// Gradient descent on a power of the log-ratio to the masked target. With
// allowed_spread set, every iterate is pulled back inside the spread budget by
// shrinking dW, and the best feasible iterate is reported.
DeltaWFit fit_delta_w(const DeltaWInstance& instance, std::optional<double> allowed_spread,
                      const DeltaWConfig& config, const Matrix* warm_start = nullptr);

// Constrained fits over increasing budgets, each warm-started from the
// previous solution (which stays feasible as the budget grows).
std::vector<DeltaWFit> delta_w_sweep(const DeltaWInstance& instance,
                                     std::span<const double> allowed_spreads,
                                     const DeltaWConfig& config);

// Columns: instance_id,allowed_spread,measured_spread,achieved_epsilon.
void append_delta_w_rows(Table& table, std::int64_t instance_id, const std::vector<DeltaWFit>& fits);
Table delta_w_table();

}  // namespace ragdepth::toy
