#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ragdepth/table.hpp"
#include "ragdepth/toy/attention_net.hpp"
#include "ragdepth/toy/capacity.hpp"

namespace ragdepth::toy {

using TaskSampler = std::function<ToyTask(Rng&)>;

struct TrainConfig {
  double lr = 0.5;
  std::size_t steps = 3000;
  std::size_t batch = 32;
  std::uint64_t seed = 0;
  std::size_t eval_every = 500;
  std::size_t holdout_tasks = 512;
  // Rescale the gradient when its global L2 norm exceeds this; 0 disables.
  double clip_norm = 1.0;
};

struct CurvePoint {
  std::size_t step = 0;
  double train_loss = 0.0;
  double holdout_accuracy = 0.0;
};

struct FitResult {
  std::vector<CurvePoint> curve;
  double final_accuracy = 0.0;
  // Share of held-out labels equal to 1; the accuracy of a constant predictor
  // is max(rate, 1 - rate).
  double holdout_positive_rate = 0.0;
};

// Plain SGD on freshly sampled batches. Held-out tasks come from a separate
// stream of the same sampler. Throws NumericError on a non-finite loss.
FitResult train(AttentionNet& net, const TaskSampler& sampler, const TrainConfig& config);

// SGD on mini-batches drawn from a fixed pool; accuracy is measured on `holdout`.
FitResult train(AttentionNet& net, std::span<const ToyTask> pool, std::span<const ToyTask> holdout,
                const TrainConfig& config);

struct ExperimentSpec {
  std::string id;
  PredicateKind kind = PredicateKind::Pairwise;
  int n_tokens = 8;
  int modulus = 11;
  NetShape shape;
  TrainConfig train;
};

// Defaults sized so each kind has roughly balanced labels. Pairwise and
// Triplewise share the one-layer net and training budget.
ExperimentSpec default_experiment(PredicateKind kind);

struct ExperimentRun {
  ExperimentSpec spec;
  std::uint64_t seed = 0;
  std::size_t parameter_count = 0;
  FitResult fit;
};

ExperimentRun run_experiment(const ExperimentSpec& spec, std::uint64_t seed);

// One run per seed, up to `jobs` at a time; results in seed order.
std::vector<ExperimentRun> run_experiments(const ExperimentSpec& spec,
                                           std::span<const std::uint64_t> seeds, unsigned jobs = 1);

// Columns: experiment_id,kind,layers,heads,m,seed,step,train_loss,holdout_accuracy.
Table results_table(const std::vector<ExperimentRun>& runs);

struct SeedSummary {
  std::string id;
  std::vector<double> accuracies;
  double mean() const;
};

struct OrderingConfig {
  int n_documents = 6;
  int modulus = 8;
  NetShape shape{.layers = 1, .heads = 1, .embed_dim = 4, .ff_dim = 16, .causal = true};
  TrainConfig train{};
  // Capacity accounting inputs.
  int precision_bits = 32;
  double H_w_bits = 3.0;
};

struct OrderingResult {
  QueryLayout layout = QueryLayout::QueryFirst;
  std::vector<ExperimentRun> runs;
  double mean_accuracy = 0.0;
  OrderingCapacity capacity;
};

// Trains matched causal nets on the query/document pair task for one layout.
OrderingResult ordering_experiment(QueryLayout layout, const OrderingConfig& config,
                                   std::span<const std::uint64_t> seeds, unsigned jobs = 1);

}  // namespace ragdepth::toy
