#include "ragdepth/toy/training.hpp"

#include <cmath>
#include <numeric>

#include "ragdepth/errors.hpp"
#include "ragdepth/parallel.hpp"

namespace ragdepth::toy {

using detail::require;

namespace {

double positive_rate(std::span<const ToyTask> tasks) {
  std::size_t pos = 0, count = 0;
  for (const auto& t : tasks) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!t.labeled[i]) continue;
      pos += t.labels[i] == 1 ? 1 : 0;
      ++count;
    }
  }
  return count ? static_cast<double>(pos) / count : 0.0;
}

template <class NextBatch>
FitResult sgd_loop(AttentionNet& net, NextBatch&& next_batch, std::span<const ToyTask> holdout,
                   const TrainConfig& config) {
  require(config.lr > 0.0 && config.steps >= 1 && config.batch >= 1, "invalid training config");
  FitResult result;
  result.holdout_positive_rate = positive_rate(holdout);
  AttentionNet grad;
  std::vector<ToyTask> batch;
  double interval_loss = 0.0;
  std::size_t interval_steps = 0;
  const std::size_t every = config.eval_every ? config.eval_every : config.steps;
  for (std::size_t step = 1; step <= config.steps; ++step) {
    next_batch(batch);
    const double l = loss_and_gradients(net, batch, grad);
    if (!std::isfinite(l)) {
      throw NumericError("training diverged at step " + std::to_string(step), step);
    }
    double step_size = config.lr;
    if (config.clip_norm > 0.0) {
      double sq = 0.0;
      grad.for_each([&](const std::string&, const auto& g) { sq += g.squaredNorm(); });
      const double norm = std::sqrt(sq);
      if (norm > config.clip_norm) step_size *= config.clip_norm / norm;
    }
    net.zip(grad, [&](const std::string&, auto& w, auto& g) { w -= step_size * g; });
    interval_loss += l;
    ++interval_steps;
    if (step % every == 0 || step == config.steps) {
      result.curve.push_back({step, interval_loss / interval_steps, accuracy(net, holdout)});
      interval_loss = 0.0;
      interval_steps = 0;
    }
  }
  result.final_accuracy = result.curve.back().holdout_accuracy;
  return result;
}

}  // namespace

FitResult train(AttentionNet& net, const TaskSampler& sampler, const TrainConfig& config) {
  Rng holdout_rng = Rng::derive(config.seed, 2);
  std::vector<ToyTask> holdout;
  holdout.reserve(config.holdout_tasks);
  for (std::size_t i = 0; i < config.holdout_tasks; ++i) holdout.push_back(sampler(holdout_rng));

  Rng rng = Rng::derive(config.seed, 1);
  return sgd_loop(
      net,
      [&](std::vector<ToyTask>& batch) {
        batch.clear();
        for (std::size_t i = 0; i < config.batch; ++i) batch.push_back(sampler(rng));
      },
      holdout, config);
}

FitResult train(AttentionNet& net, std::span<const ToyTask> pool, std::span<const ToyTask> holdout,
                const TrainConfig& config) {
  require(!pool.empty(), "training needs at least one task");
  require(!holdout.empty(), "held-out set is empty");
  Rng rng = Rng::derive(config.seed, 1);
  return sgd_loop(
      net,
      [&](std::vector<ToyTask>& batch) {
        batch.clear();
        for (std::size_t i = 0; i < config.batch; ++i) batch.push_back(pool[rng.index(pool.size())]);
      },
      holdout, config);
}

ExperimentSpec default_experiment(PredicateKind kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.id = std::string(to_string(kind));
  spec.shape = NetShape{.layers = 1, .heads = 2, .embed_dim = 32, .ff_dim = 64};
  switch (kind) {
    case PredicateKind::Pairwise:
      spec.n_tokens = 8;
      spec.modulus = 11;
      break;
    case PredicateKind::Triplewise:
      spec.n_tokens = 8;
      spec.modulus = 31;
      break;
    case PredicateKind::VirtualPairwise:
      spec.n_tokens = 5;
      spec.modulus = 5;
      spec.shape.layers = 2;
      break;
    case PredicateKind::Disjointness:
      spec.n_tokens = 8;
      spec.modulus = 5;
      break;
  }
  spec.shape.vocab = spec.modulus;
  spec.shape.max_len = spec.n_tokens;
  return spec;
}

ExperimentRun run_experiment(const ExperimentSpec& spec, std::uint64_t seed) {
  ExperimentRun run;
  run.spec = spec;
  run.seed = seed;
  Rng init = Rng::derive(seed, 0);
  AttentionNet net = AttentionNet::random(spec.shape, init);
  run.parameter_count = net.parameter_count();
  TrainConfig cfg = spec.train;
  cfg.seed = seed;
  const auto kind = spec.kind;
  const int n = spec.n_tokens;
  const int m = spec.modulus;
  run.fit = train(net, [=](Rng& rng) { return gen_task(kind, n, m, rng); }, cfg);
  return run;
}

Table results_table(const std::vector<ExperimentRun>& runs) {
  Table table;
  table.columns = {"experiment_id", "kind", "layers",     "heads",           "m",
                   "seed",          "step", "train_loss", "holdout_accuracy"};
  for (const auto& run : runs) {
    for (const auto& point : run.fit.curve) {
      table.add_row({run.spec.id, std::string(to_string(run.spec.kind)),
                     static_cast<std::int64_t>(run.spec.shape.layers),
                     static_cast<std::int64_t>(run.spec.shape.heads),
                     static_cast<std::int64_t>(run.spec.shape.embed_dim),
                     static_cast<std::int64_t>(run.seed), static_cast<std::int64_t>(point.step),
                     point.train_loss, point.holdout_accuracy});
    }
  }
  return table;
}

double SeedSummary::mean() const {
  if (accuracies.empty()) return 0.0;
  return std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / accuracies.size();
}

std::vector<ExperimentRun> run_experiments(const ExperimentSpec& spec,
                                           std::span<const std::uint64_t> seeds, unsigned jobs) {
  std::vector<ExperimentRun> runs(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t k) { runs[k] = run_experiment(spec, seeds[k]); });
  return runs;
}

OrderingResult ordering_experiment(QueryLayout layout, const OrderingConfig& config,
                                   std::span<const std::uint64_t> seeds, unsigned jobs) {
  require(config.shape.causal, "ordering experiment needs a causal net");
  require(!seeds.empty(), "need at least one seed");
  OrderingResult result;
  result.layout = layout;
  result.capacity = ordering_capacity(config.shape.embed_dim, config.precision_bits,
                                      config.n_documents, config.H_w_bits);
  ExperimentSpec spec;
  spec.id = "ordering_" + std::string(to_string(layout));
  spec.kind = PredicateKind::Pairwise;
  spec.n_tokens = config.n_documents + 1;
  spec.modulus = config.modulus;
  spec.shape = config.shape;
  spec.shape.vocab = config.modulus;
  spec.shape.max_len = spec.n_tokens;
  spec.shape.slots = config.n_documents;
  spec.train = config.train;

  const int nd = config.n_documents;
  const int mod = config.modulus;
  result.runs.resize(seeds.size());
  parallel_for(seeds.size(), jobs, [&](std::size_t k) {
    ExperimentRun& run = result.runs[k];
    run.spec = spec;
    run.seed = seeds[k];
    Rng init = Rng::derive(run.seed, 0);
    AttentionNet net = AttentionNet::random(spec.shape, init);
    run.parameter_count = net.parameter_count();
    TrainConfig cfg = spec.train;
    cfg.seed = run.seed;
    run.fit = train(net, [=](Rng& rng) { return gen_ordering_task(layout, nd, mod, rng); }, cfg);
  });
  double sum = 0.0;
  for (const auto& run : result.runs) sum += run.fit.final_accuracy;
  result.mean_accuracy = sum / seeds.size();
  return result;
}

}  // namespace ragdepth::toy
