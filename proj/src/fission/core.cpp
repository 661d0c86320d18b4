#include "ragdepth/fission/core.hpp"

#include <algorithm>
#include <cmath>

#include "ragdepth/errors.hpp"
#include "ragdepth/fission/analysis.hpp"
#include "ragdepth/parallel.hpp"

namespace ragdepth::fission {

using detail::require;

void LayerParams::validate() const {
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1], got " + std::to_string(p));
  require(q > 0.0 && q < 1.0, "q must lie in (0, 1), got " + std::to_string(q));
  require(n_nodes >= 1, "layer needs at least one node");
}

void TreeTopology::validate() const {
  require(!layer_sizes.empty() && layer_sizes.back() == 1, "top layer must hold exactly one node");
  require(parents.size() == layer_sizes.size(), "parent lists must cover every layer");
  for (std::size_t l = 0; l < layer_sizes.size(); ++l) {
    require(static_cast<int>(parents[l].size()) == layer_sizes[l], "parent list size mismatch");
    const bool top = l + 1 == layer_sizes.size();
    for (const auto& ps : parents[l]) {
      require(top ? ps.empty() : !ps.empty(), "every non-top node needs a parent");
      for (int j : ps) {
        require(!top && j >= 0 && j < layer_sizes[l + 1], "edge leaves the layer above");
      }
    }
  }
}

namespace {

void validate_params(const std::vector<LayerParams>& params) {
  require(!params.empty(), "need at least one layer");
  for (const auto& lp : params) lp.validate();
  require(params.back().n_nodes == 1, "top layer must hold exactly one node");
}

// Wires `count` children to a layer of `parent_width` nodes.
void wire_layer(int count, int parent_width, double q, Rng& rng,
                std::vector<std::vector<int>>& parents, std::vector<bool>& repaired) {
  parents.assign(count, {});
  repaired.assign(count, false);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < parent_width; ++j) {
      if (!rng.bernoulli(q)) parents[i].push_back(j);
    }
    if (parents[i].empty()) {
      parents[i].push_back(static_cast<int>(rng.index(parent_width)));
      repaired[i] = true;
    }
  }
}

}  // namespace

TreeTopology build_tree(const std::vector<LayerParams>& params, Rng& rng) {
  validate_params(params);
  TreeTopology tree;
  const std::size_t layers = params.size();
  tree.layer_sizes.reserve(layers);
  for (const auto& lp : params) tree.layer_sizes.push_back(lp.n_nodes);
  tree.parents.resize(layers);
  tree.repaired.resize(layers);
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    wire_layer(tree.layer_sizes[l], tree.layer_sizes[l + 1], params[l].q, rng, tree.parents[l],
               tree.repaired[l]);
  }
  tree.parents[layers - 1].assign(1, {});
  tree.repaired[layers - 1].assign(1, false);
  return tree;
}

RetrievalMark apply_retrieval(const TreeTopology& tree, const std::vector<LayerParams>& params,
                              Rng& rng) {
  require(params.size() == tree.layer_sizes.size(), "one LayerParams per tree layer expected");
  RetrievalMark marks;
  marks.retrieved.resize(params.size());
  for (std::size_t l = 0; l < params.size(); ++l) {
    params[l].validate();
    auto& row = marks.retrieved[l];
    row.resize(tree.layer_sizes[l]);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = rng.bernoulli(params[l].p);
  }
  return marks;
}

ErasureState propagate_fission(const TreeTopology& tree, const RetrievalMark& marks) {
  const int layers = tree.layers();
  require(static_cast<int>(marks.retrieved.size()) == layers, "marks do not match the tree");
  ErasureState state;
  state.erased.resize(layers);
  state.cause.resize(layers);
  state.t_per_layer.assign(layers, 0.0);

  for (int l = layers - 1; l >= 0; --l) {
    const int width = tree.layer_sizes[l];
    require(static_cast<int>(marks.retrieved[l].size()) == width, "marks do not match the tree");
    auto& erased = state.erased[l];
    auto& cause = state.cause[l];
    erased.assign(width, false);
    cause.assign(width, ErasureCause::None);
    int count = 0;
    for (int i = 0; i < width; ++i) {
      if (marks.retrieved[l][i]) {
        erased[i] = true;
        cause[i] = ErasureCause::Retrieved;
      } else if (l + 1 < layers) {
        const auto& ps = tree.parents[l][i];
        const bool all = !ps.empty() && std::all_of(ps.begin(), ps.end(), [&](int j) {
          return static_cast<bool>(state.erased[l + 1][j]);
        });
        if (all) {
          erased[i] = true;
          cause[i] = ErasureCause::Cascaded;
        }
      }
      count += erased[i] ? 1 : 0;
    }
    state.t_per_layer[l] = static_cast<double>(count) / width;
  }
  return state;
}

int effective_depth(const ErasureState& state) {
  const int layers = static_cast<int>(state.t_per_layer.size());
  for (int l = layers - 1; l >= 0; --l) {
    if (state.t_per_layer[l] == 1.0) return layers - 1 - l;
  }
  return layers;
}

FissionRunResult run_monte_carlo(const std::vector<LayerParams>& params, std::size_t replicates,
                                 std::uint64_t seed, unsigned jobs) {
  validate_params(params);
  require(replicates >= 1, "need at least one replicate");
  const std::size_t layers = params.size();
  std::vector<std::vector<double>> per_rep(replicates);

  auto work = [&](std::size_t r) {
    Rng rng = Rng::derive(seed, r);
    const auto tree = build_tree(params, rng);
    const auto marks = apply_retrieval(tree, params, rng);
    per_rep[r] = propagate_fission(tree, marks).t_per_layer;
  };

  parallel_for(replicates, jobs, work);

  FissionRunResult result;
  result.params = params;
  result.replicates = replicates;
  result.seed = seed;
  result.std_defined = replicates > 1;
  result.mean_t.assign(layers, 0.0);
  result.std_t.assign(layers, 0.0);
  for (std::size_t l = 0; l < layers; ++l) {
    double sum = 0.0;
    for (std::size_t r = 0; r < replicates; ++r) sum += per_rep[r][l];
    const double mean = sum / replicates;
    double ss = 0.0;
    for (std::size_t r = 0; r < replicates; ++r) ss += (per_rep[r][l] - mean) * (per_rep[r][l] - mean);
    result.mean_t[l] = mean;
    result.std_t[l] = replicates > 1 ? std::sqrt(ss / (replicates - 1)) : 0.0;
  }
  return result;
}

TransitionSample simulate_transition(const LayerParams& child, int parent_width, int parent_erased,
                                     std::size_t replicates, std::uint64_t seed) {
  child.validate();
  require(parent_width >= 1, "parent layer needs at least one node");
  require(parent_erased >= 0 && parent_erased <= parent_width, "erased parents out of range");
  require(replicates >= 1, "need at least one replicate");

  std::vector<bool> parent_state(parent_width, false);
  for (int j = 0; j < parent_erased; ++j) parent_state[j] = true;

  TransitionSample sample;
  std::vector<std::vector<int>> parents;
  std::vector<bool> repaired;
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng = Rng::derive(seed, r);
    wire_layer(child.n_nodes, parent_width, child.q, rng, parents, repaired);
    for (int i = 0; i < child.n_nodes; ++i) {
      const bool retrieved = rng.bernoulli(child.p);
      const bool cascaded = std::all_of(parents[i].begin(), parents[i].end(),
                                        [&](int j) { return static_cast<bool>(parent_state[j]); });
      sample.erased += (retrieved || cascaded) ? 1 : 0;
    }
    sample.child_nodes += child.n_nodes;
  }
  return sample;
}

std::vector<LayerParams> draw_appendix_schedule(const AppendixScheduleConfig& config,
                                                std::vector<std::string>* clamp_flags) {
  require(config.layers >= 2, "appendix schedule needs at least two layers");
  require(config.sigma >= 0.0, "sigma must be non-negative");
  Rng rng = Rng::derive(config.seed, 0xA11CEULL);
  std::vector<LayerParams> params(config.layers);
  std::vector<std::string> flags(config.layers);
  auto clamp = [&](double v, std::string& flag, const char* name) {
    if (v < config.clamp_lo || v > config.clamp_hi) {
      if (!flag.empty()) flag += '|';
      flag += name;
      return std::clamp(v, config.clamp_lo, config.clamp_hi);
    }
    return v;
  };
  for (int l = 0; l < config.layers; ++l) {
    const double mu_pq = 0.8 - 0.06 * l;
    const double mu_n = 16.0 - 1.4 * l;
    auto& lp = params[l];
    lp.p = clamp(rng.normal(mu_pq, config.sigma), flags[l], "p");
    lp.q = clamp(rng.normal(mu_pq, config.sigma), flags[l], "q");
    const long n = std::lround(rng.normal(mu_n, config.sigma));
    lp.n_nodes = static_cast<int>(std::max(1L, n));
    if (n < 1) flags[l] += flags[l].empty() ? "n" : "|n";
  }
  if (params.back().n_nodes != 1) {
    params.back().n_nodes = 1;
    flags.back() += flags.back().empty() ? "top" : "|top";
  }
  if (clamp_flags) *clamp_flags = std::move(flags);
  return params;
}

std::vector<double> analytic_t_hat(const std::vector<LayerParams>& params) {
  std::vector<double> out(params.size());
  for (std::size_t l = 0; l < params.size(); ++l) {
    if (l + 1 == params.size()) {
      out[l] = params[l].p;
    } else {
      out[l] = first_zero_or_one({params[l].p, params[l].q, params[l + 1].n_nodes});
    }
  }
  return out;
}

std::vector<AppendixRow> replicate_appendix_sim(const AppendixScheduleConfig& config) {
  require(config.replicates >= 1, "need at least one replicate");
  std::vector<std::string> flags;
  const auto params = draw_appendix_schedule(config, &flags);
  const auto run = run_monte_carlo(params, config.replicates, config.seed, config.jobs);
  const auto t_hat = analytic_t_hat(params);
  std::vector<AppendixRow> rows(params.size());
  for (std::size_t l = 0; l < params.size(); ++l) {
    auto& row = rows[l];
    row.layer = static_cast<int>(l);
    row.params = params[l];
    row.mean_t = run.mean_t[l];
    row.std_t = run.std_t[l];
    row.t_hat = t_hat[l];
    row.clamped_flags = flags[l];
    if (!run.std_defined) {
      row.clamped_flags += row.clamped_flags.empty() ? "std_undefined" : "|std_undefined";
    }
  }
  return rows;
}

namespace {
Table layer_table() {
  Table t;
  t.columns = {"layer", "p", "q", "n", "mean_t", "std_t", "t_hat", "clamped_flags"};
  return t;
}
}  // namespace

Table monte_carlo_table(const FissionRunResult& result) {
  Table table = layer_table();
  const auto t_hat = analytic_t_hat(result.params);
  for (std::size_t l = 0; l < result.params.size(); ++l) {
    const auto& lp = result.params[l];
    table.add_row({static_cast<std::int64_t>(l), lp.p, lp.q, static_cast<std::int64_t>(lp.n_nodes),
                   result.mean_t[l], result.std_t[l], t_hat[l],
                   std::string(result.std_defined ? "" : "std_undefined")});
  }
  return table;
}

Table appendix_table(const std::vector<AppendixRow>& rows) {
  Table table = layer_table();
  for (const auto& r : rows) {
    table.add_row({static_cast<std::int64_t>(r.layer), r.params.p, r.params.q,
                   static_cast<std::int64_t>(r.params.n_nodes), r.mean_t, r.std_t, r.t_hat,
                   r.clamped_flags});
  }
  return table;
}

ExampleInstance worked_example_instance() {
  ExampleInstance ex;
  auto& tree = ex.tree;
  tree.layer_sizes = {2, 4, 3, 1};
  tree.parents = {
      {{0}, {1}},                // u(0,1) depends only on u(1,1)
      {{0}, {1}, {2}, {2}},      // u(1,0) -> u(2,0); u(1,2), u(1,3) -> u(2,2)
      {{0}, {0}, {0}},
      {{}},
  };
  tree.repaired = {{false, false}, {false, false, false, false}, {false, false, false}, {false}};
  ex.marks.retrieved = {{false, false}, {false, true, false, false}, {true, false, true}, {false}};
  return ex;
}

}  // namespace ragdepth::fission
