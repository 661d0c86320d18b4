#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ragdepth/random.hpp"
#include "ragdepth/table.hpp"

namespace ragdepth::fission {

// Layer l of a reasoning tree. Layer 0 is the bottom, the last layer is the
// single answer node. q is the chance a node of this layer is NOT wired to a
// given node of the layer above.
struct LayerParams {
  double p = 0.0;
  double q = 0.5;
  int n_nodes = 1;

  void validate() const;
};

struct TreeTopology {
  std::vector<int> layer_sizes;
  // parents[l][i]: indices in layer l + 1 that node (l, i) depends on. Empty
  // for the top layer.
  std::vector<std::vector<std::vector<int>>> parents;
  // Node had no random edge and received one uniformly chosen parent.
  std::vector<std::vector<bool>> repaired;

  int layers() const { return static_cast<int>(layer_sizes.size()); }
  void validate() const;
};

struct RetrievalMark {
  std::vector<std::vector<bool>> retrieved;
};

enum class ErasureCause : std::uint8_t { None, Retrieved, Cascaded };

struct ErasureState {
  std::vector<std::vector<bool>> erased;
  std::vector<std::vector<ErasureCause>> cause;
  std::vector<double> t_per_layer;
};

TreeTopology build_tree(const std::vector<LayerParams>& params, Rng& rng);

RetrievalMark apply_retrieval(const TreeTopology& tree, const std::vector<LayerParams>& params,
                              Rng& rng);

// Top-down sweep: a node is erased when retrieved, or when every parent is
// erased. The top node has no parents and is erased only by retrieval.
ErasureState propagate_fission(const TreeTopology& tree, const RetrievalMark& marks);

// Layers still needed after erasure: everything at or below the highest fully
// erased layer is dropped.
int effective_depth(const ErasureState& state);

struct FissionRunResult {
  std::vector<LayerParams> params;
  std::size_t replicates = 0;
  std::vector<double> mean_t;
  // Sample standard deviation; 0 when replicates == 1 (see std_defined).
  std::vector<double> std_t;
  bool std_defined = false;
  std::uint64_t seed = 0;
};

// Replicate r draws from Rng::derive(seed, r), so results do not depend on jobs.
FissionRunResult run_monte_carlo(const std::vector<LayerParams>& params, std::size_t replicates,
                                 std::uint64_t seed, unsigned jobs = 1);

struct TransitionSample {
  std::size_t child_nodes = 0;
  std::size_t erased = 0;
  double fraction() const { return child_nodes ? static_cast<double>(erased) / child_nodes : 0.0; }
};

// One layer transition with the parent layer's erasure pinned: `parent_erased`
// of `parent_width` parents are erased, and `replicates` fresh child layers of
// `child.n_nodes` nodes are wired and swept.
TransitionSample simulate_transition(const LayerParams& child, int parent_width, int parent_erased,
                                     std::size_t replicates, std::uint64_t seed);

struct AppendixScheduleConfig {
  int layers = 10;
  std::size_t replicates = 10;
  std::uint64_t seed = 0;
  // Normal(mu, 0.01) read as a variance, so the stddev is 0.1.
  double sigma = 0.1;
  double clamp_lo = 0.01;
  double clamp_hi = 0.99;
  unsigned jobs = 1;
};

struct AppendixRow {
  int layer = 0;
  LayerParams params;
  double mean_t = 0.0;
  double std_t = 0.0;
  // Analytic first zero of the layer's recurrence (1 when no interior zero);
  // the top layer uses its base case t = p.
  double t_hat = 0.0;
  std::string clamped_flags;
};

// Layer parameters drawn from p, q ~ N(0.8 - 0.06 l, sigma), n ~ N(16 - 1.4 l,
// sigma); the top layer is forced to a single node.
std::vector<LayerParams> draw_appendix_schedule(const AppendixScheduleConfig& config,
                                                std::vector<std::string>* clamp_flags = nullptr);

std::vector<AppendixRow> replicate_appendix_sim(const AppendixScheduleConfig& config);

// Analytic t_hat for each layer of a schedule, as used in the tables.
std::vector<double> analytic_t_hat(const std::vector<LayerParams>& params);

// Columns: layer,p,q,n,mean_t,std_t,t_hat,clamped_flags.
Table monte_carlo_table(const FissionRunResult& result);
Table appendix_table(const std::vector<AppendixRow>& rows);

// Four-layer example with retrieved nodes u(2,0), u(1,1), u(2,2). The bottom
// layer width (2) and the remaining edges are fixture choices.
struct ExampleInstance {
  TreeTopology tree;
  RetrievalMark marks;
};
ExampleInstance worked_example_instance();

}  // namespace ragdepth::fission
