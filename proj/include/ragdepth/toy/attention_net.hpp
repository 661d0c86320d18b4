#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ragdepth/random.hpp"
#include "ragdepth/toy/task.hpp"

namespace ragdepth::toy {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

struct NetShape {
  int layers = 1;
  int heads = 2;
  int embed_dim = 32;
  int ff_dim = 64;
  // Size of the w-part vocabulary (the task modulus or larger).
  int vocab = 16;
  int max_len = 16;
  // Output logits per position; tasks with per-document readout use > 1.
  int slots = 1;
  bool causal = false;
  // Nominal bits per parameter, used only in capacity accounting.
  int precision_bits = 32;

  void validate() const;
};

struct FeedForward {
  Matrix w1;
  RowVector b1;
  Matrix w2;
  RowVector b2;
};

struct AttentionLayer {
  Matrix wq, wk, wv, wo;
  // Residual feed-forward block after the attention; present on every layer but
  // the last, whose output goes to the relevance head.
  bool has_mlp = false;
  FeedForward mlp;
};

// Token embedding (w one-hot, role one-hot, position one-hot), attention layers
// with residual connections, and a two-layer feed-forward relevance head
// producing `slots` logits per position. The same type stores gradients.
struct AttentionNet {
  NetShape shape;
  Matrix embed;
  std::vector<AttentionLayer> layers;
  FeedForward head;

  static AttentionNet zeros(const NetShape& shape);
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  static AttentionNet random(const NetShape& shape, Rng& rng);

  std::size_t parameter_count() const;

  // Visits every parameter matrix paired with the same matrix of `other`.
  template <class Fn>
  void zip(AttentionNet& other, Fn&& fn);
  template <class Fn>
  void for_each(Fn&& fn);
  template <class Fn>
  void for_each(Fn&& fn) const;
};

struct ForwardResult {
  // Per-position attention weights, [layer][head] -> n x n.
  std::vector<std::vector<Matrix>> attention;
  // Logits at each position, n x slots.
  Matrix logits;
};

ForwardResult forward_full(const AttentionNet& net, const ToyTask& task);

// Relevance probability for every token (0 for unlabeled tokens).
std::vector<double> forward(const AttentionNet& net, const ToyTask& task);

// Mean binary cross-entropy over all labeled tokens of the batch.
double loss(const AttentionNet& net, std::span<const ToyTask> batch);

// Loss and exact gradients; `grad` is resized to match the net.
double loss_and_gradients(const AttentionNet& net, std::span<const ToyTask> batch,
                          AttentionNet& grad);

// Fraction of labeled tokens predicted correctly (probability >= 0.5 -> 1).
double accuracy(const AttentionNet& net, std::span<const ToyTask> tasks);

template <class Fn>
void AttentionNet::zip(AttentionNet& other, Fn&& fn) {
  auto ff = [&](FeedForward& a, FeedForward& b, const std::string& p) {
    fn(p + "w1", a.w1, b.w1);
    fn(p + "b1", a.b1, b.b1);
    fn(p + "w2", a.w2, b.w2);
    fn(p + "b2", a.b2, b.b2);
  };
  fn(std::string("embed"), embed, other.embed);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    fn(p + "wq", layers[l].wq, other.layers[l].wq);
    fn(p + "wk", layers[l].wk, other.layers[l].wk);
    fn(p + "wv", layers[l].wv, other.layers[l].wv);
    fn(p + "wo", layers[l].wo, other.layers[l].wo);
    if (layers[l].has_mlp) ff(layers[l].mlp, other.layers[l].mlp, p + "mlp.");
  }
  ff(head, other.head, "head.");
}

template <class Fn>
void AttentionNet::for_each(Fn&& fn) {
  zip(*this, [&](const std::string& name, auto& a, auto&) { fn(name, a); });
}

template <class Fn>
void AttentionNet::for_each(Fn&& fn) const {
  const_cast<AttentionNet*>(this)->for_each(
      [&](const std::string& name, auto& a) { fn(name, std::as_const(a)); });
}

}  // namespace ragdepth::toy
