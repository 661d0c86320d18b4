#include "ragdepth/toy/attention_net.hpp"

#include <cmath>
#include <limits>

#include "ragdepth/errors.hpp"

namespace ragdepth::toy {

using detail::require;

void NetShape::validate() const {
  require(layers >= 1, "net needs at least one layer");
  require(heads >= 1 && embed_dim >= heads && embed_dim % heads == 0,
          "embed_dim must be a positive multiple of heads");
  require(ff_dim >= 1 && vocab >= 2 && max_len >= 2 && slots >= 1, "invalid net shape");
}

namespace {

int input_dim(const NetShape& s) { return s.vocab + 3 + s.max_len; }

FeedForward ff_zeros(int in, int hidden, int out) {
  return {Matrix::Zero(in, hidden), RowVector::Zero(hidden), Matrix::Zero(hidden, out),
          RowVector::Zero(out)};
}

void fill_uniform(Matrix& m, double bound, Rng& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (2.0 * rng.uniform() - 1.0) * bound;
}
void fill_uniform(RowVector& v, double bound, Rng& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = (2.0 * rng.uniform() - 1.0) * bound;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

Matrix relu(const Matrix& m) { return m.cwiseMax(0.0); }
Matrix relu_mask(const Matrix& m) { return (m.array() > 0.0).cast<double>().matrix(); }

// Everything the backward pass needs from one example.
struct LayerCache {
  Matrix input;  // n x m
  Matrix q, k, v;
  std::vector<Matrix> attn;  // per head, n x n
  Matrix concat;             // n x m
  Matrix after_attn;         // input + concat wo
  Matrix mlp_pre;            // n x ff
  Matrix mlp_hidden;
};

struct Cache {
  std::vector<LayerCache> layers;
  Matrix final_z;
  Matrix head_pre;
  Matrix head_hidden;
  Matrix logits;
};

void check_task(const AttentionNet& net, const ToyTask& task) {
  const auto& s = net.shape;
  require(static_cast<int>(task.size()) <= s.max_len, "task longer than the net's max_len");
  for (std::size_t i = 0; i < task.size(); ++i) {
    require(task.tokens[i].w_part < s.vocab, "w-part exceeds the net's vocabulary");
    require(task.readout_slot[i] < s.slots, "readout slot exceeds the net's slots");
  }
}

Matrix embed_tokens(const AttentionNet& net, const ToyTask& task) {
  const auto& s = net.shape;
  const int n = static_cast<int>(task.size());
  Matrix z(n, s.embed_dim);
  for (int i = 0; i < n; ++i) {
    const auto& t = task.tokens[i];
    z.row(i) = net.embed.row(t.w_part) + net.embed.row(s.vocab + static_cast<int>(t.role)) +
               net.embed.row(s.vocab + 3 + i);
  }
  return z;
}

Cache run_forward(const AttentionNet& net, const ToyTask& task) {
  check_task(net, task);
  const auto& s = net.shape;
  const int n = static_cast<int>(task.size());
  const int dh = s.embed_dim / s.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Cache cache;
  Matrix z = embed_tokens(net, task);
  cache.layers.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    auto& c = cache.layers[l];
    c.input = z;
    c.q = z * layer.wq;
    c.k = z * layer.wk;
    c.v = z * layer.wv;
    c.concat.resize(n, s.embed_dim);
    c.attn.resize(s.heads);
    for (int h = 0; h < s.heads; ++h) {
      const auto qh = c.q.middleCols(h * dh, dh);
      const auto kh = c.k.middleCols(h * dh, dh);
      Matrix scores = (qh * kh.transpose()) * scale;
      Matrix& a = c.attn[h];
      a.setZero(n, n);
      for (int i = 0; i < n; ++i) {
        const int visible = s.causal ? i + 1 : n;
        const double mx = scores.row(i).head(visible).maxCoeff();
        double sum = 0.0;
        for (int j = 0; j < visible; ++j) {
          a(i, j) = std::exp(scores(i, j) - mx);
          sum += a(i, j);
        }
        a.row(i).head(visible) /= sum;
      }
      c.concat.middleCols(h * dh, dh) = a * c.v.middleCols(h * dh, dh);
    }
    c.after_attn = z + c.concat * layer.wo;
    z = c.after_attn;
    if (layer.has_mlp) {
      c.mlp_pre = (z * layer.mlp.w1).rowwise() + layer.mlp.b1;
      c.mlp_hidden = relu(c.mlp_pre);
      z = z + ((c.mlp_hidden * layer.mlp.w2).rowwise() + layer.mlp.b2);
    }
  }
  cache.final_z = z;
  cache.head_pre = (z * net.head.w1).rowwise() + net.head.b1;
  cache.head_hidden = relu(cache.head_pre);
  cache.logits = (cache.head_hidden * net.head.w2).rowwise() + net.head.b2;
  return cache;
}

double target_logit(const Cache& cache, const ToyTask& task, std::size_t i) {
  return cache.logits(task.readout_position[i], task.readout_slot[i]);
}

void accumulate_ff_backward(const FeedForward& ff, const Matrix& input, const Matrix& pre,
                            const Matrix& hidden, const Matrix& d_out, FeedForward& g,
                            Matrix& d_input) {
  g.w2 += hidden.transpose() * d_out;
  g.b2 += d_out.colwise().sum();
  const Matrix d_pre = (d_out * ff.w2.transpose()).cwiseProduct(relu_mask(pre));
  g.w1 += input.transpose() * d_pre;
  g.b1 += d_pre.colwise().sum();
  d_input = d_pre * ff.w1.transpose();
}

}  // namespace

AttentionNet AttentionNet::zeros(const NetShape& shape) {
  shape.validate();
  AttentionNet net;
  net.shape = shape;
  const int m = shape.embed_dim;
  net.embed = Matrix::Zero(input_dim(shape), m);
  net.layers.resize(shape.layers);
  for (int l = 0; l < shape.layers; ++l) {
    auto& layer = net.layers[l];
    layer.wq = layer.wk = layer.wv = layer.wo = Matrix::Zero(m, m);
    layer.has_mlp = l + 1 < shape.layers;
    if (layer.has_mlp) layer.mlp = ff_zeros(m, shape.ff_dim, m);
  }
  net.head = ff_zeros(m, shape.ff_dim, shape.slots);
  return net;
}

AttentionNet AttentionNet::random(const NetShape& shape, Rng& rng) {
  AttentionNet net = zeros(shape);
  const double in_bound = 1.0 / std::sqrt(static_cast<double>(input_dim(shape)));
  fill_uniform(net.embed, in_bound, rng);
  const double m_bound = 1.0 / std::sqrt(static_cast<double>(shape.embed_dim));
  const double ff_bound = 1.0 / std::sqrt(static_cast<double>(shape.ff_dim));
  auto init_ff = [&](FeedForward& ff) {
    fill_uniform(ff.w1, m_bound, rng);
    fill_uniform(ff.b1, m_bound, rng);
    fill_uniform(ff.w2, ff_bound, rng);
    fill_uniform(ff.b2, ff_bound, rng);
  };
  for (auto& layer : net.layers) {
    fill_uniform(layer.wq, m_bound, rng);
    fill_uniform(layer.wk, m_bound, rng);
    fill_uniform(layer.wv, m_bound, rng);
    fill_uniform(layer.wo, m_bound, rng);
    if (layer.has_mlp) init_ff(layer.mlp);
  }
  init_ff(net.head);
  return net;
}

std::size_t AttentionNet::parameter_count() const {
  std::size_t count = 0;
  for_each([&](const std::string&, const auto& m) { count += static_cast<std::size_t>(m.size()); });
  return count;
}

ForwardResult forward_full(const AttentionNet& net, const ToyTask& task) {
  Cache cache = run_forward(net, task);
  ForwardResult out;
  for (auto& c : cache.layers) out.attention.push_back(std::move(c.attn));
  out.logits = std::move(cache.logits);
  return out;
}

std::vector<double> forward(const AttentionNet& net, const ToyTask& task) {
  const Cache cache = run_forward(net, task);
  std::vector<double> probs(task.size(), 0.0);
  for (std::size_t i = 0; i < task.size(); ++i) {
    if (task.labeled[i]) probs[i] = sigmoid(target_logit(cache, task, i));
  }
  return probs;
}

double loss(const AttentionNet& net, std::span<const ToyTask> batch) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& task : batch) {
    const Cache cache = run_forward(net, task);
    for (std::size_t i = 0; i < task.size(); ++i) {
      if (!task.labeled[i]) continue;
      const double x = target_logit(cache, task, i);
      total += softplus(x) - task.labels[i] * x;
      ++count;
    }
  }
  require(count > 0, "batch has no labeled tokens");
  return total / static_cast<double>(count);
}

double loss_and_gradients(const AttentionNet& net, std::span<const ToyTask> batch,
                          AttentionNet& grad) {
  const auto& s = net.shape;
  grad = AttentionNet::zeros(s);
  std::size_t count = 0;
  for (const auto& task : batch) count += task.labeled_count();
  require(count > 0, "batch has no labeled tokens");
  const double inv = 1.0 / static_cast<double>(count);
  const int dh = s.embed_dim / s.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  double total = 0.0;
  for (const auto& task : batch) {
    const Cache cache = run_forward(net, task);
    const int n = static_cast<int>(task.size());

    Matrix d_logits = Matrix::Zero(n, s.slots);
    for (int i = 0; i < n; ++i) {
      if (!task.labeled[i]) continue;
      const double x = target_logit(cache, task, i);
      total += softplus(x) - task.labels[i] * x;
      d_logits(task.readout_position[i], task.readout_slot[i]) += (sigmoid(x) - task.labels[i]) * inv;
    }

    Matrix dz;
    accumulate_ff_backward(net.head, cache.final_z, cache.head_pre, cache.head_hidden, d_logits,
                           grad.head, dz);

    for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
      const auto& layer = net.layers[l];
      const auto& c = cache.layers[l];
      auto& g = grad.layers[l];
      if (layer.has_mlp) {
        Matrix d_in;
        accumulate_ff_backward(layer.mlp, c.after_attn, c.mlp_pre, c.mlp_hidden, dz, g.mlp, d_in);
        dz += d_in;
      }
      // dz is now the gradient w.r.t. after_attn = input + concat wo.
      g.wo += c.concat.transpose() * dz;
      const Matrix d_concat = dz * layer.wo.transpose();
      Matrix dq(n, s.embed_dim), dk(n, s.embed_dim), dv(n, s.embed_dim);
      for (int h = 0; h < s.heads; ++h) {
        const Matrix& a = c.attn[h];
        const auto d_out = d_concat.middleCols(h * dh, dh);
        dv.middleCols(h * dh, dh) = a.transpose() * d_out;
        const Matrix d_a = d_out * c.v.middleCols(h * dh, dh).transpose();
        // Softmax backward; masked entries have a = 0 and get no gradient.
        const Eigen::VectorXd row_dot = (d_a.cwiseProduct(a)).rowwise().sum();
        const Matrix d_scores = a.cwiseProduct(d_a - row_dot.replicate(1, n)) * scale;
        dq.middleCols(h * dh, dh) = d_scores * c.k.middleCols(h * dh, dh);
        dk.middleCols(h * dh, dh) = d_scores.transpose() * c.q.middleCols(h * dh, dh);
      }
      g.wq += c.input.transpose() * dq;
      g.wk += c.input.transpose() * dk;
      g.wv += c.input.transpose() * dv;
      dz += dq * layer.wq.transpose() + dk * layer.wk.transpose() + dv * layer.wv.transpose();
    }

    for (int i = 0; i < n; ++i) {
      const auto& t = task.tokens[i];
      grad.embed.row(t.w_part) += dz.row(i);
      grad.embed.row(s.vocab + static_cast<int>(t.role)) += dz.row(i);
      grad.embed.row(s.vocab + 3 + i) += dz.row(i);
    }
  }
  return total * inv;
}

double accuracy(const AttentionNet& net, std::span<const ToyTask> tasks) {
  std::size_t correct = 0;
  std::size_t count = 0;
  for (const auto& task : tasks) {
    const auto probs = forward(net, task);
    for (std::size_t i = 0; i < task.size(); ++i) {
      if (!task.labeled[i]) continue;
      const int predicted = probs[i] >= 0.5 ? 1 : 0;
      correct += predicted == task.labels[i] ? 1 : 0;
      ++count;
    }
  }
  return count ? static_cast<double>(correct) / count : 0.0;
}

}  // namespace ragdepth::toy
