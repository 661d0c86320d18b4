#include "ragdepth/toy/task.hpp"

#include <algorithm>
#include <string>

#include "ragdepth/errors.hpp"

namespace ragdepth::toy {

using detail::require;

std::size_t ToyTask::labeled_count() const {
  return static_cast<std::size_t>(std::count(labeled.begin(), labeled.end(), true));
}

void ToyTask::validate() const {
  const std::size_t n = tokens.size();
  require(n >= 2, "task needs at least two tokens");
  require(labels.size() == n && labeled.size() == n && readout_position.size() == n &&
              readout_slot.size() == n,
          "per-token arrays must match the token count");
  for (std::size_t i = 0; i < n; ++i) {
    require(tokens[i].w_part >= 0 && tokens[i].w_part < modulus, "w-part outside [0, M)");
    require(readout_position[i] >= 0 && readout_position[i] < static_cast<int>(n),
            "readout position out of range");
  }
}

std::string_view to_string(PredicateKind kind) {
  switch (kind) {
    case PredicateKind::Pairwise: return "pairwise";
    case PredicateKind::Triplewise: return "triplewise";
    case PredicateKind::VirtualPairwise: return "virtual_pairwise";
    case PredicateKind::Disjointness: return "disjointness";
  }
  return "?";
}

PredicateKind parse_predicate_kind(std::string_view name) {
  for (auto k : {PredicateKind::Pairwise, PredicateKind::Triplewise, PredicateKind::VirtualPairwise,
                 PredicateKind::Disjointness}) {
    if (name == to_string(k)) return k;
  }
  throw DomainError("unknown task kind: " + std::string(name));
}

std::string_view to_string(QueryLayout layout) {
  return layout == QueryLayout::QueryFirst ? "query_first" : "query_last";
}

QueryLayout parse_query_layout(std::string_view name) {
  if (name == "query_first") return QueryLayout::QueryFirst;
  if (name == "query_last") return QueryLayout::QueryLast;
  throw DomainError("unknown layout: " + std::string(name));
}

std::vector<int> brute_force_labels(const std::vector<ToyToken>& tokens, PredicateKind kind,
                                    int modulus) {
  const int n = static_cast<int>(tokens.size());
  std::vector<int> labels(n, 1);
  auto w = [&](int i) { return tokens[i].w_part; };
  for (int i = 0; i < n; ++i) {
    bool noise = false;
    switch (kind) {
      case PredicateKind::Pairwise:
        for (int b = 0; b < n && !noise; ++b) {
          noise = b != i && (w(i) + w(b)) % modulus == 0;
        }
        break;
      case PredicateKind::Disjointness: {
        // Anchored at x_0 with paired slots (k, k + n_d).
        const int nd = n / 2;
        for (int k = 1; k < nd && !noise; ++k) {
          noise = (w(0) + w(k) + w(k + nd)) % modulus == 0;
        }
        break;
      }
      case PredicateKind::Triplewise:
        for (int a = 0; a < n && !noise; ++a) {
          for (int b = a + 1; b < n && !noise; ++b) {
            noise = a != i && b != i && (w(i) + w(a) + w(b)) % modulus == 0;
          }
        }
        break;
      case PredicateKind::VirtualPairwise:
        if (i == 0) break;
        for (int b = 1; b < n && !noise; ++b) {
          noise = b != i && (w(i) + w(0) + w(b)) % modulus == 0;
        }
        break;
    }
    labels[i] = noise ? 0 : 1;
  }
  return labels;
}

namespace {

ToyTask finish(std::vector<ToyToken> tokens, PredicateKind kind, int modulus) {
  ToyTask task;
  const int n = static_cast<int>(tokens.size());
  task.tokens = std::move(tokens);
  task.predicate_kind = kind;
  task.modulus = modulus;
  task.labels = brute_force_labels(task.tokens, kind, modulus);
  task.labeled.assign(n, true);
  task.readout_position.resize(n);
  task.readout_slot.assign(n, 0);
  for (int i = 0; i < n; ++i) task.readout_position[i] = i;
  if (kind == PredicateKind::VirtualPairwise) task.labeled[0] = false;
  task.validate();
  return task;
}

}  // namespace

ToyTask make_task(PredicateKind kind, const std::vector<int>& w_parts, int modulus) {
  require(modulus >= 2, "modulus must be at least 2");
  require(kind != PredicateKind::Disjointness, "use gen_disjointness for disjointness tasks");
  std::vector<ToyToken> tokens;
  for (std::size_t i = 0; i < w_parts.size(); ++i) {
    tokens.push_back({static_cast<int>(i), w_parts[i], Role::Document});
  }
  if (kind == PredicateKind::VirtualPairwise) tokens.at(0).role = Role::Virtual;
  return finish(std::move(tokens), kind, modulus);
}

ToyTask gen_disjointness(const std::vector<int>& a, const std::vector<int>& b, int modulus) {
  const int nd = static_cast<int>(a.size());
  require(nd >= 2 && b.size() == a.size(), "disjointness needs equal bit vectors of length >= 2");
  require(modulus >= 5, "disjointness encoding needs modulus >= 5");
  constexpr int kBlank = 0;
  constexpr int kAnchor = 1;
  constexpr int kA = 2;
  const int kB = modulus - 3;
  std::vector<ToyToken> tokens(2 * nd);
  tokens[0] = {0, kAnchor, Role::Query};
  for (int k = 1; k < nd; ++k) {
    tokens[k] = {k, a[k] ? kA : kBlank, Role::Document};
  }
  for (int k = 0; k < nd; ++k) {
    tokens[nd + k] = {nd + k, (k > 0 && b[k]) ? kB : kBlank, Role::Document};
  }
  return finish(std::move(tokens), PredicateKind::Disjointness, modulus);
}

ToyTask gen_task(PredicateKind kind, int n_tokens, int modulus, Rng& rng) {
  require(modulus >= 2, "modulus must be at least 2");
  require(n_tokens >= 2, "task needs at least two tokens");
  if (kind == PredicateKind::Triplewise || kind == PredicateKind::VirtualPairwise) {
    require(n_tokens >= 3, "this task kind needs at least three tokens");
  }
  if (kind == PredicateKind::Disjointness) {
    require(n_tokens % 2 == 0 && n_tokens >= 4, "disjointness needs an even count >= 4");
    const int nd = n_tokens / 2;
    std::vector<int> a(nd, 0), b(nd, 0);
    for (int k = 1; k < nd; ++k) {
      a[k] = rng.bernoulli(0.5) ? 1 : 0;
      b[k] = rng.bernoulli(0.5) ? 1 : 0;
    }
    return gen_disjointness(a, b, modulus);
  }
  std::vector<int> w(n_tokens);
  for (auto& v : w) v = static_cast<int>(rng.index(modulus));
  if (kind == PredicateKind::VirtualPairwise) {
    // Document signature: sum of document w-parts folded mod M.
    int sig = 0;
    for (int i = 1; i < n_tokens; ++i) sig = (sig + w[i]) % modulus;
    w[0] = sig;
  }
  return make_task(kind, w, modulus);
}

ToyTask gen_ordering_task(QueryLayout layout, int n_documents, int modulus, Rng& rng) {
  require(n_documents >= 1, "need at least one document");
  require(modulus >= 2, "modulus must be at least 2");
  const int n = n_documents + 1;
  const int wq = static_cast<int>(rng.index(modulus));
  const int partner = (modulus - wq) % modulus;
  std::vector<int> doc_w(n_documents);
  for (auto& w : doc_w) {
    if (rng.bernoulli(0.5)) {
      w = partner;
    } else {
      w = static_cast<int>(rng.index(modulus - 1));
      if (w >= partner) ++w;
    }
  }

  ToyTask task;
  task.predicate_kind = PredicateKind::Pairwise;
  task.modulus = modulus;
  task.tokens.resize(n);
  task.labels.assign(n, 1);
  task.labeled.assign(n, false);
  task.readout_position.assign(n, 0);
  task.readout_slot.assign(n, 0);
  const int query_pos = layout == QueryLayout::QueryFirst ? 0 : n - 1;
  const int first_doc = layout == QueryLayout::QueryFirst ? 1 : 0;
  task.tokens[query_pos] = {0, wq, Role::Query};
  task.readout_position[query_pos] = query_pos;
  for (int d = 0; d < n_documents; ++d) {
    const int pos = first_doc + d;
    task.tokens[pos] = {d + 1, doc_w[d], Role::Document};
    task.labels[pos] = (doc_w[d] + wq) % modulus == 0 ? 0 : 1;
    task.labeled[pos] = true;
    if (layout == QueryLayout::QueryFirst) {
      task.readout_position[pos] = pos;
    } else {
      task.readout_position[pos] = query_pos;
      task.readout_slot[pos] = d;
    }
  }
  task.validate();
  return task;
}

}  // namespace ragdepth::toy
