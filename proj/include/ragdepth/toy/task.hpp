#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ragdepth/random.hpp"

namespace ragdepth::toy {

enum class Role : std::uint8_t { Query, Document, Virtual };

// x = [s, w]: s is inference payload, w the relevance information in [0, M).
struct ToyToken {
  int s_part = 0;
  int w_part = 0;
  Role role = Role::Document;
};

enum class PredicateKind { Pairwise, Triplewise, VirtualPairwise, Disjointness };

enum class QueryLayout { QueryFirst, QueryLast };

struct ToyTask {
  std::vector<ToyToken> tokens;
  // r_i: 0 marks a noise token, 1 a relevant one. Only meaningful where labeled.
  std::vector<int> labels;
  std::vector<bool> labeled;
  // Where the relevance of token i is read out: position and output slot.
  std::vector<int> readout_position;
  std::vector<int> readout_slot;
  PredicateKind predicate_kind = PredicateKind::Pairwise;
  int modulus = 2;

  std::size_t size() const { return tokens.size(); }
  std::size_t labeled_count() const;
  void validate() const;
};

std::string_view to_string(PredicateKind kind);
PredicateKind parse_predicate_kind(std::string_view name);
std::string_view to_string(QueryLayout layout);
QueryLayout parse_query_layout(std::string_view name);

// Labels by exhaustive search:
//   Pairwise:        r_i = 0 iff some b != i has w_i + w_b = 0 (mod M)
//   Triplewise:      r_i = 0 iff distinct a, b (both != i) have w_i + w_a + w_b = 0
//   VirtualPairwise: as Triplewise with a fixed to the virtual token at position 0
// The virtual token itself is unlabeled.
std::vector<int> brute_force_labels(const std::vector<ToyToken>& tokens, PredicateKind kind,
                                    int modulus);

// Random task with uniformly drawn w-parts. Disjointness delegates to
// gen_disjointness with random bit vectors.
ToyTask gen_task(PredicateKind kind, int n_tokens, int modulus, Rng& rng);

// Tasks built from explicit w-parts (all tokens are documents).
ToyTask make_task(PredicateKind kind, const std::vector<int>& w_parts, int modulus);

// Two-party disjointness layout on 2 n_d positions: position 0 holds the fixed
// token x_0, position k in [1, n_d) holds x_a iff a[k] = 1 (blank otherwise),
// position n_d + k holds x_b iff b[k] = 1. x_0 + x_a + x_b = 0 (mod M), so a
// triple fires only when a paired slot has both bits set. Every label is
// 1 - DISJ(a, b). Bit 0 of a and b has no slot and is ignored.
ToyTask gen_disjointness(const std::vector<int>& a, const std::vector<int>& b, int modulus);

// One query token and n_documents single-token documents. Each document is a
// partner of the query (w_d + w_q = 0 mod M, label 0) with probability 1/2.
// QueryFirst reads each document's relevance at the document; QueryLast reads
// all of them from the final (query) position through per-document slots.
ToyTask gen_ordering_task(QueryLayout layout, int n_documents, int modulus, Rng& rng);

}  // namespace ragdepth::toy
