#pragma once

namespace ragdepth::toy {

struct CapacityReport {
  // m * p * H
  double budget_bits = 0.0;
  // c * n * H(w) / ln ln n
  double threshold_bits = 0.0;
  // budget <= threshold: no one-layer transformer of this size decides relevance.
  bool impossible = false;
  double margin = 0.0;
};

// Requires n >= 3 so that ln ln n > 0.
CapacityReport capacity_check(int m, int p_bits, int heads, int n, double H_w, double c = 1.0);

// Embedding budget needed to decide pair-wise relevance under a causal mask.
struct OrderingCapacity {
  double budget_bits = 0.0;           // m * p
  double query_last_required = 0.0;   // (n_documents + 1) * H(w)
  double query_first_required = 0.0;  // 2 * H(w)
  bool query_last_satisfied = false;
  bool query_first_satisfied = false;
};

OrderingCapacity ordering_capacity(int m, int p_bits, int n_documents, double H_w);

}  // namespace ragdepth::toy
