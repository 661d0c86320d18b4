#include "ragdepth/toy/capacity.hpp"

#include <cmath>

#include "ragdepth/errors.hpp"

namespace ragdepth::toy {

using detail::require;

CapacityReport capacity_check(int m, int p_bits, int heads, int n, double H_w, double c) {
  require(m >= 1 && p_bits >= 1 && heads >= 1, "m, p and H must be positive");
  require(n >= 3, "n must be at least 3 so that ln ln n > 0");
  require(H_w >= 0.0, "H(w) must be non-negative");
  require(c > 0.0, "c must be positive");
  CapacityReport r;
  r.budget_bits = static_cast<double>(m) * p_bits * heads;
  r.threshold_bits = c * n * H_w / std::log(std::log(static_cast<double>(n)));
  r.impossible = H_w > 0.0 && r.budget_bits <= r.threshold_bits;
  r.margin = r.budget_bits - r.threshold_bits;
  return r;
}

OrderingCapacity ordering_capacity(int m, int p_bits, int n_documents, double H_w) {
  require(m >= 1 && p_bits >= 1 && n_documents >= 1, "m, p and n_documents must be positive");
  require(H_w >= 0.0, "H(w) must be non-negative");
  OrderingCapacity r;
  r.budget_bits = static_cast<double>(m) * p_bits;
  r.query_last_required = (n_documents + 1) * H_w;
  r.query_first_required = 2.0 * H_w;
  r.query_last_satisfied = r.budget_bits >= r.query_last_required;
  r.query_first_satisfied = r.budget_bits >= r.query_first_required;
  return r;
}

}  // namespace ragdepth::toy
