#pragma once

// Central finite-difference check of loss_and_gradients; uses only loss().

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "ragdepth/toy/attention_net.hpp"

namespace ragdepth::toy {

struct GradCheckResult {
  double worst_relative = 0.0;
  std::string worst_parameter;
  std::size_t coordinates = 0;
};

inline GradCheckResult check_gradients(const AttentionNet& net,
                                       std::span<const ToyTask> batch, double h = 1e-5) {
  AttentionNet analytic;
  loss_and_gradients(net, batch, analytic);
  AttentionNet probe = net;
  GradCheckResult out;
  probe.zip(analytic, [&](const std::string& name, auto& w, auto& g) {
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double saved = w.data()[i];
      w.data()[i] = saved + h;
      const double up = loss(probe, batch);
      w.data()[i] = saved - h;
      const double down = loss(probe, batch);
      w.data()[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double exact = g.data()[i];
      // Coordinates below 1e-7 in both routes are compared absolutely.
      const double scale = std::max({std::abs(numeric), std::abs(exact), 1e-7});
      const double rel = std::abs(numeric - exact) / scale;
      if (rel > out.worst_relative) {
        out.worst_relative = rel;
        out.worst_parameter = name + "[" + std::to_string(i) + "]";
      }
      ++out.coordinates;
    }
  });
  return out;
}

// Random net for gradient checks: twice the training init scale. At the
// default scale attention is near uniform and q/k gradients sit at the
// finite-difference noise floor.
inline AttentionNet gradcheck_net(const NetShape& shape, Rng& rng) {
  AttentionNet net = AttentionNet::random(shape, rng);
  net.for_each([](const std::string&, auto& w) { w *= 2.0; });
  return net;
}

}  // namespace ragdepth::toy
