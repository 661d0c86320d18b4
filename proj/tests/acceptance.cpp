// One PASS/FAIL line per acceptance criterion. Tolerances and runtime budgets
// are fixed here; the exit status is non-zero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "ragdepth/bounds.hpp"
#include "ragdepth/fission/analysis.hpp"
#include "ragdepth/fission/core.hpp"
#include "ragdepth/harness/dataset.hpp"
#include "ragdepth/harness/prompt.hpp"
#include "ragdepth/toy/delta_w.hpp"
#include "ragdepth/toy/gradcheck.hpp"
#include "ragdepth/toy/training.hpp"

using namespace ragdepth;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Verdict()> check;
};

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// |a - b| / max(|a|, |b|, 1)
double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

fission::RecurrenceParams draw(Rng& rng) {
  return {rng.uniform() * 0.999, 0.01 + 0.98 * rng.uniform(), 1 + static_cast<int>(rng.index(24))};
}

Verdict closed_form() {
  Rng rng(1);
  double worst_end = 0.0;
  double worst_fd = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto prm = draw(rng);
    worst_end = std::max({worst_end, std::abs(fission::eval_f(0.0, prm) - prm.p),
                          std::abs(fission::eval_f(1.0, prm) - 1.0)});
    const double t = 0.02 + 0.96 * rng.uniform();
    const double h = 1e-6;
    const double fd = (fission::eval_g(t + h, prm) - fission::eval_g(t - h, prm)) / (2 * h);
    worst_fd = std::max(worst_fd, rel_err(fission::eval_g_prime(t, prm), fd));
  }
  return {worst_end <= 1e-12 && worst_fd <= 1e-6,
          fmt::format("max |f(0)-p|,|f(1)-1| = {:.2e}; max g' rel err = {:.2e}", worst_end, worst_fd)};
}

Verdict dichotomy() {
  Rng rng(2);
  int below = 0, above = 0, bad = 0;
  double worst_residual = 0.0;
  while (below < 500 || above < 500) {
    const auto prm = draw(rng);
    if (prm.p == 0.0) continue;
    const bool sub = prm.p < fission::threshold_h(prm.q, prm.n);
    if (sub ? below >= 500 : above >= 500) continue;
    const auto r = fission::first_zero(prm);
    if (sub) {
      ++below;
      if (!r.has_fixed_point || !(*r.t_hat > 0.0 && *r.t_hat < 1.0)) {
        ++bad;
        continue;
      }
      const double res = std::abs(fission::eval_g(*r.t_hat, prm));
      worst_residual = std::max(worst_residual, res);
      bad += res > 1e-10;
      for (int i = 1; i <= 100; ++i) {
        const double t = *r.t_hat + (1.0 - *r.t_hat) * i / 101.0;
        if (fission::eval_g(t, prm) >= 0.0) {
          ++bad;
          break;
        }
      }
    } else {
      ++above;
      bad += r.has_fixed_point;
      for (int i = 0; i <= 100; ++i) {
        if (fission::eval_g(i / 100.0, prm) < -1e-9) {
          ++bad;
          break;
        }
      }
    }
  }
  return {bad == 0, fmt::format("500 below h, 500 at or above; violations = {}; max |g(t_hat)| = {:.2e}",
                                bad, worst_residual)};
}

Verdict threshold_claim() {
  double lowest = 2.0;
  fission::GridPoint at{};
  for (const auto& g : fission::coupled_grid(15)) {
    const double h = fission::threshold_h(g.q, g.n);
    if (h < lowest) {
      lowest = h;
      at = g;
    }
  }
  const bool ok = lowest >= 0.7 && std::abs(lowest - 0.722) <= 0.005 && at.n == 16 &&
                  std::abs(at.q - 0.8) < 1e-12;
  return {ok, fmt::format("min h = {:.5f} at (q={}, n={})", lowest, at.q, at.n)};
}

Verdict transition() {
  const fission::LayerParams child{0.2, 0.5, 4096};
  const auto s = fission::simulate_transition(child, 8, 4, 64, 2024);
  const double expected = fission::eval_f(0.5, {0.2, 0.5, 8});
  const double sd = std::sqrt(expected * (1 - expected) / static_cast<double>(s.child_nodes));
  const double z = (s.fraction() - expected) / sd;
  return {s.child_nodes >= (1u << 18) && std::abs(z) <= 3.0 && std::abs(expected - 0.24844) < 1e-5,
          fmt::format("{} node samples; empirical {:.5f} vs f(0.5) = {:.5f}; z = {:+.2f}", s.child_nodes,
                      s.fraction(), expected, z)};
}

Verdict appendix() {
  fission::AppendixScheduleConfig cfg;
  cfg.seed = 7;
  cfg.jobs = jobs();
  const auto rows = fission::replicate_appendix_sim(cfg);
  double worst = 0.0;
  int worst_layer = 0;
  for (int l = 0; l < 5; ++l) {
    const double gap = std::abs(rows[l].mean_t - rows[l].t_hat);
    if (gap > worst) {
      worst = gap;
      worst_layer = l;
    }
  }
  const std::size_t L = rows.size();
  const double top = (rows[L - 1].std_t + rows[L - 2].std_t + rows[L - 3].std_t) / 3;
  const double bottom = (rows[0].std_t + rows[1].std_t + rows[2].std_t) / 3;
  return {worst <= 0.1 && top > bottom,
          fmt::format("seed 7; max |mean t - t_hat| over bottom 5 = {:.3f} (layer {}); std top3 {:.3f} vs "
                      "bottom3 {:.3f}",
                      worst, worst_layer, top, bottom)};
}

Verdict requirement_curves() {
  const auto r = fission::erase_layer_requirement(0.9, 0.5, 4);
  bool monotone = true;
  Rng rng(6);
  for (int k = 0; k < 200 && monotone; ++k) {
    const double q = 0.05 + 0.9 * rng.uniform();
    const int n = 1 + static_cast<int>(rng.index(20));
    double pe = 2.0, pa = 2.0;
    for (int i = 1; i < 100; ++i) {
      const double eps = i / 100.0;
      const double e = fission::required_p_exact_from_epsilon(eps, q, n);
      const double a = fission::required_p_approx_from_epsilon(eps, q, n);
      monotone = monotone && e < pe && a < pa;
      pe = e;
      pa = a;
    }
  }
  fission::CurveConfig cfg;
  const auto table = fission::figure_curves(fission::CurveKind::ThresholdByLayer, cfg);
  bool table_ok = table.rows.size() == cfg.deltas.size() * static_cast<std::size_t>(cfg.layers);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    table_ok = table_ok && std::isfinite(table.number(i, "p_exact")) &&
               std::isfinite(table.number(i, "p_approx"));
  }
  return {std::abs(r.p_exact - 0.6345) <= 1e-3 && std::abs(r.p_approx - 0.6259) <= 1e-3 && monotone &&
              table_ok,
          fmt::format("p_exact {:.5f}, p_approx {:.5f}; decreasing in eps: {}; layer table rows {}",
                      r.p_exact, r.p_approx, monotone, table.rows.size())};
}

Verdict bound_calculators() {
  const double fano = bounds::fano_error_lower(8, 5).value;
  bounds::BoundInputs eq1;
  eq1.H_w = 7;
  eq1.I_wz = 3;
  eq1.H_Zr = 10;
  eq1.delta = 0.5;
  const double noise = bounds::noise_impact_bound(eq1);
  bounds::BoundInputs eq2;
  eq2.H_v = 6;
  eq2.delta = 0.8;
  eq2.I_what_v = 7;
  eq2.H_what = 8;
  eq2.I_sv = 4;
  eq2.C = 8;
  const double mlp = bounds::mlp_failure_bound(eq2, 0.0).raw;

  bool monotone = true;
  bounds::BoundInputs base;
  base.H_w = 12;
  base.H_Zr = 6;
  for (int i = 0; i <= 11; ++i) {
    for (int k = 1; k < 20; ++k) {
      bounds::BoundInputs a = base, b = base;
      a.I_wz = b.I_wz = i;
      a.delta = k / 20.0;
      b.delta = (k + 1) / 20.0;
      monotone = monotone && bounds::noise_impact_bound(b) < bounds::noise_impact_bound(a);
      if (i < 11) {
        bounds::BoundInputs c = a;
        c.I_wz = i + 1;
        monotone = monotone && bounds::noise_impact_bound(c) < bounds::noise_impact_bound(a);
      }
    }
  }
  const bool ok = std::abs(fano - 0.25) <= 1e-4 && std::abs(noise - 3.1623) <= 1e-4 &&
                  std::abs(mlp - 0.35) <= 1e-4 && monotone;
  return {ok, fmt::format("Fano {:.5f}; noise bound {:.5f}; MLP raw {:.5f}; monotone in delta, I(w;z): {}",
                          fano, noise, mlp, monotone)};
}

Verdict gradients() {
  double worst = 0.0;
  std::string where;
  for (int k = 0; k < 20; ++k) {
    Rng rng(500 + k);
    const toy::NetShape shape{.layers = 1 + k % 2, .heads = 2, .embed_dim = 8, .ff_dim = 6, .vocab = 7,
                              .max_len = 10, .slots = 3, .causal = k % 3 == 0};
    const auto net = toy::gradcheck_net(shape, rng);
    std::vector<toy::ToyTask> batch;
    batch.push_back(toy::gen_task(toy::PredicateKind::Pairwise, 7, 7, rng));
    batch.push_back(toy::gen_task(toy::PredicateKind::Triplewise, 6, 7, rng));
    batch.push_back(toy::gen_ordering_task(toy::QueryLayout::QueryLast, 3, 7, rng));
    const auto r = toy::check_gradients(net, batch);
    if (r.worst_relative > worst) {
      worst = r.worst_relative;
      where = fmt::format("net {} {}", k, r.worst_parameter);
    }
  }
  return {worst < 1e-4, fmt::format("20 nets; worst relative error {:.2e} ({})", worst, where)};
}

double mean_accuracy(const std::vector<toy::ExperimentRun>& runs) {
  double s = 0.0;
  for (const auto& r : runs) s += r.fit.final_accuracy;
  return s / static_cast<double>(runs.size());
}

Verdict separation() {
  std::vector<std::uint64_t> seeds(5);
  std::iota(seeds.begin(), seeds.end(), 7);
  const double pair = mean_accuracy(
      toy::run_experiments(toy::default_experiment(toy::PredicateKind::Pairwise), seeds, jobs()));
  const double triple = mean_accuracy(
      toy::run_experiments(toy::default_experiment(toy::PredicateKind::Triplewise), seeds, jobs()));
  const double virt = mean_accuracy(
      toy::run_experiments(toy::default_experiment(toy::PredicateKind::VirtualPairwise), seeds, jobs()));
  const toy::OrderingConfig ocfg;
  const double first = toy::ordering_experiment(toy::QueryLayout::QueryFirst, ocfg, seeds, jobs()).mean_accuracy;
  const double last = toy::ordering_experiment(toy::QueryLayout::QueryLast, ocfg, seeds, jobs()).mean_accuracy;
  const bool ok = pair >= 0.95 && triple <= 0.75 && pair - triple >= 0.15 && virt >= 0.95 && first >= last;
  return {ok, fmt::format("5 seeds; pairwise {:.3f}, triplewise {:.3f} (gap {:.3f}), virtual {:.3f}; ordering "
                          "first {:.3f} vs last {:.3f}",
                          pair, triple, pair - triple, virt, first, last)};
}

Verdict delta_w_tradeoff() {
  const std::vector<double> spreads{0.0, 0.1, 0.3, 0.7};
  int violations = 0;
  std::string eps;
  for (int k = 0; k < 10; ++k) {
    Rng rng = Rng::derive(7, k);
    const auto inst = toy::gen_delta_w_instance(8, 4, 3, rng);
    const auto fits = toy::delta_w_sweep(inst, spreads, toy::DeltaWConfig{});
    for (std::size_t i = 1; i < fits.size(); ++i) {
      violations += fits[i].achieved_epsilon > fits[i - 1].achieved_epsilon;
    }
    if (k < 3) {
      eps += fmt::format(" [{:.3f} {:.3f} {:.3f} {:.3f}]", fits[0].achieved_epsilon, fits[1].achieved_epsilon,
                         fits[2].achieved_epsilon, fits[3].achieved_epsilon);
    }
  }
  return {violations == 0, fmt::format("10 instances; monotonicity violations {}; first eps rows{}", violations, eps)};
}

Verdict prompts() {
  const std::filesystem::path root = RAGDEPTH_TEST_DATA_DIR;
  const auto ds = harness::load_dataset(root / "fixtures" / "qa_fixture.jsonl");
  int compared = 0, mismatched = 0, bad_both = 0;
  for (const auto& entry : std::filesystem::directory_iterator(root / "golden")) {
    const std::string name = entry.path().stem().string();
    const auto us = name.find('_');
    const std::size_t idx = std::stoul(name.substr(7, us - 7));
    std::string label = name.substr(us + 1);
    const auto gold = label.find("_gold");
    label.replace(gold, 1, "+");
    if (const auto dis = label.find('_', gold + 1); dis != std::string::npos) label.replace(dis, 1, "+");
    const auto layout = harness::parse_layout(label);
    const auto messages = harness::assemble_prompt(ds.examples.at(idx), layout);
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream golden;
    golden << in.rdbuf();
    ++compared;
    mismatched += harness::render_prompt(messages) != golden.str();
    if (layout.order == harness::QueryOrder::QueryBoth) {
      const harness::Message q{"user", "Question: " + ds.examples[idx].question};
      bad_both += std::count(messages.begin(), messages.end(), q) != 2;
    }
  }
  return {compared > 0 && mismatched == 0 && bad_both == 0,
          fmt::format("{} golden files; mismatches {}; query_both layouts without exactly two questions {}",
                      compared, mismatched, bad_both)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "closed-form identities", 1, closed_form},
      {2, "fixed-point dichotomy", 5, dichotomy},
      {3, "threshold over the coupled grid", 1, threshold_claim},
      {4, "single-transition Monte Carlo", 10, transition},
      {5, "appendix simulation replication", 30, appendix},
      {6, "layer-erasure requirement curves", 1, requirement_curves},
      {7, "bound calculators", 1, bound_calculators},
      {8, "toy gradient exactness", 30, gradients},
      {9, "expressiveness separation", 600, separation},
      {10, "spread-constrained fit tradeoff", 120, delta_w_tradeoff},
      {11, "prompt bit-exactness", 1, prompts},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = v.pass && in_time;
    failed += !pass;
    fmt::print("{} C{:<2} {}: {} [{:.2f} s of {:.0f} s{}]\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail,
               secs, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  fmt::print("SKIP C12 live endpoint replication: needs an external endpoint and dataset\n");
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
