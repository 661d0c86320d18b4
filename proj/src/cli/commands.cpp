#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ragdepth/bounds.hpp"
#include "ragdepth/errors.hpp"
#include "ragdepth/fission/analysis.hpp"
#include "ragdepth/fission/core.hpp"
#include "ragdepth/harness/dataset.hpp"
#include "ragdepth/harness/eval.hpp"
#include "ragdepth/harness/prompt.hpp"
#include "ragdepth/log.hpp"
#include "ragdepth/parallel.hpp"
#include "ragdepth/toy/capacity.hpp"
#include "ragdepth/toy/delta_w.hpp"
#include "ragdepth/toy/gradcheck.hpp"
#include "ragdepth/toy/training.hpp"

namespace ragdepth::cli {

namespace {

using I = std::int64_t;

Outcome emit(std::vector<std::pair<std::string, Table>> tables) {
  Outcome o;
  o.tables = std::move(tables);
  return o;
}

int as_int(const Context& c, const std::string& key) {
  const long long v = c.section.integer(key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(key + " is out of range");
  }
  return static_cast<int>(v);
}

std::size_t as_count(const Context& c, const std::string& key) {
  const long long v = c.section.integer(key);
  if (v < 0) throw ConfigError(key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

// ---- simulate

Outcome simulate_appendix(const Context& c) {
  fission::AppendixScheduleConfig cfg;
  cfg.layers = as_int(c, "layers");
  cfg.replicates = as_count(c, "reps");
  cfg.seed = c.seed;
  cfg.sigma = c.section.number("sigma");
  cfg.clamp_lo = c.section.number("clamp_lo");
  cfg.clamp_hi = c.section.number("clamp_hi");
  cfg.jobs = c.jobs;
  return emit({{"appendix", fission::appendix_table(fission::replicate_appendix_sim(cfg))}});
}

Outcome simulate_montecarlo(const Context& c) {
  const fission::LayerParams lp{c.section.number("p"), c.section.number("q"), as_int(c, "n")};
  std::vector<fission::LayerParams> params(as_count(c, "layers"), lp);
  if (params.empty()) throw ConfigError("layers must be at least 1");
  // The top layer is the single output node.
  params.back().n_nodes = 1;
  const auto result = fission::run_monte_carlo(params, as_count(c, "reps"), c.seed, c.jobs);
  return emit({{"montecarlo", fission::monte_carlo_table(result)}});
}

Outcome simulate_transition(const Context& c) {
  const double p = c.section.number("p");
  const double q = c.section.number("q");
  const int n = as_int(c, "n");
  const double t = c.section.number("t");
  const double scaled = t * n;
  if (t < 0.0 || t > 1.0 || std::abs(scaled - std::round(scaled)) > 1e-9) {
    throw ConfigError("t * n must be a whole number of erased parents");
  }
  const int erased = static_cast<int>(std::lround(scaled));
  const fission::LayerParams child{p, q, as_int(c, "child_nodes")};
  const auto sample = fission::simulate_transition(child, n, erased, as_count(c, "reps"), c.seed);
  const double expected = fission::eval_f(t, {p, q, n});
  const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(sample.child_nodes));
  Table table;
  table.columns = {"p", "q", "n", "t", "child_samples", "erased", "fraction", "f_t", "sigma", "z_score"};
  table.add_row({p, q, static_cast<I>(n), t, static_cast<I>(sample.child_nodes),
                 static_cast<I>(sample.erased), sample.fraction(), expected, sigma,
                 sigma > 0 ? (sample.fraction() - expected) / sigma : 0.0});
  return emit({{"transition", std::move(table)}});
}

// ---- analyze

fission::RecurrenceParams recurrence(const Context& c) {
  return {c.section.number("p"), c.section.number("q"), as_int(c, "n")};
}

fission::CoupledRange coupled(const Context& c) {
  return {c.section.number("q_lo"), c.section.number("q_hi"), as_int(c, "n_lo"), as_int(c, "n_hi")};
}

Outcome analyze_fixed_point(const Context& c) {
  const auto report = fission::first_zero(recurrence(c), c.section.number("tol"));
  return emit({{"fixed_point", fission::fixed_point_table({report})}});
}

Outcome analyze_curve(const Context& c) {
  fission::CurveConfig cfg;
  cfg.params = recurrence(c);
  cfg.samples = as_int(c, "samples");
  return emit({{"curve", fission::figure_curves(fission::CurveKind::FVsT, cfg)}});
}

Outcome analyze_threshold_by_layer(const Context& c) {
  fission::CurveConfig cfg;
  cfg.layers = as_int(c, "layers");
  cfg.deltas = c.section.numbers("deltas");
  cfg.range = coupled(c);
  return emit({{"threshold_by_layer", fission::figure_curves(fission::CurveKind::ThresholdByLayer, cfg)}});
}

Outcome analyze_requirement(const Context& c) {
  const auto r = fission::erase_layer_requirement(c.section.number("delta"), c.section.number("q"),
                                                  as_int(c, "n"));
  Table table;
  table.columns = {"delta", "q", "n", "z", "epsilon", "xi", "p_exact", "p_approx"};
  table.add_row({r.delta, r.q, static_cast<I>(r.n), r.z, r.epsilon, r.xi, r.p_exact, r.p_approx});
  return emit({{"requirement", std::move(table)}});
}

Outcome analyze_coupled_grid(const Context& c) {
  Table table;
  table.columns = {"q", "n", "h"};
  double lowest = INFINITY;
  for (const auto& g : fission::coupled_grid(as_int(c, "steps"), coupled(c))) {
    const double h = fission::threshold_h(g.q, g.n);
    lowest = std::min(lowest, h);
    table.add_row({g.q, static_cast<I>(g.n), h});
  }
  log::info("minimum threshold over the grid: {:.6f}", lowest);
  return emit({{"coupled_grid", std::move(table)}});
}

Outcome analyze_depth_budget(const Context& c) {
  const auto b = fission::depth_budget(c.section.number("lambda"), c.section.number("t_filter"),
                                       c.section.number("layer"));
  Table table;
  table.columns = {"lambda", "t_filter_layers", "layer", "cutoff_layer", "extract_depth", "tie",
                   "extraction_beneficial"};
  table.add_row({b.lambda, b.t_filter_layers, b.layer, b.cutoff_layer, b.extract_depth, b.tie,
                 b.extraction_beneficial});
  return emit({{"depth_budget", std::move(table)}});
}

// ---- bounds

bounds::BoundInputs bound_inputs(const Context& c) {
  bounds::BoundInputs in;
  in.H_w = c.section.number("H_w");
  in.I_wz = c.section.number("I_wz");
  in.H_Zr = c.section.number("H_Zr");
  in.H_v = c.section.number("H_v");
  in.I_sv = c.section.number("I_sv");
  in.H_what = c.section.number("H_what");
  in.I_what_v = c.section.number("I_what_v");
  in.delta = c.section.number("delta");
  in.c1 = c.section.number("c1");
  in.c2 = c.section.number("c2");
  in.C = c.section.number("C");
  in.validate();
  return in;
}

Outcome bounds_eval(const Context& c) {
  const auto in = bound_inputs(c);
  Outcome out;
  out.tables.emplace_back("bounds", bounds::sweep(in, {in.delta}, {in.I_wz}, c.section.number("t_base")));
  const double eps = c.section.number("epsilon");
  const double budget = bounds::lora_spread_budget(eps);
  Table lora;
  lora.columns = {"epsilon", "spread_budget", "n_tokens", "noise_gap", "alpha_lower_bound"};
  const double slack = in.H_w - in.I_wz - 1.0;
  lora.add_row({eps, budget, c.section.number("n_tokens"),
                bounds::lora_noise_gap(budget, eps, c.section.number("n_tokens")),
                slack > 0 ? bounds::distraction_lower_bound(in.delta, in.H_w, in.I_wz) : NAN});
  out.tables.emplace_back("spread", std::move(lora));
  return out;
}

Outcome bounds_sweep(const Context& c) {
  const auto in = bound_inputs(c);
  return emit({{"bounds_sweep", bounds::sweep(in, c.section.numbers("deltas"), c.section.numbers("I_wz_values"),
                                          c.section.number("t_base"))}});
}

// ---- toy

std::vector<std::uint64_t> seeds(const Context& c) {
  const std::size_t n = as_count(c, "n_seeds");
  if (n == 0) throw ConfigError("n_seeds must be at least 1");
  std::vector<std::uint64_t> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = c.seed + k;
  return s;
}

toy::TrainConfig train_config(const Context& c) {
  toy::TrainConfig t;
  t.lr = c.section.number("lr");
  t.steps = as_count(c, "steps");
  t.batch = as_count(c, "batch");
  t.eval_every = as_count(c, "eval_every");
  t.holdout_tasks = as_count(c, "holdout");
  t.clip_norm = c.section.number("clip_norm");
  return t;
}

void apply_shape(const Context& c, toy::NetShape& shape) {
  if (auto v = c.section.integer_or_null("layers")) shape.layers = static_cast<int>(*v);
  if (auto v = c.section.integer_or_null("heads")) shape.heads = static_cast<int>(*v);
  if (auto v = c.section.integer_or_null("embed_dim")) shape.embed_dim = static_cast<int>(*v);
  if (auto v = c.section.integer_or_null("ff_dim")) shape.ff_dim = static_cast<int>(*v);
}

toy::ExperimentSpec experiment(const Context& c, toy::PredicateKind kind) {
  auto spec = toy::default_experiment(kind);
  if (auto v = c.section.integer_or_null("n_tokens")) spec.n_tokens = static_cast<int>(*v);
  if (auto v = c.section.integer_or_null("modulus")) spec.modulus = static_cast<int>(*v);
  apply_shape(c, spec.shape);
  spec.shape.vocab = spec.modulus;
  spec.shape.max_len = spec.n_tokens;
  spec.train = train_config(c);
  return spec;
}

Table seed_summary(const std::vector<std::vector<toy::ExperimentRun>>& groups) {
  Table t;
  t.columns = {"experiment_id", "kind", "layers", "heads", "m", "parameters",
               "seeds", "mean_holdout_accuracy", "min_holdout_accuracy", "max_holdout_accuracy"};
  for (const auto& runs : groups) {
    const auto& spec = runs.front().spec;
    double sum = 0.0, lo = 1.0, hi = 0.0;
    for (const auto& r : runs) {
      sum += r.fit.final_accuracy;
      lo = std::min(lo, r.fit.final_accuracy);
      hi = std::max(hi, r.fit.final_accuracy);
    }
    t.add_row({spec.id, std::string(toy::to_string(spec.kind)), static_cast<I>(spec.shape.layers),
               static_cast<I>(spec.shape.heads), static_cast<I>(spec.shape.embed_dim),
               static_cast<I>(runs.front().parameter_count), static_cast<I>(runs.size()),
               sum / runs.size(), lo, hi});
  }
  return t;
}

std::vector<toy::ExperimentRun> concat(const std::vector<std::vector<toy::ExperimentRun>>& groups) {
  std::vector<toy::ExperimentRun> all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  return all;
}

Outcome toy_train(const Context& c) {
  const auto spec = experiment(c, toy::parse_predicate_kind(c.section.text("kind")));
  const auto s = seeds(c);
  const auto runs = toy::run_experiments(spec, s, c.jobs);
  return emit({{"summary", seed_summary({runs})}, {"curves", toy::results_table(runs)}});
}

Outcome toy_separation(const Context& c) {
  std::vector<std::vector<toy::ExperimentRun>> groups;
  const auto s = seeds(c);
  for (auto kind : {toy::PredicateKind::Pairwise, toy::PredicateKind::Triplewise,
                    toy::PredicateKind::VirtualPairwise}) {
    auto spec = toy::default_experiment(kind);
    spec.train = train_config(c);
    log::info("training {} over {} seeds", spec.id, s.size());
    groups.push_back(toy::run_experiments(spec, s, c.jobs));
  }
  Table summary = seed_summary(groups);
  const double pair = summary.number(0, "mean_holdout_accuracy");
  const double triple = summary.number(1, "mean_holdout_accuracy");
  Table gap;
  gap.columns = {"pairwise_mean", "triplewise_mean", "virtual_pairwise_mean", "separation"};
  gap.add_row({pair, triple, summary.number(2, "mean_holdout_accuracy"), pair - triple});
  return emit({{"summary", std::move(summary)}, {"separation", std::move(gap)},
           {"curves", toy::results_table(concat(groups))}});
}

Outcome toy_ordering(const Context& c) {
  toy::OrderingConfig cfg;
  if (auto v = c.section.integer_or_null("n_documents")) cfg.n_documents = static_cast<int>(*v);
  if (auto v = c.section.integer_or_null("modulus")) cfg.modulus = static_cast<int>(*v);
  if (auto v = c.section.integer_or_null("precision_bits")) cfg.precision_bits = static_cast<int>(*v);
  if (auto v = c.section.number_or_null("H_w")) cfg.H_w_bits = *v;
  apply_shape(c, cfg.shape);
  cfg.train = train_config(c);
  const std::string which = c.section.text("layout");
  std::vector<toy::QueryLayout> layouts;
  if (which == "both") {
    layouts = {toy::QueryLayout::QueryFirst, toy::QueryLayout::QueryLast};
  } else {
    layouts = {toy::parse_query_layout(which)};
  }
  const auto s = seeds(c);
  Table table;
  table.columns = {"layout", "seed", "holdout_accuracy", "m", "budget_bits", "required_bits", "requirement_met"};
  Table mean;
  mean.columns = {"layout", "mean_holdout_accuracy"};
  std::vector<toy::ExperimentRun> all;
  for (auto layout : layouts) {
    const auto r = toy::ordering_experiment(layout, cfg, s, c.jobs);
    const bool first = layout == toy::QueryLayout::QueryFirst;
    const double required = first ? r.capacity.query_first_required : r.capacity.query_last_required;
    const bool met = first ? r.capacity.query_first_satisfied : r.capacity.query_last_satisfied;
    for (const auto& run : r.runs) {
      table.add_row({std::string(toy::to_string(layout)), static_cast<I>(run.seed), run.fit.final_accuracy,
                     static_cast<I>(cfg.shape.embed_dim), r.capacity.budget_bits, required, met});
    }
    mean.add_row({std::string(toy::to_string(layout)), r.mean_accuracy});
    all.insert(all.end(), r.runs.begin(), r.runs.end());
  }
  return emit({{"ordering", std::move(table)}, {"ordering_mean", std::move(mean)},
           {"curves", toy::results_table(all)}});
}

Outcome toy_capacity(const Context& c) {
  const int m = as_int(c, "m");
  const int p = static_cast<int>(c.section.integer_or_null("precision_bits").value_or(16));
  const int heads = static_cast<int>(c.section.integer_or_null("heads").value_or(4));
  const int n = as_int(c, "n");
  const double H_w = c.section.number_or_null("H_w").value_or(8.0);
  const double cst = c.section.number("c");
  const auto r = toy::capacity_check(m, p, heads, n, H_w, cst);
  Table table;
  table.columns = {"m", "precision_bits", "heads", "n", "H_w", "c", "budget_bits", "threshold_bits",
                   "impossible", "margin"};
  table.add_row({static_cast<I>(m), static_cast<I>(p), static_cast<I>(heads), static_cast<I>(n), H_w, cst,
                 r.budget_bits, r.threshold_bits, r.impossible, r.margin});
  const int nd = static_cast<int>(c.section.integer_or_null("n_documents").value_or(10));
  const auto o = toy::ordering_capacity(m, p, nd, H_w);
  Table ord;
  ord.columns = {"m", "precision_bits", "n_documents", "H_w", "budget_bits", "query_last_required",
                 "query_first_required", "query_last_satisfied", "query_first_satisfied"};
  ord.add_row({static_cast<I>(m), static_cast<I>(p), static_cast<I>(nd), H_w, o.budget_bits,
               o.query_last_required, o.query_first_required, o.query_last_satisfied,
               o.query_first_satisfied});
  return emit({{"capacity", std::move(table)}, {"ordering_capacity", std::move(ord)}});
}

Outcome toy_delta_w(const Context& c) {
  toy::DeltaWConfig cfg;
  cfg.steps = as_count(c, "dw_steps");
  cfg.lr = c.section.number("dw_lr");
  auto spreads = c.section.numbers("spreads");
  std::sort(spreads.begin(), spreads.end());
  const std::size_t instances = as_count(c, "instances");
  std::vector<std::vector<toy::DeltaWFit>> fits(instances);
  const int tokens = as_int(c, "dw_tokens");
  const int dim = as_int(c, "dw_dim");
  const int noise = as_int(c, "dw_noise");
  parallel_for(instances, c.jobs, [&](std::size_t k) {
    Rng rng = Rng::derive(c.seed, k);
    fits[k] = toy::delta_w_sweep(toy::gen_delta_w_instance(tokens, dim, noise, rng), spreads, cfg);
  });
  Table table = toy::delta_w_table();
  Table detail;
  detail.columns = {"instance_id", "allowed_spread", "measured_spread", "achieved_epsilon",
                    "budget_epsilon", "steps_to_best"};
  for (std::size_t k = 0; k < instances; ++k) {
    toy::append_delta_w_rows(table, static_cast<I>(k), fits[k]);
    for (const auto& f : fits[k]) {
      detail.add_row({static_cast<I>(k), f.allowed_spread.value_or(NAN), f.spread_delta,
                      f.achieved_epsilon, f.budget_epsilon, static_cast<I>(f.steps_run)});
    }
  }
  return emit({{"delta_w", std::move(table)}, {"delta_w_detail", std::move(detail)}});
}

Outcome toy_gradcheck(const Context& c) {
  Table table;
  table.columns = {"trial", "layers", "causal", "coordinates", "worst_relative", "worst_parameter"};
  const std::size_t trials = as_count(c, "trials");
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = Rng::derive(c.seed, k);
    toy::NetShape shape{.layers = 1 + static_cast<int>(k % 2), .heads = 2, .embed_dim = 8, .ff_dim = 6,
                        .vocab = 7, .max_len = 8, .causal = k % 3 == 0};
    const auto net = toy::gradcheck_net(shape, rng);
    std::vector<toy::ToyTask> batch;
    for (int b = 0; b < 3; ++b) batch.push_back(toy::gen_task(toy::PredicateKind::Pairwise, 6, 7, rng));
    const auto r = toy::check_gradients(net, batch);
    table.add_row({static_cast<I>(k), static_cast<I>(shape.layers), shape.causal,
                   static_cast<I>(r.coordinates), r.worst_relative, r.worst_parameter});
  }
  return emit({{"gradcheck", std::move(table)}});
}

// ---- harness

std::vector<harness::QAExample> harness_examples(const Context& c) {
  if (c.section.has("dataset")) {
    auto ds = harness::load_dataset(c.section.text("dataset"));
    for (const auto& w : ds.warnings) log::info("dataset: {}", w);
    return std::move(ds.examples);
  }
  Rng rng = Rng::derive(c.seed, 0);
  return harness::gen_synthetic_qa(std::max<std::size_t>(1, as_count(c, "count")), rng,
                                   as_count(c, "distractors"));
}

std::vector<harness::PromptLayout> harness_layouts(const Context& c) {
  std::vector<harness::PromptLayout> out;
  for (const auto& l : c.section.texts("layouts")) out.push_back(harness::parse_layout(l));
  if (out.empty()) throw ConfigError("no layouts given");
  return out;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

Outcome harness_gen(const Context& c) {
  Rng rng = Rng::derive(c.seed, 0);
  const auto examples = harness::gen_synthetic_qa(as_count(c, "count"), rng, as_count(c, "distractors"));
  Table table;
  table.columns = {"example_id", "question", "answers", "gold", "distractors"};
  for (std::size_t k = 0; k < examples.size(); ++k) {
    const auto& e = examples[k];
    table.add_row({static_cast<I>(k), e.question, join(e.answers, " || "), e.gold_document,
                   join(e.distracting_documents, " || ")});
  }
  std::ostringstream jsonl;
  harness::write_dataset(jsonl, examples);
  Outcome out = emit({{"examples", std::move(table)}});
  out.files.push_back({"dataset.jsonl", jsonl.str()});
  return out;
}

Outcome harness_prompt(const Context& c) {
  const auto examples = harness_examples(c);
  const std::size_t idx = as_count(c, "example");
  if (idx >= examples.size()) throw ConfigError("example index out of range");
  Outcome out;
  Table table;
  table.columns = {"example_id", "layout", "position", "role", "content"};
  for (const auto& layout : harness_layouts(c)) {
    const auto messages = harness::assemble_prompt(examples[idx], layout);
    for (std::size_t k = 0; k < messages.size(); ++k) {
      table.add_row({static_cast<I>(idx), layout.label(), static_cast<I>(k), messages[k].role,
                     messages[k].content});
    }
    out.files.push_back({"prompt_" + layout.label() + ".json", harness::render_prompt(messages)});
  }
  out.tables.emplace_back("prompt", std::move(table));
  return out;
}

Outcome harness_run(const Context& c) {
  const auto examples = harness_examples(c);
  harness::EvalConfig cfg;
  cfg.endpoint.base_url = c.section.text("base_url");
  cfg.endpoint.model = c.section.text("model");
  cfg.endpoint.api_key_env = c.section.text("api_key_env");
  cfg.endpoint.temperature = c.section.number("temperature");
  cfg.endpoint.max_tokens = as_int(c, "max_tokens");
  cfg.endpoint.attempts = as_int(c, "attempts");
  cfg.endpoint.initial_backoff = std::chrono::milliseconds(c.section.integer("backoff_ms"));
  cfg.endpoint.timeout = std::chrono::milliseconds(c.section.integer("timeout_ms"));
  cfg.max_in_flight = std::max<std::size_t>(1, as_count(c, "max_in_flight"));
  cfg.requests_per_second = c.section.number("rps");
  const auto report = harness::run_eval(examples, harness_layouts(c), cfg);
  Outcome out = emit({{"summary", report.summary(cfg.endpoint.model)}, {"results", report.results()}});
  if (report.failures > 0) {
    log::error("{} of {} requests failed", report.failures, report.records.size());
    out.exit_code = 3;
  }
  return out;
}

std::vector<Command> build() {
  return {
      {"simulate", "appendix", "layered Monte Carlo on the randomised appendix schedule",
       {"layers", "reps", "sigma", "clamp_lo", "clamp_hi"}, simulate_appendix},
      {"simulate", "montecarlo", "layered Monte Carlo with constant p, q, n",
       {"layers", "reps", "p", "q", "n"}, simulate_montecarlo},
      {"simulate", "transition", "one layer transition against f(t)",
       {"p", "q", "n", "t", "child_nodes", "reps"}, simulate_transition},
      {"analyze", "fixed-point", "first zero of g and the threshold h", {"p", "q", "n", "tol"},
       analyze_fixed_point},
      {"analyze", "curve", "f(t) against t", {"p", "q", "n", "samples"}, analyze_curve},
      {"analyze", "threshold-by-layer", "required p per layer for erasure targets",
       {"layers", "deltas", "q_lo", "q_hi", "n_lo", "n_hi"}, analyze_threshold_by_layer},
      {"analyze", "requirement", "p needed to erase a layer with probability delta", {"delta", "q", "n"},
       analyze_requirement},
      {"analyze", "coupled-grid", "h over the coupled (q, n) grid",
       {"steps", "q_lo", "q_hi", "n_lo", "n_hi"}, analyze_coupled_grid},
      {"analyze", "depth-budget", "filtering versus extraction depth", {"lambda", "t_filter", "layer"},
       analyze_depth_budget},
      {"bounds", "eval", "all bounds at one point",
       {"H_w", "I_wz", "H_Zr", "H_v", "I_sv", "H_what", "I_what_v", "delta", "c1", "c2", "C", "t_base",
        "epsilon", "n_tokens"},
       bounds_eval},
      {"bounds", "sweep", "bounds over a delta x I(w;z) grid",
       {"H_w", "I_wz", "H_Zr", "H_v", "I_sv", "H_what", "I_what_v", "delta", "c1", "c2", "C", "t_base",
        "deltas", "I_wz_values"},
       bounds_sweep},
      {"toy", "train", "train one relevance task over several seeds",
       {"kind", "n_tokens", "modulus", "layers", "heads", "embed_dim", "ff_dim", "lr", "steps", "batch",
        "eval_every", "holdout", "clip_norm", "n_seeds"},
       toy_train},
      {"toy", "separation", "pairwise vs triplewise vs virtual-token tasks",
       {"lr", "steps", "batch", "eval_every", "holdout", "clip_norm", "n_seeds"}, toy_separation},
      {"toy", "ordering", "query before vs after documents under a causal mask",
       {"layout", "n_documents", "modulus", "precision_bits", "H_w", "layers", "heads", "embed_dim",
        "ff_dim", "lr", "steps", "batch", "eval_every", "holdout", "clip_norm", "n_seeds"},
       toy_ordering},
      {"toy", "capacity", "one-layer capacity inequality and ordering requirements",
       {"m", "precision_bits", "heads", "n", "H_w", "c", "n_documents"}, toy_capacity},
      {"toy", "delta-w", "constrained-spread score offset fits",
       {"instances", "dw_tokens", "dw_dim", "dw_noise", "dw_steps", "dw_lr", "spreads"}, toy_delta_w},
      {"toy", "gradcheck", "backprop against finite differences", {"trials"}, toy_gradcheck},
      {"harness", "gen", "synthetic QA dataset", {"count", "distractors"}, harness_gen},
      {"harness", "prompt", "assemble prompts for one example",
       {"dataset", "count", "distractors", "example", "layouts"}, harness_prompt},
      {"harness", "run", "query an endpoint and score answers",
       {"dataset", "count", "distractors", "layouts", "base_url", "model", "api_key_env", "temperature", "max_tokens",
        "attempts", "backoff_ms", "timeout_ms", "max_in_flight", "rps"},
       harness_run},
  };
}

}  // namespace

const std::vector<Command>& commands() {
  static const auto c = build();
  return c;
}

}  // namespace ragdepth::cli
