#include "config.hpp"

#include <algorithm>

#include "ragdepth/errors.hpp"

namespace ragdepth::cli {

namespace {

using K = ValueKind;

std::map<std::string, std::vector<OptionSpec>> build_schema() {
  std::map<std::string, std::vector<OptionSpec>> s;
  s["global"] = {
      {"seed", K::Int, nullptr, "RNG seed; drawn at random when unset"},
      {"out", K::String, nullptr, "output directory; default ./out/<timestamp>"},
      {"format", K::String, "csv", "csv or json"},
      {"jobs", K::Int, 0, "worker threads; 0 uses all cores"},
      {"verbosity", K::Int, 1, "0 quiet, 1 info, 2 debug"},
  };
  s["simulate"] = {
      {"layers", K::Int, 10, "number of layers"},
      {"reps", K::Int, 10, "replicates"},
      {"sigma", K::Double, 0.1, "noise variance of the appendix schedule"},
      {"clamp_lo", K::Double, 0.01, "lower clamp for drawn p and q"},
      {"clamp_hi", K::Double, 0.99, "upper clamp for drawn p and q"},
      {"p", K::Double, 0.2, "retrieval probability"},
      {"q", K::Double, 0.5, "probability that an edge is absent"},
      {"n", K::Int, 8, "nodes per layer (parent width for transition)"},
      {"t", K::Double, 0.5, "erased fraction of the parent layer"},
      {"child_nodes", K::Int, 256, "child layer width for transition"},
  };
  s["analyze"] = {
      {"p", K::Double, 0.3, "retrieval probability"},
      {"q", K::Double, 0.5, "edge absence probability"},
      {"n", K::Int, 4, "parent layer width"},
      {"tol", K::Double, 1e-10, "bisection tolerance"},
      {"samples", K::Int, 101, "points on the t grid"},
      {"layers", K::Int, 10, "layers for threshold-by-layer"},
      {"delta", K::Double, 0.9, "target per-layer survival"},
      {"deltas", K::DoubleList, json::array({0.5, 0.9}), "survival targets"},
      {"steps", K::Int, 15, "coupled grid steps"},
      {"q_lo", K::Double, 0.1, "coupled range"},
      {"q_hi", K::Double, 0.8, "coupled range"},
      {"n_lo", K::Int, 2, "coupled range"},
      {"n_hi", K::Int, 16, "coupled range"},
      {"lambda", K::Double, 0.5, "filtering layer fraction"},
      {"t_filter", K::Double, 2.0, "layers spent filtering"},
      {"layer", K::Double, 4.0, "layer at which the answer is extracted"},
  };
  s["bounds"] = {
      {"H_w", K::Double, 8.0, "H(w)"},
      {"I_wz", K::Double, 5.0, "I(w;z)"},
      {"H_Zr", K::Double, 1.0, "H(Z_r)"},
      {"H_v", K::Double, 1.0, "H(v)"},
      {"I_sv", K::Double, 1.0, "I(s;v)"},
      {"H_what", K::Double, 2.0, "H(w-hat)"},
      {"I_what_v", K::Double, 0.5, "I(w-hat;v)"},
      {"delta", K::Double, 0.5, "noise fraction"},
      {"c1", K::Double, 1.0, "bound constant"},
      {"c2", K::Double, 0.0, "bound constant"},
      {"C", K::Double, 1.0, "normalising constant of the feed-forward bound"},
      {"t_base", K::Double, 0.0, "base depth added to the feed-forward bound"},
      {"epsilon", K::Double, 0.5, "approximation tolerance for the spread budget"},
      {"n_tokens", K::Double, 16.0, "tokens for the noise gap"},
      {"deltas", K::DoubleList, json::array({0.1, 0.3, 0.5, 0.7, 0.9}), "sweep over delta"},
      {"I_wz_values", K::DoubleList, json::array({0.0, 2.0, 4.0, 6.0}), "sweep over I(w;z)"},
  };
  s["toy"] = {
      {"kind", K::String, "pairwise", "pairwise, triplewise, virtual_pairwise, disjointness"},
      {"n_tokens", K::Int, nullptr, "tokens per task"},
      {"modulus", K::Int, nullptr, "w-part modulus"},
      {"layers", K::Int, nullptr, "attention layers"},
      {"heads", K::Int, nullptr, "heads per layer"},
      {"embed_dim", K::Int, nullptr, "model width m"},
      {"ff_dim", K::Int, nullptr, "feed-forward width"},
      {"lr", K::Double, 0.5, "SGD learning rate"},
      {"steps", K::Int, 3000, "training steps"},
      {"batch", K::Int, 32, "tasks per step"},
      {"eval_every", K::Int, 500, "curve sampling interval"},
      {"holdout", K::Int, 512, "held-out tasks"},
      {"clip_norm", K::Double, 1.0, "global gradient norm cap; 0 disables"},
      {"n_seeds", K::Int, 5, "seeds, counted up from --seed"},
      {"layout", K::String, "both", "query_first, query_last or both"},
      {"n_documents", K::Int, nullptr, "documents in the ordering task"},
      {"precision_bits", K::Int, nullptr, "bits per parameter for capacity accounting"},
      {"H_w", K::Double, nullptr, "bits of entropy per w-part"},
      {"m", K::Int, 64, "capacity check: model width"},
      {"n", K::Int, 16, "capacity check: sequence length"},
      {"c", K::Double, 1.0, "capacity check constant"},
      {"instances", K::Int, 10, "delta-w instances"},
      {"dw_tokens", K::Int, 8, "delta-w tokens"},
      {"dw_dim", K::Int, 4, "delta-w embedding dimension"},
      {"dw_noise", K::Int, 3, "delta-w noise columns"},
      {"dw_steps", K::Int, 3000, "delta-w optimiser steps"},
      {"dw_lr", K::Double, 0.05, "delta-w learning rate"},
      {"spreads", K::DoubleList, json::array({0.0, 0.1, 0.3, 0.7}), "allowed spreads"},
      {"trials", K::Int, 20, "gradient check nets"},
  };
  s["harness"] = {
      {"dataset", K::String, nullptr, "JSONL dataset; synthetic when unset"},
      {"count", K::Int, 20, "synthetic examples"},
      {"distractors", K::Int, 2, "distractors per synthetic example"},
      {"example", K::Int, 0, "example index for prompt"},
      {"layouts", K::StringList,
       json::array({"query_first+gold", "query_last+gold", "query_both+gold",
                    "query_first+gold+1dis", "query_last+gold+1dis", "query_both+gold+1dis"}),
       "layouts such as query_both+gold+2dis"},
      {"base_url", K::String, "http://127.0.0.1:8000", "endpoint origin"},
      {"model", K::String, "meta-llama/Meta-Llama-3.1-8B-Instruct", "model name"},
      {"api_key_env", K::String, "RALM_API_KEY", "environment variable holding the API key"},
      {"temperature", K::Double, 0.0, "sampling temperature"},
      {"max_tokens", K::Int, 16, "completion cap"},
      {"attempts", K::Int, 3, "attempts per request"},
      {"backoff_ms", K::Int, 500, "initial retry backoff"},
      {"timeout_ms", K::Int, 60000, "request timeout"},
      {"max_in_flight", K::Int, 4, "concurrent requests"},
      {"rps", K::Double, 0.0, "requests per second; 0 disables"},
  };
  return s;
}

bool matches(ValueKind kind, const json& v) {
  switch (kind) {
    case K::Int: return v.is_number_integer();
    case K::Double: return v.is_number();
    case K::String: return v.is_string();
    case K::DoubleList:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); });
    case K::StringList:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); });
  }
  return false;
}

double to_double(const std::string& s, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("--" + key + ": not a number: " + s);
  return v;
}

}  // namespace

const std::map<std::string, std::vector<OptionSpec>>& schema() {
  static const auto s = build_schema();
  return s;
}

const OptionSpec& option_spec(const std::string& section, const std::string& key) {
  const auto& opts = schema().at(section);
  for (const auto& o : opts) {
    if (o.key == key) return o;
  }
  throw ConfigError("unknown key '" + key + "' in section '" + section + "'");
}

json default_config() {
  json c = json::object();
  for (const auto& [section, opts] : schema()) {
    json& s = c[section] = json::object();
    for (const auto& o : opts) s[o.key] = o.fallback;
  }
  return c;
}

void merge_config_file(json& config, const json& file) {
  if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [section, values] : file.items()) {
    if (!schema().contains(section)) throw ConfigError("unknown config section '" + section + "'");
    if (!values.is_object()) throw ConfigError("config section '" + section + "' must be an object");
    for (const auto& [key, v] : values.items()) {
      const OptionSpec& spec = option_spec(section, key);
      if (!(v.is_null() && spec.fallback.is_null()) && !matches(spec.kind, v)) {
        throw ConfigError("config key " + section + "." + key + " has the wrong type");
      }
      config[section][key] = v;
    }
  }
}

json parse_flag_value(const OptionSpec& spec, const std::vector<std::string>& raw) {
  const std::string flag = spec.key;
  auto single = [&]() -> const std::string& {
    if (raw.size() != 1) throw ConfigError("--" + flag + " takes one value");
    return raw.front();
  };
  switch (spec.kind) {
    case K::Int: {
      const double d = to_double(single(), flag);
      if (d != static_cast<double>(static_cast<long long>(d))) {
        throw ConfigError("--" + flag + ": expected an integer, got " + single());
      }
      return static_cast<long long>(d);
    }
    case K::Double: return to_double(single(), flag);
    case K::String: return single();
    case K::DoubleList: {
      json arr = json::array();
      for (const auto& r : raw) arr.push_back(to_double(r, flag));
      return arr;
    }
    case K::StringList: return json(raw);
  }
  return nullptr;
}

const json& SectionView::at(const std::string& key) const {
  if (!values_.contains(key)) throw ConfigError("missing key " + name_ + "." + key);
  return values_.at(key);
}

bool SectionView::has(const std::string& key) const {
  return values_.contains(key) && !values_.at(key).is_null();
}

long long SectionView::integer(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_number_integer()) throw ConfigError(name_ + "." + key + " must be an integer");
  return v.get<long long>();
}

double SectionView::number(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_number()) throw ConfigError(name_ + "." + key + " must be a number");
  return v.get<double>();
}

std::string SectionView::text(const std::string& key) const {
  const json& v = at(key);
  if (!v.is_string()) throw ConfigError(name_ + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> SectionView::numbers(const std::string& key) const {
  return at(key).get<std::vector<double>>();
}

std::vector<std::string> SectionView::texts(const std::string& key) const {
  return at(key).get<std::vector<std::string>>();
}

std::optional<long long> SectionView::integer_or_null(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return integer(key);
}

std::optional<double> SectionView::number_or_null(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

}  // namespace ragdepth::cli
