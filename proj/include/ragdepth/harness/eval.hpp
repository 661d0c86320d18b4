#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ragdepth/harness/client.hpp"
#include "ragdepth/harness/dataset.hpp"
#include "ragdepth/harness/prompt.hpp"
#include "ragdepth/table.hpp"

namespace ragdepth::harness {

// Lowercase, drop punctuation, collapse and trim whitespace.
std::string normalize(std::string_view text);

struct Score {
  bool matched = false;
  bool abstained = false;
};

// Abstention is a completion that normalizes to the same text as "NO-RES".
// An abstention never counts as a match.
Score score(std::string_view completion, const std::vector<std::string>& answers);

struct EvalRecord {
  std::size_t example_id = 0;
  PromptLayout layout;
  std::string completion;
  bool matched = false;
  bool abstained = false;
  double latency_ms = 0.0;
  int retries = 0;
  std::optional<std::string> error;
};

class TokenBucket {
 public:
  // rate <= 0 disables limiting.
  TokenBucket(double rate_per_second, double burst);
  void acquire();

 private:
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mutex_;
};

using Backend = std::function<Completion(const std::vector<Message>&)>;

struct EvalConfig {
  EndpointConfig endpoint;
  std::size_t max_in_flight = 4;
  double requests_per_second = 0.0;
  // Defaults to query_endpoint with `endpoint`.
  Backend backend;
};

struct EvalReport {
  // Ordered by example index, then layout.
  std::vector<EvalRecord> records;
  std::vector<PromptLayout> layouts;
  std::size_t failures = 0;

  // example_id,layout,matched,abstained,latency_ms
  Table results() const;
  // One row per metric, one column per layout.
  Table summary(const std::string& model) const;
  double accuracy(const PromptLayout& layout) const;
};

// Per-example endpoint failures are recorded and the run continues; an
// authentication failure aborts.
EvalReport run_eval(const std::vector<QAExample>& examples, const std::vector<PromptLayout>& layouts,
                    const EvalConfig& config);

}  // namespace ragdepth::harness
