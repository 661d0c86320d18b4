#include "ragdepth/harness/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <thread>

#include "ragdepth/errors.hpp"
#include "ragdepth/log.hpp"

namespace ragdepth::harness {

std::string normalize(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::ispunct(c)) continue;
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

Score score(std::string_view completion, const std::vector<std::string>& answers) {
  static const std::string abstain = normalize("NO-RES");
  const std::string c = normalize(completion);
  Score s;
  s.abstained = c == abstain;
  if (s.abstained) return s;
  s.matched = std::any_of(answers.begin(), answers.end(), [&](const std::string& a) {
    const std::string n = normalize(a);
    return !n.empty() && c.find(n) != std::string::npos;
  });
  return s;
}

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second), burst_(std::max(1.0, burst)), tokens_(burst_),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
  if (rate_ <= 0.0) return;
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    tokens_ = std::min(burst_, tokens_ + rate_ * std::chrono::duration<double>(now - last_).count());
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

EvalReport run_eval(const std::vector<QAExample>& examples, const std::vector<PromptLayout>& layouts,
                    const EvalConfig& config) {
  if (layouts.empty()) throw ConfigError("no layouts requested");
  if (config.max_in_flight < 1) throw ConfigError("max_in_flight must be at least 1");
  // Validate layouts up front so a bad config fails before any request.
  for (std::size_t e = 0; e < examples.size(); ++e) {
    for (const auto& l : layouts) (void)assemble_prompt(examples[e], l);
  }
  Backend backend = config.backend;
  if (!backend) {
    backend = [endpoint = config.endpoint](const std::vector<Message>& m) {
      return query_endpoint(m, endpoint);
    };
  }

  EvalReport report;
  report.layouts = layouts;
  const std::size_t total = examples.size() * layouts.size();
  report.records.resize(total);
  TokenBucket bucket(config.requests_per_second, static_cast<double>(config.max_in_flight));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= total || abort.load()) return;
      EvalRecord& rec = report.records[k];
      rec.example_id = k / layouts.size();
      rec.layout = layouts[k % layouts.size()];
      const QAExample& ex = examples[rec.example_id];
      try {
        bucket.acquire();
        const Completion c = backend(assemble_prompt(ex, rec.layout));
        rec.completion = c.text;
        rec.latency_ms = c.latency_ms;
        rec.retries = c.retries;
        const Score s = score(c.text, ex.answers);
        rec.matched = s.matched;
        rec.abstained = s.abstained;
      } catch (const AuthError&) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        abort.store(true);
        return;
      } catch (const EndpointError& e) {
        rec.error = e.what();
        log::error("example {} layout {}: {}", rec.example_id, rec.layout.label(), e.what());
      }
    }
  };

  const std::size_t n_workers = std::min(config.max_in_flight, std::max<std::size_t>(total, 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);
  report.failures = static_cast<std::size_t>(
      std::count_if(report.records.begin(), report.records.end(),
                    [](const EvalRecord& r) { return r.error.has_value(); }));
  return report;
}

Table EvalReport::results() const {
  Table t;
  t.columns = {"example_id", "layout", "matched", "abstained", "latency_ms"};
  for (const auto& r : records) {
    t.add_row({static_cast<std::int64_t>(r.example_id), r.layout.label(), r.matched, r.abstained,
               r.latency_ms});
  }
  return t;
}

double EvalReport::accuracy(const PromptLayout& layout) const {
  std::size_t n = 0, hit = 0;
  for (const auto& r : records) {
    if (!(r.layout == layout)) continue;
    ++n;
    hit += r.matched ? 1 : 0;
  }
  return n == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(n);
}

Table EvalReport::summary(const std::string& model) const {
  Table t;
  t.columns = {"model", "metric"};
  for (const auto& l : layouts) t.columns.push_back(l.label());
  auto rate = [&](const PromptLayout& l, auto pred) {
    std::size_t n = 0, hit = 0;
    for (const auto& r : records) {
      if (!(r.layout == l)) continue;
      ++n;
      hit += pred(r) ? 1 : 0;
    }
    return n == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(n);
  };
  std::vector<Cell> acc{model, std::string("accuracy")};
  std::vector<Cell> abst{model, std::string("abstention_rate")};
  std::vector<Cell> fail{model, std::string("failure_rate")};
  for (const auto& l : layouts) {
    acc.emplace_back(rate(l, [](const EvalRecord& r) { return r.matched; }));
    abst.emplace_back(rate(l, [](const EvalRecord& r) { return r.abstained; }));
    fail.emplace_back(rate(l, [](const EvalRecord& r) { return r.error.has_value(); }));
  }
  t.add_row(std::move(acc));
  t.add_row(std::move(abst));
  t.add_row(std::move(fail));
  return t;
}

}  // namespace ragdepth::harness
