#include "ragdepth/harness/client.hpp"

#include "httplib.h"

#include <cstdlib>
#include "json.hpp"
#include <thread>

#include "ragdepth/errors.hpp"
#include "ragdepth/log.hpp"

namespace ragdepth::harness {

using json = nlohmann::json;

namespace {

struct Url {
  std::string origin;
  std::string prefix;
};

Url split_url(const std::string& base) {
  const auto scheme = base.find("://");
  if (scheme == std::string::npos) throw ConfigError("base_url needs a scheme: " + base);
  const auto slash = base.find('/', scheme + 3);
  Url u;
  u.origin = base.substr(0, slash);
  if (slash != std::string::npos) u.prefix = base.substr(slash);
  while (!u.prefix.empty() && u.prefix.back() == '/') u.prefix.pop_back();
  return u;
}

bool transient_status(int status) { return status == 429 || status >= 500; }

}  // namespace

std::string request_body(const std::vector<Message>& messages, const EndpointConfig& config) {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  json body = {{"model", config.model},
               {"messages", msgs},
               {"temperature", config.temperature},
               {"max_tokens", config.max_tokens}};
  return body.dump();
}

std::string parse_completion(const std::string& body) {
  try {
    const json j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("malformed completion response: ") + e.what());
  }
}

Completion query_endpoint(const std::vector<Message>& messages, const EndpointConfig& config) {
  const char* key = std::getenv(config.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw AuthError("credential " + config.api_key_env + " is not set");
  }
  if (config.attempts < 1) throw ConfigError("attempts must be at least 1");
  const Url url = split_url(config.base_url);
  const std::string path = url.prefix + "/v1/chat/completions";
  const std::string body = request_body(messages, config);

  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  client.set_bearer_token_auth(key);

  const auto start = std::chrono::steady_clock::now();
  auto backoff = config.initial_backoff;
  std::string last_error;
  bool last_timeout = false;
  for (int attempt = 0; attempt < config.attempts; ++attempt) {
    if (attempt > 0) {
      log::debug("retrying in {} ms ({})", backoff.count(), last_error);
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    log::debug("POST {}{} {}", url.origin, path, body);
    auto res = client.Post(path, body, "application/json");
    if (!res) {
      const auto err = res.error();
      last_timeout = err == httplib::Error::Read || err == httplib::Error::Write ||
                     err == httplib::Error::ConnectionTimeout;
      last_error = httplib::to_string(err);
      continue;
    }
    log::debug("HTTP {} {}", res->status, res->body);
    if (res->status == 401 || res->status == 403) {
      throw AuthError("endpoint rejected credential (HTTP " + std::to_string(res->status) + ")");
    }
    if (transient_status(res->status)) {
      last_timeout = false;
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw EndpointError("endpoint returned HTTP " + std::to_string(res->status));
    }
    Completion c;
    c.text = parse_completion(res->body);
    c.retries = attempt;
    c.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return c;
  }
  const std::string msg = "giving up after " + std::to_string(config.attempts) +
                          " attempts: " + last_error;
  if (last_timeout) throw TimeoutError(msg);
  throw EndpointError(msg);
}

}  // namespace ragdepth::harness
