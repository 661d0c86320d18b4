#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

#include "ragdepth/harness/prompt.hpp"

namespace ragdepth::harness {

class EndpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing credential or a 401/403 from the server.
class AuthError : public EndpointError {
 public:
  using EndpointError::EndpointError;
};

class TimeoutError : public EndpointError {
 public:
  using EndpointError::EndpointError;
};

// The body is not a chat-completions response.
class MalformedResponse : public EndpointError {
 public:
  using EndpointError::EndpointError;
};

struct EndpointConfig {
  std::string base_url = "http://127.0.0.1:8000";
  std::string model = "meta-llama/Meta-Llama-3.1-8B-Instruct";
  double temperature = 0.0;
  int max_tokens = 16;
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds timeout{60000};
  std::string api_key_env = "RALM_API_KEY";
};

struct Completion {
  std::string text;
  int retries = 0;
  double latency_ms = 0.0;
};

// POST {base_url}/v1/chat/completions. 429, 5xx and transport errors are
// retried with doubling backoff up to config.attempts in total.
Completion query_endpoint(const std::vector<Message>& messages, const EndpointConfig& config);

std::string request_body(const std::vector<Message>& messages, const EndpointConfig& config);

// Pulls choices[0].message.content out of a response body.
std::string parse_completion(const std::string& body);

}  // namespace ragdepth::harness
