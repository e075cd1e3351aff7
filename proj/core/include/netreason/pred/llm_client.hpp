#pragma once

#include <filesystem>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "netreason/pred/annotate.hpp"

namespace netreason::pred {

/// Chat-completion endpoint settings. Wire format (JSON over HTTP):
///
///   POST {base_url}/v1/chat/completions
///     {"model", "messages": [{"role", "content"}], "temperature", "max_tokens"}
///   -> {"choices": [{"message": {"role": "assistant", "content": "..."}}]}
///
///   POST {base_url}/v1/embeddings
///     {"model", "input": "<text>"}
///   -> {"data": [{"embedding": [numbers]}]}
///
/// The credential is sent as "Authorization: Bearer <api_key>".
struct EndpointConfig {
  std::string base_url = "http://127.0.0.1:8089";
  std::string model = "gpt-4o";
  std::string embedding_model = "text-embedding-3-small";
  std::string api_key;
  double temperature = 0;
  int max_tokens = 2048;
  double timeout_s = 60;
  int attempts = 3;
  double backoff_s = 0.5;  // doubled after every failed attempt
  int max_in_flight = 4;
  std::filesystem::path audit_log;  // JSON lines; empty disables
};

inline constexpr const char* kApiKeyEnv = "NETREASON_API_KEY";

/// Optional JSON file with the fields above except api_key, which comes
/// only from the NETREASON_API_KEY environment variable.
EndpointConfig load_endpoint_config(const std::filesystem::path& file);

/// Thread-safe client. Transient failures (connection errors, HTTP 429 and
/// 5xx) are retried with exponential backoff. Errors: pred.AuthFailure,
/// pred.EndpointUnreachable, pred.RateLimited, pred.MalformedResponse.
class LlmClient {
 public:
  explicit LlmClient(EndpointConfig cfg);
  LlmClient(const LlmClient&) = delete;
  LlmClient& operator=(const LlmClient&) = delete;

  const EndpointConfig& config() const { return cfg_; }

  std::string complete(const PromptMessages& prompt);
  std::vector<double> embed(std::string_view text);

 private:
  std::string post(const std::string& path, const std::string& body);
  void audit(const std::string& path, const std::string& request, int status, const std::string& response,
             double latency_ms);

  EndpointConfig cfg_;
  std::counting_semaphore<1024> slots_;
  std::mutex audit_mu_;
};

}  // namespace netreason::pred
