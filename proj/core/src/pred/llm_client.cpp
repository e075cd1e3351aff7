#include "netreason/pred/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "netreason/error.hpp"
#include "netreason/util/io.hpp"

namespace netreason::pred {

using nlohmann::json;

EndpointConfig load_endpoint_config(const std::filesystem::path& file) {
  EndpointConfig cfg;
  if (!file.empty()) {
    try {
      auto j = json::parse(util::read_file(file));
      cfg.base_url = j.value("base_url", cfg.base_url);
      cfg.model = j.value("model", cfg.model);
      cfg.embedding_model = j.value("embedding_model", cfg.embedding_model);
      cfg.temperature = j.value("temperature", cfg.temperature);
      cfg.max_tokens = j.value("max_tokens", cfg.max_tokens);
      cfg.timeout_s = j.value("timeout_s", cfg.timeout_s);
      cfg.attempts = j.value("attempts", cfg.attempts);
      cfg.backoff_s = j.value("backoff_s", cfg.backoff_s);
      cfg.max_in_flight = j.value("max_in_flight", cfg.max_in_flight);
      cfg.audit_log = j.value("audit_log", cfg.audit_log.string());
    } catch (const json::exception& e) {
      fail("pred.BadEndpointConfig", file.string() + ": " + e.what());
    }
  }
  if (const char* key = std::getenv(kApiKeyEnv)) cfg.api_key = key;
  return cfg;
}

LlmClient::LlmClient(EndpointConfig cfg)
    : cfg_(std::move(cfg)), slots_(std::clamp(cfg_.max_in_flight, 1, 1024)) {}

namespace {

std::string timestamp() {
  auto now = std::chrono::system_clock::now();
  auto t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

void LlmClient::audit(const std::string& path, const std::string& request, int status, const std::string& response,
                      double latency_ms) {
  if (cfg_.audit_log.empty()) return;
  json rec = {{"timestamp", timestamp()},
              {"endpoint", path},
              {"model", cfg_.model},
              {"prompt_hash", util::hex64(util::fnv1a(request))},
              {"status", status},
              {"latency_ms", latency_ms},
              {"request", request},
              {"response", response}};
  std::lock_guard lock(audit_mu_);
  std::ofstream out(cfg_.audit_log, std::ios::app);
  out << rec.dump() << '\n';
}

std::string LlmClient::post(const std::string& path, const std::string& body) {
  if (cfg_.api_key.empty())
    fail("pred.AuthFailure", std::string("no credential; set ") + kApiKeyEnv);
  struct Slot {
    std::counting_semaphore<1024>& s;
    explicit Slot(std::counting_semaphore<1024>& sem) : s(sem) { s.acquire(); }
    ~Slot() { s.release(); }
  } slot(slots_);

  httplib::Client client(cfg_.base_url);
  const auto timeout = std::chrono::duration<double>(cfg_.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers{{"Authorization", "Bearer " + cfg_.api_key}};

  double backoff = cfg_.backoff_s;
  std::string last;
  int last_status = 0;
  const int attempts = std::max(cfg_.attempts, 1);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path, headers, body, "application/json");
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!res) {
      last_status = 0;
      last = httplib::to_string(res.error());
      audit(path, body, 0, last, ms);
    } else {
      last_status = res->status;
      last = res->body;
      audit(path, body, res->status, res->body, ms);
      if (res->status == 200) return res->body;
      if (res->status == 401 || res->status == 403)
        fail("pred.AuthFailure", "endpoint rejected the credential (HTTP " + std::to_string(res->status) + ")");
      if (res->status != 429 && res->status < 500)
        fail("pred.MalformedResponse", "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    if (attempt < attempts) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2;
    }
  }
  if (last_status == 429) fail("pred.RateLimited", "still rate limited after " + std::to_string(attempts) + " attempts");
  if (last_status == 0)
    fail("pred.EndpointUnreachable", cfg_.base_url + ": " + last + " after " + std::to_string(attempts) + " attempts");
  fail("pred.EndpointUnreachable",
       "HTTP " + std::to_string(last_status) + " after " + std::to_string(attempts) + " attempts");
}

std::string LlmClient::complete(const PromptMessages& prompt) {
  json req = {{"model", cfg_.model}, {"temperature", cfg_.temperature}, {"max_tokens", cfg_.max_tokens}};
  req["messages"] = json::array();
  for (const auto& m : prompt.messages) req["messages"].push_back({{"role", m.role}, {"content", m.content}});
  auto body = post("/v1/chat/completions", req.dump());
  try {
    auto j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    fail("pred.MalformedResponse", std::string("chat completion: ") + e.what());
  }
}

std::vector<double> LlmClient::embed(std::string_view text) {
  json req = {{"model", cfg_.embedding_model}, {"input", text}};
  auto body = post("/v1/embeddings", req.dump());
  try {
    auto j = json::parse(body);
    auto v = j.at("data").at(0).at("embedding").get<std::vector<double>>();
    if (v.empty()) fail("pred.MalformedResponse", "empty embedding");
    return v;
  } catch (const json::exception& e) {
    fail("pred.MalformedResponse", std::string("embedding: ") + e.what());
  }
}

}  // namespace netreason::pred
