#include "netreason/pred/mock_llm.hpp"

#include <cctype>
#include <regex>

#include <httplib.h>
#include <json.hpp>

#include "netreason/error.hpp"
#include "netreason/util/io.hpp"

namespace netreason::pred {

using nlohmann::json;

struct MockLlmServer::Impl {
  MockLlmConfig cfg;
  httplib::Server server;
  std::thread thread;
  std::mutex mu;
  std::string host;
  int port = 0;
};

std::vector<double> hashed_embedding(const std::string& text, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    v[util::fnv1a(word) % static_cast<std::uint64_t>(dim)] += 1.0;
    word.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    else
      flush();
  }
  flush();
  return v;
}

namespace {

std::string chat_body(const std::string& content) {
  json j = {{"id", "mock"},
            {"object", "chat.completion"},
            {"choices", json::array({{{"index", 0},
                                      {"message", {{"role", "assistant"}, {"content", content}}},
                                      {"finish_reason", "stop"}}})}};
  return j.dump();
}

}  // namespace

MockLlmServer::MockLlmServer(MockLlmConfig cfg) : impl_(std::make_unique<Impl>()) { impl_->cfg = std::move(cfg); }

MockLlmServer::~MockLlmServer() { stop(); }

void MockLlmServer::push_reply(MockReply r) {
  std::lock_guard lock(impl_->mu);
  impl_->cfg.script.push_back(std::move(r));
}

int MockLlmServer::start(const std::string& host, int port) {
  auto& im = *impl_;
  auto authorized = [&im](const httplib::Request& req, httplib::Response& res) {
    if (im.cfg.expected_key.empty()) return true;
    if (req.get_header_value("Authorization") == "Bearer " + im.cfg.expected_key) return true;
    res.status = 401;
    res.set_content(R"({"error":"invalid credential"})", "application/json");
    return false;
  };
  auto scripted = [&im](httplib::Response& res) {
    std::lock_guard lock(im.mu);
    if (im.cfg.script.empty()) return false;
    auto r = im.cfg.script.front();
    im.cfg.script.pop_front();
    res.status = r.status;
    res.set_content(r.raw_body.empty() ? chat_body(r.content) : r.raw_body, "application/json");
    return true;
  };
  im.server.Post("/v1/chat/completions", [this, &im, authorized, scripted](const httplib::Request& req,
                                                                            httplib::Response& res) {
    ++requests_;
    if (!authorized(req, res) || scripted(res)) return;
    std::string last;
    try {
      last = json::parse(req.body).at("messages").back().at("content").get<std::string>();
    } catch (const json::exception&) {
      res.status = 400;
      res.set_content(R"({"error":"bad request"})", "application/json");
      return;
    }
    std::string reply = im.cfg.default_reply;
    static const std::regex module_re(R"(\bmodule\s+([A-Za-z_][A-Za-z0-9_$]*))");
    std::smatch m;
    if (last.find("similarity score") != std::string::npos) {
      reply = im.cfg.judge_reply;
    } else if (std::regex_search(last, m, module_re)) {
      auto it = im.cfg.answers_by_module.find(m[1].str());
      if (it != im.cfg.answers_by_module.end()) reply = it->second;
    }
    res.set_content(chat_body(reply), "application/json");
  });
  im.server.Post("/v1/embeddings", [this, &im, authorized](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    if (!authorized(req, res)) return;
    std::string input;
    try {
      input = json::parse(req.body).at("input").get<std::string>();
    } catch (const json::exception&) {
      res.status = 400;
      res.set_content(R"({"error":"bad request"})", "application/json");
      return;
    }
    auto it = im.cfg.embeddings.find(input);
    auto vec = it != im.cfg.embeddings.end() ? it->second : hashed_embedding(input);
    json j = {{"object", "list"}, {"data", json::array({{{"index", 0}, {"embedding", vec}}})}};
    res.set_content(j.dump(), "application/json");
  });
  im.host = host;
  im.port = port == 0 ? im.server.bind_to_any_port(host) : (im.server.bind_to_port(host, port) ? port : -1);
  if (im.port <= 0) fail("pred.EndpointUnreachable", "mock server could not bind " + host);
  im.thread = std::thread([&im] { im.server.listen_after_bind(); });
  im.server.wait_until_ready();
  return im.port;
}

void MockLlmServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void MockLlmServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockLlmServer::base_url() const { return "http://" + impl_->host + ":" + std::to_string(impl_->port); }

}  // namespace netreason::pred
