#pragma once

#include <atomic>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace netreason::pred {

struct MockReply {
  int status = 200;
  std::string content;   // assistant message for chat completions
  std::string raw_body;  // sent verbatim when non-empty
};

struct MockLlmConfig {
  /// Bearer token to require; empty accepts any request.
  std::string expected_key;
  /// Consumed first, one reply per request.
  std::deque<MockReply> script;
  /// Reply chosen by the first "module <name>" found in the last message.
  std::map<std::string, std::string> answers_by_module;
  std::string default_reply = "No answer available.";
  /// Reply for judging prompts (messages mentioning "similarity score").
  std::string judge_reply = "0.5";
  /// Embedding vectors by exact input text; other inputs get a hashed
  /// bag-of-words vector of width 64.
  std::map<std::string, std::vector<double>> embeddings;
};

/// Deterministic in-process stand-in for a chat-completion service.
class MockLlmServer {
 public:
  explicit MockLlmServer(MockLlmConfig cfg);
  ~MockLlmServer();
  MockLlmServer(const MockLlmServer&) = delete;
  MockLlmServer& operator=(const MockLlmServer&) = delete;

  /// Binds (port 0 picks a free port), serves on a background thread and
  /// returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

  std::string base_url() const;
  int requests() const { return requests_.load(); }
  void push_reply(MockReply r);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::atomic<int> requests_{0};
};

/// Hashed bag-of-words embedding used by the mock server.
std::vector<double> hashed_embedding(const std::string& text, int dim = 64);

}  // namespace netreason::pred
