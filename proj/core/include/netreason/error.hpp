#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace netreason {

/// Exception carrying a module-qualified error code such as
/// "netlist.UnknownCell" or "llm.AuthFailure". The CLI prints the code
/// on failure so callers can categorize errors without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
  throw Error(std::move(code), message);
}

}  // namespace netreason
