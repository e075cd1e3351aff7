#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace netreason::eval {

inline constexpr const char* kPassSentinel = "ALL_TESTS_PASSED";
inline constexpr const char* kFailSentinel = "TEST_FAILED";

/// External simulator commands run through /bin/sh with {rtl}, {tb} and
/// {out} replaced by file paths, e.g.
///   compile_cmd = "iverilog -o {out} {rtl} {tb}", run_cmd = "vvp {out}".
/// An empty compile_cmd selects the built-in evaluator.
struct SimConfig {
  std::string compile_cmd;
  std::string run_cmd;
  double timeout_s = 60;
  /// Scratch files and logs go here; empty uses a fresh temp directory
  /// that is removed afterwards (the log text is still returned).
  std::filesystem::path work_dir;
};

struct RtlResult {
  bool syntax_pass = false;
  bool function_pass = false;
  std::optional<double> gpt_score;
  std::filesystem::path log_path;
  std::string log;
};

/// syntax_pass: the compile step succeeds. function_pass: the run output
/// contains kPassSentinel and no kFailSentinel. Errors: eval.SimulatorNotFound
/// (shell exit 127), eval.Timeout.
RtlResult run_testbench(const std::string& rtl, const std::string& tb, const SimConfig& cfg = {},
                        const std::string& tag = "design");

}  // namespace netreason::eval
