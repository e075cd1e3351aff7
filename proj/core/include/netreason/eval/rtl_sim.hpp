#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace netreason::eval {

/// Two-state interpreter for a behavioural Verilog subset, enough for
/// combinational word-level RTL and self-checking testbenches:
///
///  - modules with ANSI or non-ANSI ports, parameter / localparam,
///    wire / reg / integer declarations (up to 64 bits, unsigned)
///  - continuous assign, always @(*) / @* / @(a or b), initial blocks
///  - begin/end, blocking and non-blocking assignment, if/else,
///    case/casez/casex, for, while, repeat, #delay
///  - $display, $write, $finish, $stop; $dumpfile / $dumpvars are ignored
///  - full unsigned operator set with Verilog width rules, concatenation,
///    replication, bit and part selects on both sides of assignments
///  - module instances with named or positional ports and parameters
///
/// Combinational logic settles at every #delay. Initial blocks run one
/// after another rather than interleaved. Anything else (clocked always
/// blocks, signed arithmetic, functions, generate) is rejected at compile
/// time with eval.RtlSyntax.
class RtlDesign {
 public:
  struct Source {
    std::string name;
    std::string text;
  };

  /// Parses and elaborates; throws eval.RtlSyntax with file:line context.
  static RtlDesign compile(const std::vector<Source>& sources);

  RtlDesign(RtlDesign&&) noexcept;
  RtlDesign& operator=(RtlDesign&&) noexcept;
  ~RtlDesign();

  /// Name of the elaborated top module.
  const std::string& top() const;

  /// Runs the initial blocks and returns everything printed. Throws
  /// eval.Timeout past `timeout_s` seconds or eval.RtlRuntime past
  /// `max_steps` executed statements.
  std::string run(double timeout_s = 60, long max_steps = 50'000'000) const;

 private:
  struct Impl;
  explicit RtlDesign(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace netreason::eval
