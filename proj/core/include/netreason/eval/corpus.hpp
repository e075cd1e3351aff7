#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netreason/netlist/netlist.hpp"
#include "netreason/pred/labels.hpp"

namespace netreason::eval {

struct IoSignal {
  std::string name;
  int width = 1;
};

/// One generated design: the gate-level netlist with per-gate source-block
/// labels, its word-level reference RTL, two reference descriptions and a
/// self-checking testbench.
struct CorpusDesign {
  std::string name;
  std::string kind;
  int width = 0;
  std::vector<IoSignal> inputs, outputs;
  std::map<std::string, std::string> output_exprs;  // output -> Verilog expression
  netlist::Netlist netlist;
  std::map<std::string, pred::FunctionLabel> labels;  // gate instance -> block
  std::string netlist_text;
  std::string golden_rtl;
  std::string spec_text;  // interface, purpose, functionality, constraints
  std::string impl_text;  // combinational logic, sequential behavior, control flow
  std::string testbench;
};

struct CorpusConfig {
  std::uint64_t seed = 1;
  int designs = 20;
  int min_width = 3;
  int max_width = 6;
  int random_vectors = 200;  // used when inputs exceed 12 bits in total
  std::vector<std::string> kinds;  // empty = template_kinds()
};

/// adder, subtractor, multiplier, comparator, mux, add_cmp, addsub_mux,
/// mac, sub_cmp, mul_mux.
const std::vector<std::string>& template_kinds();

/// Widest operand a kind accepts (multiplying kinds stay at 4 bits).
int max_width_for(const std::string& kind);

/// Throws eval.UnknownTemplate or eval.BadWidth (width < 2 or above the
/// kind's limit).
CorpusDesign make_design(const std::string& kind, int width, const std::string& name, std::uint64_t seed = 1);

/// Kinds cycle in order; widths are drawn from the seeded generator.
std::vector<CorpusDesign> generate_synthetic_corpus(const CorpusConfig& cfg);

/// Word-level semantics of the design's template, computed directly.
std::map<std::string, std::uint64_t> reference_outputs(const CorpusDesign& d,
                                                       const std::map<std::string, std::uint64_t>& inputs);

/// Distinct labels present in d.labels.
std::vector<pred::FunctionLabel> label_set(const CorpusDesign& d);

std::string labels_text(const std::map<std::string, pred::FunctionLabel>& labels);
std::map<std::string, pred::FunctionLabel> parse_labels(std::string_view text);

struct BenchmarkBundle {
  std::string design;
  int task = 1;  // 1 spec, 2 implementation detail, 3 RTL
  std::string netlist;
  std::string prompt;
  std::string golden;
  std::optional<std::string> testbench;  // task 3 only
};

BenchmarkBundle make_bundle(const CorpusDesign& d, int task);

/// `<dir>/netlist.v`, `prompt.txt`, `golden.txt` (tasks 1-2) or
/// `golden.v` + `tb.v` (task 3), written atomically.
void write_bundle(const std::filesystem::path& dir, const BenchmarkBundle& b);

/// Reads a bundle directory; the design id is the directory name. Throws
/// eval.BadBundle when a file is missing or empty.
BenchmarkBundle read_bundle(const std::filesystem::path& dir);

/// All bundles below `task_dir`, sorted by design id.
std::vector<BenchmarkBundle> load_bundles(const std::filesystem::path& task_dir);

/// Writes task1/, task2/, task3/ bundle trees, labels/<design>.txt and a
/// designs.json index (kind, width, gate count, labels per design).
void write_corpus(const std::filesystem::path& root, const std::vector<CorpusDesign>& designs);

}  // namespace netreason::eval
