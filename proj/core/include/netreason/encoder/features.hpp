#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netreason/netlist/tag_graph.hpp"

namespace netreason::encoder {

/// Layout of the per-node feature vector. All offsets are fixed, so the
/// length is a compile-time property of the build.
struct FeatureLayout {
  static constexpr int kNot = 0;
  static constexpr int kAnd = 1;
  static constexpr int kOr = 2;
  static constexpr int kXor = 3;
  static constexpr int kDepth = 4;
  static constexpr int kSupport = 5;
  static constexpr int kCellBegin = 6;
  /// Built-in cell names (sorted) plus one "other" slot.
  static const std::vector<std::string>& cell_kinds();
  static int cell_slots() { return static_cast<int>(cell_kinds().size()) + 1; }
  static constexpr int kSignatureBuckets = 16;
  static constexpr int kSignatureMaxSupport = 6;
  static int signature_begin() { return kCellBegin + cell_slots(); }
  static int kind_begin() { return signature_begin() + kSignatureBuckets; }
  static int size() { return kind_begin() + 4; }
};

/// Deterministic features of one node: operator counts, depth, support
/// size, one-hot cell kind, one-hot truth-table signature bucket (support up
/// to 6; the signature is invariant under input renaming) and node-kind
/// flags. Node ids play no part.
Eigen::RowVectorXd featurize(const netlist::TagNode& node);

/// Bucket index of the permutation-canonical truth table, or -1 when the
/// support is too large.
int signature_bucket(const netlist::BoolExpr& expr);

/// One row per node, in node-id order.
Eigen::MatrixXd featurize_graph(const netlist::TagGraph& graph);

}  // namespace netreason::encoder
