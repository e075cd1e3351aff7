#include "netreason/encoder/features.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

#include "netreason/netlist/cell_library.hpp"
#include "netreason/util/io.hpp"

namespace netreason::encoder {

using netlist::BoolExpr;
using netlist::ExprOp;
using netlist::NodeKind;

const std::vector<std::string>& FeatureLayout::cell_kinds() {
  static const std::vector<std::string> kinds = netlist::CellLibrary::builtin().names();
  return kinds;
}

int signature_bucket(const BoolExpr& expr) {
  auto vars = expr.support();
  if (vars.size() > static_cast<std::size_t>(FeatureLayout::kSignatureMaxSupport)) return -1;
  // canonical form: smallest table over all orderings of the inputs
  std::sort(vars.begin(), vars.end());
  std::uint64_t best = ~std::uint64_t{0};
  do {
    auto tt = netlist::truth_table(expr, vars);
    best = std::min(best, tt.words().empty() ? 0 : tt.words()[0]);
  } while (std::next_permutation(vars.begin(), vars.end()));
  std::string key = std::to_string(vars.size()) + ":" + std::to_string(best);
  return static_cast<int>(util::fnv1a(key) % FeatureLayout::kSignatureBuckets);
}

Eigen::RowVectorXd featurize(const netlist::TagNode& node) {
  Eigen::RowVectorXd f = Eigen::RowVectorXd::Zero(FeatureLayout::size());
  const bool pass_through = node.kind != NodeKind::Gate;
  if (!pass_through) {
    f(FeatureLayout::kNot) = node.expr.count(ExprOp::Not);
    f(FeatureLayout::kAnd) = node.expr.count(ExprOp::And);
    f(FeatureLayout::kOr) = node.expr.count(ExprOp::Or);
    f(FeatureLayout::kXor) = node.expr.count(ExprOp::Xor);
    f(FeatureLayout::kDepth) = node.expr.depth();
  }
  f(FeatureLayout::kSupport) = static_cast<double>(node.expr.support().size());
  if (node.kind == NodeKind::Gate || node.kind == NodeKind::RegisterBoundary) {
    const auto& kinds = FeatureLayout::cell_kinds();
    auto it = std::lower_bound(kinds.begin(), kinds.end(), node.cell);
    int slot = (it != kinds.end() && *it == node.cell)
                   ? static_cast<int>(it - kinds.begin())
                   : static_cast<int>(kinds.size());
    f(FeatureLayout::kCellBegin + slot) = 1.0;
  }
  if (!pass_through) {
    int bucket = signature_bucket(node.expr);
    if (bucket >= 0) f(FeatureLayout::signature_begin() + bucket) = 1.0;
  }
  f(FeatureLayout::kind_begin() + static_cast<int>(node.kind)) = 1.0;
  return f;
}

Eigen::MatrixXd featurize_graph(const netlist::TagGraph& graph) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(graph.nodes.size()), FeatureLayout::size());
  // signatures repeat per cell type; cache by expression shape
  std::map<std::string, Eigen::RowVectorXd> cache;
  for (const auto& node : graph.nodes) {
    std::string key;
    if (node.kind == NodeKind::Gate) {
      auto support = node.expr.support();
      std::map<std::string, BoolExpr> rename;
      for (std::size_t i = 0; i < support.size(); ++i)
        rename.emplace(support[i], BoolExpr::var("v" + std::to_string(i)));
      key = node.cell + "|" + node.expr.substitute(rename).to_string();
    } else {
      key = std::string(netlist::to_string(node.kind)) + "|" + node.cell;
    }
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, featurize(node)).first;
    out.row(node.id) = it->second;
  }
  return out;
}

}  // namespace netreason::encoder
