#include "netreason/nn/tensor_io.hpp"

#include <cstdio>
#include <sstream>

#include "netreason/error.hpp"

namespace netreason::nn {

std::string save_tensors(const ParamStore& store) {
  std::string out = "netreason-tensors 1\ncount " + std::to_string(store.size()) + "\n";
  char buf[32];
  for (const auto* p : store.all()) {
    out += "tensor " + p->name + " " + std::to_string(p->value.rows()) + " " +
           std::to_string(p->value.cols()) + "\n";
    for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", p->value(r, c));
        if (c) out += ' ';
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

void load_tensors(ParamStore& store, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic, kw;
  int version = 0;
  std::size_t count = 0;
  in >> magic >> version >> kw >> count;
  if (magic != "netreason-tensors" || version != 1 || kw != "count")
    fail("nn.BadCheckpoint", "missing 'netreason-tensors 1' header");
  if (count != store.size())
    fail("nn.ShapeMismatch", "checkpoint has " + std::to_string(count) + " tensors, model has " +
                                 std::to_string(store.size()));
  for (std::size_t k = 0; k < count; ++k) {
    std::string tag, name;
    Eigen::Index rows = 0, cols = 0;
    in >> tag >> name >> rows >> cols;
    if (tag != "tensor") fail("nn.BadCheckpoint", "expected 'tensor' record");
    auto& p = store.at(name);
    if (p.value.rows() != rows || p.value.cols() != cols)
      fail("nn.ShapeMismatch", name + " is " + std::to_string(p.value.rows()) + "x" +
                                   std::to_string(p.value.cols()) + " in the model");
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) {
        std::string tok;
        if (!(in >> tok)) fail("nn.BadCheckpoint", "truncated tensor " + name);
        p.value(r, c) = std::strtod(tok.c_str(), nullptr);
      }
  }
}

}  // namespace netreason::nn
