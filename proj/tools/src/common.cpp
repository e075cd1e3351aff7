#include "common.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "netreason/error.hpp"
#include "netreason/util/io.hpp"

namespace netreason::cli {

int exit_code_for(const std::string& error_code) {
  static const std::map<std::string, int> codes = {{"cli", 2},     {"netlist", 3}, {"encoder", 4}, {"align", 5},
                                                   {"pred", 6},    {"eval", 7},    {"nn", 8},      {"util", 9}};
  auto it = codes.find(error_code.substr(0, error_code.find('.')));
  return it == codes.end() ? 1 : it->second;
}

void reject(const std::string& message) { fail("cli.InvalidFlags", message); }

fs::path resolve(const fs::path& p) { return fs::absolute(p).lexically_normal(); }

void check_output_separate(const fs::path& out, const std::vector<fs::path>& inputs) {
  auto inside = [](const fs::path& a, const fs::path& b) {
    auto rel = a.lexically_relative(b);
    return !rel.empty() && *rel.begin() != "..";
  };
  for (const auto& in : inputs) {
    if (in.empty()) continue;
    if (inside(out, in) || inside(in, out))
      reject("output " + out.string() + " overlaps input " + in.string());
  }
}

std::string config_hash(const json& config) { return util::hex64(util::fnv1a(config.dump())); }

void write_manifest(const fs::path& dir, const Manifest& m) {
  fs::create_directories(dir);
  json j = json::object();
  const auto file = dir / "manifest.json";
  if (fs::exists(file)) {
    try {
      j = json::parse(util::read_file(file));
    } catch (const json::exception&) {
      j = json::object();
    }
  }
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["config"] = m.config;
  j["config_hash"] = config_hash(m.config);
  if (!m.results.empty()) j["results"] = m.results;
  util::write_file_atomic(file, j.dump(2) + "\n");
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr error;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

const netlist::CellLibrary& cell_library(const fs::path& file) {
  if (file.empty()) return netlist::CellLibrary::builtin();
  static const netlist::CellLibrary lib = netlist::CellLibrary::parse(util::read_file(file));
  return lib;
}

pred::EndpointConfig endpoint(const fs::path& file) { return pred::load_endpoint_config(file); }

std::vector<fs::path> child_dirs(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail("cli.MissingInput", dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace netreason::cli
