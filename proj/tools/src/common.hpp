#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "netreason/netlist/cell_library.hpp"
#include "netreason/pred/llm_client.hpp"

namespace netreason::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// Exit status per error family, so scripts can branch without parsing.
int exit_code_for(const std::string& error_code);

/// Throws cli.InvalidFlags.
[[noreturn]] void reject(const std::string& message);

/// Absolute, lexically normal form of a user path.
fs::path resolve(const fs::path& p);

/// Rejects an output directory that equals or contains one of the inputs,
/// or sits inside one of them.
void check_output_separate(const fs::path& out, const std::vector<fs::path>& inputs);

/// Manifest written next to every artifact set. `config` holds the resolved
/// options that determine the output; its canonical dump is hashed. Fields
/// already present in an existing manifest.json (checkpoints) are kept.
struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  json config = json::object();
  json results = json::object();
};
std::string config_hash(const json& config);
void write_manifest(const fs::path& dir, const Manifest& m);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. If several calls
/// throw, the exception of the lowest index is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

const netlist::CellLibrary& cell_library(const fs::path& file);

/// Endpoint settings from an optional JSON file; the key comes only from
/// the environment.
pred::EndpointConfig endpoint(const fs::path& file);

/// Sub-directories of `dir` in name order.
std::vector<fs::path> child_dirs(const fs::path& dir);

}  // namespace netreason::cli
