#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "netreason/pred/mock_llm.hpp"
#include "netreason/util/io.hpp"

namespace fs = std::filesystem;
using namespace netreason;

namespace {

struct Result {
  int status = -1;
  std::string err;
};

/// Runs the CLI with `args` in `cwd`, capturing stderr.
Result run(const fs::path& cwd, const std::string& args) {
  const auto err = cwd / "stderr.txt";
  const std::string cmd =
      "cd '" + cwd.string() + "' && '" NETREASON_CLI "' " + args + " >/dev/null 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = fs::exists(err) ? util::read_file(err) : "";
  return r;
}

/// Relative path -> content of every regular file below `dir`.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = util::read_file(e.path());
  return out;
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("netreason_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("gen-corpus is byte-identical under a fixed seed") {
  const auto d = scratch("determinism");
  REQUIRE(run(d, "gen-corpus --seed 7 --designs 20 --out a").status == 0);
  REQUIRE(run(d, "gen-corpus --seed 7 --designs 20 --out b").status == 0);
  REQUIRE(run(d, "gen-corpus --seed 8 --designs 20 --out c").status == 0);
  const auto a = snapshot(d / "a");
  CHECK(a.size() == 20 * (3 + 3 + 4) + 20 + 2);
  CHECK(a == snapshot(d / "b"));
  CHECK(a != snapshot(d / "c"));
  CHECK(a.at("manifest.json").find("\"seed\": 7") != std::string::npos);
  CHECK(a.at("manifest.json").find("config_hash") != std::string::npos);
}

TEST_CASE("invalid flag combinations fail before any work") {
  const auto d = scratch("flags");
  REQUIRE(run(d, "gen-corpus --designs 4 --out corpus").status == 0);
  const std::pair<const char*, const char*> cases[] = {
      {"gen-corpus --min-width 6 --max-width 3 --out o", "--min-width"},
      {"gen-corpus --designs 0 --out o", "--designs"},
      {"gen-corpus --kinds adder,divider --out o", "--kinds"},
      {"generate --paradigm 2 --out o", "--prompts"},
      {"generate --paradigm 3 --prompts corpus --out o", "--paradigm"},
      {"generate --paradigm 2 --prompts corpus --model corpus --out o", "--model"},
      {"generate --paradigm 1 --bundles corpus/task1 --out o", "--model"},
      {"eval --bundles corpus/task1 --outputs corpus/task1 --judge --out o", "--endpoint"},
      {"eval --bundles corpus/task1 --outputs corpus/task1 --sim-run x --out o", "--sim-compile"},
      {"eval --bundles corpus/task1 --outputs corpus/task1 --out corpus/task1/r", "overlaps"},
      {"train-head --corpus corpus --encoder strong --out o", "--encoder"},
      {"train-align1 --corpus corpus/task1 --d-model 10 --heads 4 --out o", "--heads"},
      {"report --run a --out o", "NAME=DIR"},
  };
  for (const auto& [args, mention] : cases) {
    CAPTURE(args);
    const auto r = run(d, args);
    CHECK(r.status == 2);
    CHECK(r.err.find("error [cli.InvalidFlags]") == 0);
    CHECK(r.err.find(mention) != std::string::npos);
    CHECK_FALSE(fs::exists(d / "o"));
  }
}

TEST_CASE("module errors carry their code and exit status") {
  const auto d = scratch("errors");
  fs::create_directories(d / "empty");
  util::write_file_atomic(d / "loop.v",
                          "module t(input a, output y);\n wire p, q;\n AND2 g0(.A(a), .B(q), .Y(p));\n"
                          " INV g1(.A(p), .Y(q));\n BUF g2(.A(q), .Y(y));\nendmodule\n");
  util::write_file_atomic(d / "bad.v", "module t(input a, output y); FOO g(.A(a), .Y(y)); endmodule\n");
  auto r = run(d, "ingest --netlist loop.v --out o");
  CHECK(r.status == 3);
  CHECK(r.err.find("error [netlist.CombinationalLoop]") == 0);
  r = run(d, "ingest --netlist bad.v --out o");
  CHECK(r.status == 3);
  CHECK(r.err.find("error [netlist.UnknownCell]") == 0);
  r = run(d, "annotate --head empty --bundles empty --out o");
  CHECK(r.status == 6);
  CHECK(r.err.find("error [pred.BadCheckpoint]") == 0);
}

TEST_CASE("ingest and split write canonical artifacts") {
  const auto d = scratch("ingest");
  util::write_file_atomic(d / "x.v",
                          "module x(input [1:0] a, output y, z);\n"
                          "AND2 g0(.A(a[0]), .B(a[1]), .Y(y));\nXOR2 g1(.A(a[0]), .B(a[1]), .Y(z));\nendmodule\n");
  REQUIRE(run(d, "ingest --netlist x.v --out ing").status == 0);
  CHECK(util::read_file(d / "ing/x/io.txt") == "inputs: a[1:0]; outputs: y, z\n");
  CHECK(fs::exists(d / "ing/x/graph.txt"));
  REQUIRE(run(d, "split --netlist ing/x/netlist.v --cap 1 --out sp").status == 0);
  std::size_t parts = 0;
  for (const auto& e : fs::directory_iterator(d / "sp")) parts += e.is_directory() ? 1 : 0;
  CHECK(parts == 2);
}

TEST_CASE("Paradigm-2 dry run against the mock completes and scores every design") {
  const auto d = scratch("p2");
  REQUIRE(run(d, "gen-corpus --seed 3 --designs 10 --out corpus").status == 0);
  const auto before = snapshot(d / "corpus");
  REQUIRE(run(d, "train-head --corpus corpus --epochs 5 --out head").status == 0);
  REQUIRE(run(d, "annotate --head head --bundles corpus/task3 --out ann --jobs 3").status == 0);
  REQUIRE(run(d, "annotate --head head --bundles corpus/task3 --out ann1").status == 0);
  CHECK(snapshot(d / "ann") == snapshot(d / "ann1"));
  REQUIRE(run(d, "prompt --annotated ann --out prompts").status == 0);
  REQUIRE(run(d, "prompt --annotated ann --no-annotation --out plain").status == 0);
  CHECK(util::read_file(d / "prompts/d0000/prompt.txt").find("// func:") != std::string::npos);
  CHECK(util::read_file(d / "plain/d0000/prompt.txt").find("// func:") == std::string::npos);

  pred::MockLlmConfig cfg;
  for (const auto& e : fs::directory_iterator(d / "corpus/task3"))
    cfg.answers_by_module[e.path().filename().string()] =
        "Step 1: word-level function.\n```verilog\n" + util::read_file(e.path() / "golden.v") + "```\n";
  pred::MockLlmServer server(cfg);
  server.start();
  util::write_file_atomic(d / "endpoint.json", "{\"base_url\": \"" + server.base_url() + "\", \"backoff_s\": 0.01}");
  setenv("NETREASON_API_KEY", "test-key", 1);
  REQUIRE(run(d, "generate --paradigm 2 --prompts prompts --endpoint endpoint.json --samples 5 --jobs 4 --out gen")
              .status == 0);
  CHECK(server.requests() == 50);
  REQUIRE(run(d, "eval --bundles corpus/task3 --outputs gen --jobs 4 --out report").status == 0);
  REQUIRE(run(d, "eval --bundles corpus/task3 --outputs gen --judge --endpoint endpoint.json --out judged").status ==
          0);
  unsetenv("NETREASON_API_KEY");
  server.stop();

  const auto summary = util::read_file(d / "report/summary.txt");
  CHECK(summary.find("synthetic corpus") != std::string::npos);
  CHECK(summary.find("Success rate (macro)    1.000000") != std::string::npos);
  CHECK(summary.find("Syntax pass             1.000000") != std::string::npos);
  CHECK(util::read_file(d / "judged/summary.txt").find("GPT score   0.500000") != std::string::npos);
  CHECK(util::read_file(d / "report/report.csv").find("d0009,3,5,") != std::string::npos);
  CHECK(snapshot(d / "corpus") == before);
}

TEST_CASE("Paradigm-1 aligned and --no-align runs produce comparable reports") {
  const auto d = scratch("p1");
  REQUIRE(run(d, "gen-corpus --seed 5 --designs 3 --min-width 2 --max-width 2 --out corpus").status == 0);
  const std::string model = " --corpus corpus/task1 --steps 3 --d-model 16 --decoder-layers 1 --heads 2"
                            " --connector-hidden 16 --encoder weak";
  const std::string stage2 = " --corpus corpus/task1 --steps 3";
  REQUIRE(run(d, "train-align1" + model + " --out a1").status == 0);
  REQUIRE(run(d, "train-align1" + model + " --out a1_again").status == 0);
  CHECK(snapshot(d / "a1") == snapshot(d / "a1_again"));
  REQUIRE(run(d, "train-align2" + stage2 + " --init a1 --out a2").status == 0);
  REQUIRE(run(d, "train-align1" + model + " --no-align --out b1").status == 0);
  REQUIRE(run(d, "train-align2" + stage2 + " --init b1 --no-align --out b2").status == 0);
  CHECK(run(d, "train-align2" + stage2 + " --init a1 --no-align --out bad").status == 2);

  REQUIRE(run(d, "generate --paradigm 1 --model a2 --bundles corpus/task1 --max-len 24 --out ga").status == 0);
  REQUIRE(run(d, "generate --paradigm 1 --model b2 --bundles corpus/task1 --max-len 24 --out gb").status == 0);
  REQUIRE(run(d, "eval --bundles corpus/task1 --outputs ga --out ea").status == 0);
  REQUIRE(run(d, "eval --bundles corpus/task1 --outputs gb --out eb").status == 0);
  REQUIRE(run(d, "report --run aligned=ea --run no-align=eb --checkpoint aligned=a2 --checkpoint no-align=b2 --out cmp")
              .status == 0);
  const auto csv = util::read_file(d / "cmp/comparison.csv");
  CHECK(csv.find("\naligned,") != std::string::npos);
  CHECK(csv.find("\nno-align,") != std::string::npos);

  REQUIRE(run(d, "gen-corpus --seed 5 --designs 2 --out other").status == 0);
  REQUIRE(run(d, "generate --paradigm 1 --model a2 --bundles other/task1 --max-len 8 --out go").status == 0);
  REQUIRE(run(d, "eval --bundles other/task1 --outputs go --out eo").status == 0);
  const auto r = run(d, "report --run aligned=ea --run other=eo --out cmp2");
  CHECK(r.status == 2);
  CHECK(r.err.find("error [cli.IncomparableRuns]") == 0);
}
