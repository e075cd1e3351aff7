#include <memory>
#include <set>

#include "commands.hpp"
#include "common.hpp"
#include "netreason/error.hpp"
#include "netreason/eval/corpus.hpp"
#include "netreason/netlist/subcircuit.hpp"
#include "netreason/netlist/tag_graph.hpp"
#include "netreason/util/io.hpp"

namespace netreason::cli {

namespace {

struct GenCorpusOpts {
  std::uint64_t seed = 1;
  int designs = 20;
  int min_width = 3;
  int max_width = 6;
  int vectors = 200;
  std::vector<std::string> kinds;
  fs::path out;
};

void gen_corpus(const GenCorpusOpts& o) {
  eval::CorpusConfig cfg;
  cfg.seed = o.seed;
  cfg.designs = o.designs;
  cfg.min_width = o.min_width;
  cfg.max_width = o.max_width;
  cfg.random_vectors = o.vectors;
  cfg.kinds = o.kinds;
  const auto designs = eval::generate_synthetic_corpus(cfg);
  eval::write_corpus(o.out, designs);
  Manifest m{"gen-corpus", o.seed};
  m.config = {{"designs", o.designs},
              {"min_width", o.min_width},
              {"max_width", o.max_width},
              {"random_vectors", o.vectors},
              {"kinds", o.kinds.empty() ? eval::template_kinds() : o.kinds},
              {"corpus", "synthetic corpus (structural template lowering)"}};
  m.results = {{"designs", designs.size()}};
  write_manifest(o.out, m);
}

struct IngestOpts {
  std::vector<fs::path> netlists;
  fs::path cell_lib;
  fs::path out;
  int jobs = 1;
};

void ingest(const IngestOpts& o) {
  const auto& lib = cell_library(o.cell_lib);
  std::vector<netlist::Netlist> parsed(o.netlists.size());
  parallel_for(o.netlists.size(), o.jobs, [&](std::size_t i) {
    parsed[i] = netlist::parse_netlist(util::read_file(o.netlists[i]), lib);
    netlist::build_tag_graph(parsed[i], lib);
  });
  std::set<std::string> names;
  for (const auto& n : parsed)
    if (!names.insert(n.name).second) fail("cli.DuplicateDesign", "module " + n.name + " appears twice");
  json summary = json::array();
  for (const auto& n : parsed) {
    const auto dir = o.out / n.name;
    fs::create_directories(dir);
    const auto g = netlist::build_tag_graph(n, lib);
    util::write_file_atomic(dir / "netlist.v", netlist::emit_verilog(n));
    util::write_file_atomic(dir / "graph.txt", g.dump());
    util::write_file_atomic(dir / "io.txt", netlist::extract_io_signals(n) + "\n");
    summary.push_back({{"design", n.name}, {"gates", n.gates.size()}, {"nodes", g.nodes.size()},
                       {"edges", g.edges.size()}});
  }
  Manifest m{"ingest", 0};
  json inputs = json::array();
  for (const auto& p : o.netlists) inputs.push_back(p.string());
  m.config = {{"netlists", inputs}, {"cell_lib", o.cell_lib.string()}};
  m.results = {{"designs", summary}};
  write_manifest(o.out, m);
}

struct SplitOpts {
  fs::path netlist;
  fs::path cell_lib;
  std::size_t cap = 200;
  fs::path out;
};

void split(const SplitOpts& o) {
  const auto& lib = cell_library(o.cell_lib);
  const auto n = netlist::parse_netlist(util::read_file(o.netlist), lib);
  const auto r = netlist::split_subcircuits(n, lib, o.cap);
  json parts = json::array();
  for (std::size_t i = 0; i < r.subcircuits.size(); ++i) {
    const auto& s = r.subcircuits[i];
    fs::create_directories(o.out / s.name);
    util::write_file_atomic(o.out / s.name / "netlist.v", netlist::emit_verilog(s));
    parts.push_back({{"name", s.name}, {"gates", s.gates.size()}});
  }
  Manifest m{"split", 0};
  m.config = {{"netlist", o.netlist.string()}, {"cell_lib", o.cell_lib.string()}, {"cap", o.cap}};
  m.results = {{"subcircuits", parts}, {"warnings", r.warnings}};
  write_manifest(o.out, m);
}

}  // namespace

void add_data_commands(CLI::App& app, std::vector<Command>& out) {
  {
    auto o = std::make_shared<GenCorpusOpts>();
    auto* c = app.add_subcommand("gen-corpus", "Generate the seeded synthetic corpus (task1/2/3 bundles and gate labels)");
    c->add_option("--seed", o->seed, "Generator seed")->capture_default_str();
    c->add_option("--designs", o->designs, "Number of designs")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--min-width", o->min_width, "Smallest operand width")->capture_default_str()->check(CLI::Range(2, 64));
    c->add_option("--max-width", o->max_width, "Largest operand width (clamped per template)")
        ->capture_default_str()
        ->check(CLI::Range(2, 64));
    c->add_option("--vectors", o->vectors, "Random vectors for testbenches of designs with more than 12 input bits")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c->add_option("--kinds", o->kinds, "Template kinds to cycle through (default: all)")
        ->check(CLI::IsMember(eval::template_kinds()))
        ->delimiter(',');
    c->add_option("--out", o->out, "Output directory")->required();
    out.push_back({c, [o] {
                     if (o->min_width > o->max_width) reject("--min-width exceeds --max-width");
                     o->out = resolve(o->out);
                     gen_corpus(*o);
                   }});
  }
  {
    auto o = std::make_shared<IngestOpts>();
    auto* c = app.add_subcommand("ingest", "Parse netlists, reject loops, write canonical netlist, graph and IO files");
    c->add_option("--netlist", o->netlists, "Structural Verilog file (repeatable)")->required()->check(CLI::ExistingFile);
    c->add_option("--cell-lib", o->cell_lib, "Cell library file (default: built-in)")->check(CLI::ExistingFile);
    c->add_option("--out", o->out, "Output directory")->required();
    c->add_option("--jobs", o->jobs, "Parallel designs")->capture_default_str()->check(CLI::PositiveNumber);
    out.push_back({c, [o] {
                     for (auto& p : o->netlists) p = resolve(p);
                     o->out = resolve(o->out);
                     check_output_separate(o->out, o->netlists);
                     ingest(*o);
                   }});
  }
  {
    auto o = std::make_shared<SplitOpts>();
    auto* c = app.add_subcommand("split", "Partition a netlist into register-bounded subcircuits under a gate cap");
    c->add_option("--netlist", o->netlist, "Structural Verilog file")->required()->check(CLI::ExistingFile);
    c->add_option("--cell-lib", o->cell_lib, "Cell library file (default: built-in)")->check(CLI::ExistingFile);
    c->add_option("--cap", o->cap, "Gate budget per subcircuit")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--out", o->out, "Output directory")->required();
    out.push_back({c, [o] {
                     o->netlist = resolve(o->netlist);
                     o->out = resolve(o->out);
                     check_output_separate(o->out, {o->netlist});
                     split(*o);
                   }});
  }
}

}  // namespace netreason::cli
