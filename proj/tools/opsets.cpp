// Command-line driver: interpret, step through, and merge operation logs,
// run the network simulator, and run the randomized property checkers.
//
// Exit codes: 0 success, 1 input error, 2 property violation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opsets/core.hpp"
#include "opsets/datatypes.hpp"
#include "opsets/fuzz.hpp"
#include "opsets/listspec.hpp"
#include "opsets/log_format.hpp"
#include "opsets/opgen.hpp"
#include "opsets/rga.hpp"
#include "opsets/sim.hpp"
#include "opsets/tree.hpp"

namespace {

using opsets::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitViolation = 2;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw opsets::LogFormatError("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw opsets::LogFormatError("cannot open output file: " + path);
  out << bytes;
}

// IDs on the command line are written counter@node, e.g. "7@n1". The
// document root defaults to 0@ (the reserved root ID).
opsets::OpId parse_id_arg(const std::string& s) {
  auto at = s.find('@');
  if (at == std::string::npos)
    throw opsets::LogFormatError("ID must be counter@node: " + s);
  std::uint64_t ctr = 0;
  const std::string num = s.substr(0, at);
  auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), ctr);
  if (ec != std::errc{} || p != num.data() + num.size())
    throw opsets::LogFormatError("bad counter in ID: " + s);
  return opsets::OpId{ctr, s.substr(at + 1)};
}

std::uint64_t default_seed(std::uint64_t fallback) {
  if (const char* env = std::getenv("OPSETS_SEED")) {
    std::uint64_t v = 0;
    std::string s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && p == s.data() + s.size()) return v;
    throw opsets::LogFormatError("OPSETS_SEED must be an unsigned integer");
  }
  return fallback;
}

struct InterpFlags {
  std::string path = "-";
  std::string root = "0@";
  std::string mode = "map";
  std::string reg = "mv";
};

int cmd_interp(const InterpFlags& f) {
  opsets::OpSet ops = opsets::parse_log(read_input(f.path));
  opsets::OpId root = parse_id_arg(f.root);
  opsets::RegisterMode reg = f.reg == "lww" ? opsets::RegisterMode::last_writer_wins
                                            : opsets::RegisterMode::multi_value;
  opsets::DocState doc = f.mode == "tree" ? opsets::interpret_tree(ops, reg)
                                          : opsets::interpret_doc(ops, reg);
  json out = opsets::materialized_to_json(opsets::materialize(doc, root, ops));
  if (f.mode == "tree") {
    opsets::TreeReport rep =
        opsets::check_tree_invariants(doc, opsets::TreeConfig{root, true});
    json viol = json::array();
    for (const std::string& v : rep.violations) viol.push_back(v);
    std::cout << json{{"doc", out}, {"invariantsOk", rep.ok}, {"violations", viol}}.dump()
              << "\n";
    return rep.ok ? kExitOk : kExitViolation;
  }
  std::cout << out.dump() << "\n";
  return kExitOk;
}

int cmd_history(const InterpFlags& f) {
  opsets::OpSet full = opsets::parse_log(read_input(f.path));
  opsets::OpId root = parse_id_arg(f.root);
  opsets::RegisterMode reg = f.reg == "lww" ? opsets::RegisterMode::last_writer_wins
                                            : opsets::RegisterMode::multi_value;
  opsets::OpSet prefix;
  std::size_t step = 0;
  for (const auto& [id, op] : full) {
    prefix = prefix.add(id, op);
    opsets::DocState doc = f.mode == "tree" ? opsets::interpret_tree(prefix, reg)
                                            : opsets::interpret_doc(prefix, reg);
    json doc_json = prefix.contains(root)
                        ? opsets::materialized_to_json(opsets::materialize(doc, root, prefix))
                        : json(nullptr);
    std::cout << json{{"step", step},
                      {"id", opsets::detail::id_to_json(id)},
                      {"doc", doc_json}}
                     .dump()
              << "\n";
    ++step;
  }
  return kExitOk;
}

int cmd_merge(const std::vector<std::string>& inputs, const std::string& out_path) {
  opsets::OpSet merged;
  for (const std::string& path : inputs)
    merged = merged.merged(opsets::parse_log(read_input(path)));
  write_output(out_path, opsets::serialize_log(merged));
  return kExitOk;
}

struct SimFlags {
  std::size_t nodes = 3;
  std::size_t ops = 100;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double loss = 0.0;
  double dup = 0.0;
  std::size_t max_delay = 3;
  std::string workload = "mapEdits";
  std::string partition;  // from:to as step indices, splits nodes in half
  std::string out_path = "-";
};

int cmd_sim(const SimFlags& f) {
  opsets::SimConfig cfg;
  cfg.node_count = f.nodes;
  cfg.op_count = f.ops;
  cfg.seed = f.seed_set ? f.seed : default_seed(0);
  cfg.loss_prob = f.loss;
  cfg.dup_prob = f.dup;
  cfg.max_delay = f.max_delay;
  if (f.workload == "mapEdits")
    cfg.workload = opsets::Workload::map_edits;
  else if (f.workload == "listEdits")
    cfg.workload = opsets::Workload::list_edits;
  else if (f.workload == "treeMoves")
    cfg.workload = opsets::Workload::tree_moves;
  else if (f.workload == "textTyping")
    cfg.workload = opsets::Workload::text_typing;
  else
    throw opsets::LogFormatError("unknown workload: " + f.workload);
  if (!f.partition.empty()) {
    auto colon = f.partition.find(':');
    if (colon == std::string::npos)
      throw opsets::LogFormatError("--partition must be from:to");
    opsets::PartitionWindow w;
    w.from_step = std::stoull(f.partition.substr(0, colon));
    w.to_step = std::stoull(f.partition.substr(colon + 1));
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < cfg.node_count; ++i)
      (i < cfg.node_count / 2 ? a : b).push_back(i);
    w.groups = {a, b};
    cfg.partitions.push_back(w);
  }
  opsets::SimTrace trace = opsets::run_sim(cfg);
  opsets::ConvergenceVerdict v = opsets::check_convergence(trace);
  json out = opsets::trace_to_json(trace);
  out["converged"] = v.ok();
  if (!v.ok()) out["divergence"] = v.detail;
  write_output(f.out_path, out.dump() + "\n");
  return v.ok() ? kExitOk : kExitViolation;
}

struct CheckFlags {
  std::string which;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t trials = 100;
};

int cmd_check(const CheckFlags& f) {
  std::uint64_t seed = f.seed_set ? f.seed : default_seed(1);
  opsets::fuzz::Rng rng(seed);
  std::size_t failures = 0;
  json witnesses = json::array();

  if (f.which == "no-interleaving") {
    for (std::size_t t = 0; t < f.trials; ++t) {
      bool missing = t % 4 == 3;
      auto sc = opsets::fuzz::gen_interleaving_scenario(rng, missing);
      auto res = opsets::check_no_interleaving(sc.ops, sc.xs, sc.ys, sc.start);
      bool ok = res.verdict == opsets::InterleaveVerdict::block_xy ||
                res.verdict == opsets::InterleaveVerdict::block_yx ||
                res.verdict == opsets::InterleaveVerdict::start_missing;
      if (!ok) {
        ++failures;
        witnesses.push_back(json{{"trial", t}, {"detail", res.detail}});
      }
    }
  } else if (f.which == "rga") {
    for (std::size_t t = 0; t < f.trials; ++t) {
      auto log = opsets::fuzz::gen_crdt_log(rng, 50);
      auto v = opsets::check_rga_equivalence(log);
      if (!v.precondition_ok || !v.equal) {
        ++failures;
        witnesses.push_back(json{{"trial", t}});
      }
    }
  } else if (f.which == "astrong") {
    for (std::size_t t = 0; t < f.trials; ++t) {
      auto log = opsets::fuzz::gen_listspec_log(rng, 30);
      opsets::AstrongConfig cfg;
      cfg.seed = seed + t;
      auto rep = opsets::check_astrong(log, cfg);
      if (!rep.ok()) {
        ++failures;
        json w = json{{"trial", t},
                      {"cond1a", rep.cond_1a},
                      {"cond1b", rep.cond_1b},
                      {"cond1c", rep.cond_1c},
                      {"cond2", rep.cond_2}};
        witnesses.push_back(w);
      }
    }
  } else if (f.which == "convergence") {
    for (std::size_t t = 0; t < f.trials; ++t) {
      opsets::SimConfig cfg;
      cfg.node_count = 3 + rng() % 3;
      cfg.op_count = 100;
      cfg.seed = rng();
      cfg.loss_prob = 0.5 * (rng() % 1000) / 1000.0;
      cfg.dup_prob = 0.2 * (rng() % 1000) / 1000.0;
      cfg.workload = static_cast<opsets::Workload>(t % 4);
      std::size_t from = rng() % 50;
      opsets::PartitionWindow w;
      w.from_step = from;
      w.to_step = from + 25;
      std::vector<std::size_t> a, b;
      for (std::size_t i = 0; i < cfg.node_count; ++i)
        (i < cfg.node_count / 2 ? a : b).push_back(i);
      w.groups = {a, b};
      cfg.partitions.push_back(w);
      auto verdict = opsets::check_convergence(opsets::run_sim(cfg));
      if (!verdict.ok()) {
        ++failures;
        witnesses.push_back(json{{"trial", t}, {"detail", verdict.detail}});
      }
    }
  } else {
    throw opsets::LogFormatError("unknown checker: " + f.which);
  }

  json report{{"check", f.which},
              {"seed", seed},
              {"trials", f.trials},
              {"failures", failures},
              {"witnesses", witnesses}};
  std::cout << report.dump() << "\n";
  return failures == 0 ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OpSet-based replicated datatypes: interpret, merge, simulate, check"};
  app.require_subcommand(1);

  InterpFlags interp_flags;
  CLI::App* interp = app.add_subcommand("interp", "Interpret a log and print the document");
  interp->add_option("log", interp_flags.path, "Log file, or - for stdin");
  interp->add_option("--root", interp_flags.root, "Root object ID (counter@node)");
  interp->add_option("--mode", interp_flags.mode, "map | list | tree")
      ->check(CLI::IsMember({"map", "list", "tree"}));
  interp->add_option("--register", interp_flags.reg, "mv | lww")
      ->check(CLI::IsMember({"mv", "lww"}));

  InterpFlags history_flags;
  CLI::App* history =
      app.add_subcommand("history", "Print one document snapshot per log prefix");
  history->add_option("log", history_flags.path, "Log file, or - for stdin");
  history->add_option("--root", history_flags.root, "Root object ID (counter@node)");
  history->add_option("--mode", history_flags.mode, "map | list | tree")
      ->check(CLI::IsMember({"map", "list", "tree"}));
  history->add_option("--register", history_flags.reg, "mv | lww")
      ->check(CLI::IsMember({"mv", "lww"}));

  std::vector<std::string> merge_inputs;
  std::string merge_out = "-";
  CLI::App* merge = app.add_subcommand("merge", "Write the canonical union of N logs");
  merge->add_option("logs", merge_inputs, "Log files, or - for stdin")->required();
  merge->add_option("-o,--output", merge_out, "Output path, or - for stdout");

  SimFlags sim_flags;
  CLI::App* sim = app.add_subcommand("sim", "Run the deterministic network simulator");
  sim->add_option("--nodes", sim_flags.nodes, "Node count");
  sim->add_option("--ops", sim_flags.ops, "Edit steps");
  sim->add_option("--seed", sim_flags.seed, "RNG seed")
      ->each([&](const std::string&) { sim_flags.seed_set = true; });
  sim->add_option("--loss", sim_flags.loss, "Message loss probability");
  sim->add_option("--dup", sim_flags.dup, "Message duplication probability");
  sim->add_option("--max-delay", sim_flags.max_delay, "Maximum delivery delay in steps");
  sim->add_option("--workload", sim_flags.workload,
                  "mapEdits | listEdits | treeMoves | textTyping")
      ->check(CLI::IsMember({"mapEdits", "listEdits", "treeMoves", "textTyping"}));
  sim->add_option("--partition", sim_flags.partition, "Partition window from:to");
  sim->add_option("-o,--output", sim_flags.out_path, "Trace output path, or - for stdout");

  CheckFlags check_flags;
  CLI::App* check = app.add_subcommand("check", "Run a randomized property checker");
  check->add_option("which", check_flags.which,
                    "no-interleaving | astrong | rga | convergence")
      ->required()
      ->check(CLI::IsMember({"no-interleaving", "astrong", "rga", "convergence"}));
  check->add_option("--seed", check_flags.seed, "RNG seed")
      ->each([&](const std::string&) { check_flags.seed_set = true; });
  check->add_option("--trials", check_flags.trials, "Trial count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (interp->parsed()) return cmd_interp(interp_flags);
    if (history->parsed()) return cmd_history(history_flags);
    if (merge->parsed()) return cmd_merge(merge_inputs, merge_out);
    if (sim->parsed()) return cmd_sim(sim_flags);
    if (check->parsed()) return cmd_check(check_flags);
  } catch (const opsets::LogFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const opsets::OpSetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
