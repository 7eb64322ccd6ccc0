#ifndef OPSETS_SIM_HPP
#define OPSETS_SIM_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "opsets/core.hpp"
#include "opsets/datatypes.hpp"
#include "opsets/opgen.hpp"
#include "opsets/tree.hpp"

namespace opsets {

// Deterministic multi-node simulator. Each step one node generates an edit
// and broadcasts the new operations; the network may lose, duplicate, delay,
// or partition the messages. A final anti-entropy phase exchanges full
// OpSets pairwise until fixpoint, modelling retransmission, after which all
// nodes must converge.

enum class Workload { map_edits, list_edits, tree_moves, text_typing };

struct PartitionWindow {
  std::size_t from_step = 0;
  std::size_t to_step = 0;
  // Node groups; nodes in different groups cannot exchange messages while
  // the window is active. Nodes not listed form an implicit extra group.
  std::vector<std::vector<std::size_t>> groups;
};

struct SimConfig {
  std::size_t node_count = 3;
  std::size_t op_count = 100;
  std::uint64_t seed = 0;
  double loss_prob = 0.0;
  double dup_prob = 0.0;
  std::size_t max_delay = 3;
  std::vector<PartitionWindow> partitions;
  Workload workload = Workload::map_edits;
};

struct SimEvent {
  std::size_t step = 0;
  std::size_t node = 0;
  std::string kind;  // generate | send | drop | duplicate | deliver | merge
  std::string detail;

  bool operator==(const SimEvent&) const = default;
};

struct SimTrace {
  SimConfig config;
  std::vector<SimEvent> events;
  std::vector<OpSet> final_opsets;
  std::vector<MaterializedValue> final_docs;
};

struct ConvergenceVerdict {
  bool converged = true;
  bool tree_invariants_ok = true;
  std::string detail;

  bool ok() const { return converged && tree_invariants_ok; }
};

namespace detail {

inline std::string sim_node_name(std::size_t i) { return "n" + std::to_string(i); }

inline bool partitioned(const SimConfig& cfg, std::size_t step, std::size_t a,
                        std::size_t b) {
  for (const PartitionWindow& w : cfg.partitions) {
    if (step < w.from_step || step >= w.to_step) continue;
    auto group_of = [&](std::size_t n) -> std::ptrdiff_t {
      for (std::size_t g = 0; g < w.groups.size(); ++g)
        if (std::find(w.groups[g].begin(), w.groups[g].end(), n) != w.groups[g].end())
          return static_cast<std::ptrdiff_t>(g);
      return -1;
    };
    if (group_of(a) != group_of(b)) return true;
  }
  return false;
}

/// One node's editing behaviour. The cursor supports the typing workload:
/// each node keeps inserting right after its previously typed character,
/// reproducing contiguous-run text entry.
struct NodeCtx {
  OpSet ops;
  std::optional<OpId> last_typed;
};

inline OpSet generate_edit(NodeCtx& ctx, std::size_t node_idx, const SimConfig& cfg,
                           std::mt19937_64& rng) {
  const std::string node = sim_node_name(node_idx);
  const OpId root = tree_root_id();
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  static const std::vector<MapKey> key_pool = {MapKey{"k0"}, MapKey{"k1"},
                                               MapKey{"k2"}, MapKey{"k3"}};

  switch (cfg.workload) {
    case Workload::map_edits: {
      const MapKey& key = key_pool[pick(key_pool.size())];
      if (pick(5) == 0)
        return remove_map_key(ctx.ops, node, root, key);
      PrimitiveValue val{static_cast<std::int64_t>(rng() % 1000)};
      return set_map_key(ctx.ops, node, root, key, ValueSpec{val});
    }
    case Workload::list_edits: {
      DocState d = interpret_doc(ctx.ops);
      std::size_t len = visible_list_elements(d, root).size();
      std::size_t action = pick(4);
      PrimitiveValue val{static_cast<std::int64_t>(rng() % 1000)};
      if (action == 0 && len > 0)
        return remove_list_index(ctx.ops, node, root, pick(len));
      if (action == 1 && len > 0)
        return set_list_index(ctx.ops, node, root, pick(len), ValueSpec{val});
      return ins_list_index(ctx.ops, node, root, pick(len + 1), ValueSpec{val});
    }
    case Workload::tree_moves: {
      // Objects of the tree: root plus every MakeMap created so far.
      std::vector<OpId> objects{root};
      for (const auto& [id, op] : ctx.ops)
        if (std::holds_alternative<MakeMap>(op.action) && !(id == root))
          objects.push_back(id);
      const MapKey& key = key_pool[pick(key_pool.size())];
      if (objects.size() < 3 || pick(3) == 0) {
        // grow: new map under a random object
        OpId parent = objects[pick(objects.size())];
        return set_map_key(ctx.ops, node, parent, key, ValueSpec{EmptyMapLiteral{}},
                           DocMode::tree);
      }
      // move: reparent a random non-root object under another object
      OpId moved = objects[1 + pick(objects.size() - 1)];
      OpId dest = objects[pick(objects.size())];
      if (dest == moved) dest = root;
      return set_map_key(ctx.ops, node, dest, key, ValueSpec::existing(moved),
                         DocMode::tree);
    }
    case Workload::text_typing: {
      DocState d = interpret_doc(ctx.ops);
      std::vector<OpId> visible = visible_list_elements(d, root);
      std::size_t at = pick(visible.size() + 1);
      if (ctx.last_typed) {
        auto it = std::find(visible.begin(), visible.end(), *ctx.last_typed);
        if (it != visible.end())
          at = static_cast<std::size_t>(it - visible.begin()) + 1;
      }
      // each node types its own letter so runs are recognisable
      std::string letter(1, static_cast<char>('a' + node_idx % 26));
      OpSet out = ins_list_index(ctx.ops, node, root, at, ValueSpec{PrimitiveValue{letter}});
      // the InsertAfter carries the second-highest new counter
      for (const auto& [id, op] : out)
        if (std::holds_alternative<InsertAfter>(op.action) && !ctx.ops.contains(id))
          ctx.last_typed = id;
      return out;
    }
  }
  return ctx.ops;
}

}  // namespace detail

inline SimTrace run_sim(const SimConfig& cfg) {
  if (cfg.node_count == 0 || cfg.op_count == 0)
    throw OpSetError("run_sim: node_count and op_count must be positive");
  if (cfg.loss_prob < 0 || cfg.loss_prob > 1 || cfg.dup_prob < 0 || cfg.dup_prob > 1)
    throw OpSetError("run_sim: probabilities must be within [0, 1]");

  SimTrace trace;
  trace.config = cfg;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const OpId root = tree_root_id();
  const bool root_is_map = cfg.workload == Workload::map_edits ||
                           cfg.workload == Workload::tree_moves;
  Operation root_op;
  root_op.action = root_is_map ? decltype(root_op.action){MakeMap{}}
                               : decltype(root_op.action){MakeList{}};

  std::vector<detail::NodeCtx> nodes(cfg.node_count);
  for (auto& n : nodes) n.ops = OpSet{}.add(root, root_op);

  struct Message {
    std::size_t deliver_step;
    std::size_t from, to;
    std::vector<OpSet::Entry> payload;
  };
  std::vector<Message> in_flight;

  auto log = [&](std::size_t step, std::size_t node, const char* kind,
                 std::string detail = "") {
    trace.events.push_back(SimEvent{step, node, kind, std::move(detail)});
  };

  for (std::size_t step = 0; step < cfg.op_count; ++step) {
    // deliver messages due at this step, in stable order
    std::vector<Message> still;
    for (Message& m : in_flight) {
      if (m.deliver_step > step) {
        still.push_back(std::move(m));
        continue;
      }
      OpSet merged = nodes[m.to].ops;
      for (const auto& [id, op] : m.payload) merged = merged.add(id, op);
      nodes[m.to].ops = std::move(merged);
      log(step, m.to, "deliver", "from " + detail::sim_node_name(m.from));
    }
    in_flight = std::move(still);

    // one node generates an edit and broadcasts the delta
    std::size_t editor = static_cast<std::size_t>(rng() % cfg.node_count);
    OpSet before = nodes[editor].ops;
    OpSet after = detail::generate_edit(nodes[editor], editor, cfg, rng);
    std::vector<OpSet::Entry> delta;
    for (const auto& entry : after)
      if (!before.contains(entry.first)) delta.push_back(entry);
    nodes[editor].ops = after;
    log(step, editor, "generate", std::to_string(delta.size()) + " ops");

    for (std::size_t to = 0; to < cfg.node_count; ++to) {
      if (to == editor) continue;
      if (detail::partitioned(cfg, step, editor, to)) {
        log(step, editor, "drop", "partitioned from " + detail::sim_node_name(to));
        continue;
      }
      if (coin(rng) < cfg.loss_prob) {
        log(step, editor, "drop", "lost to " + detail::sim_node_name(to));
        continue;
      }
      std::size_t copies = coin(rng) < cfg.dup_prob ? 2 : 1;
      for (std::size_t c = 0; c < copies; ++c) {
        std::size_t delay = cfg.max_delay == 0
                                ? 1
                                : 1 + static_cast<std::size_t>(rng() % (cfg.max_delay + 1));
        in_flight.push_back(Message{step + delay, editor, to, delta});
        log(step, editor, c == 0 ? "send" : "duplicate",
            "to " + detail::sim_node_name(to));
      }
    }
  }

  // anti-entropy: pairwise full OpSet exchange until fixpoint
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < cfg.node_count; ++a)
      for (std::size_t b = a + 1; b < cfg.node_count; ++b) {
        OpSet merged = nodes[a].ops.merged(nodes[b].ops);
        if (!(merged == nodes[a].ops) || !(merged == nodes[b].ops)) {
          nodes[a].ops = merged;
          nodes[b].ops = merged;
          changed = true;
          log(cfg.op_count, a, "merge", "with " + detail::sim_node_name(b));
        }
      }
  }

  for (const auto& n : nodes) {
    DocState d = cfg.workload == Workload::tree_moves ? interpret_tree(n.ops)
                                                      : interpret_doc(n.ops);
    trace.final_opsets.push_back(n.ops);
    trace.final_docs.push_back(materialize(d, root, n.ops));
  }
  return trace;
}

/// Final OpSets and documents must be pairwise equal; tree workloads must
/// additionally satisfy the tree invariants at every node.
inline ConvergenceVerdict check_convergence(const SimTrace& trace) {
  ConvergenceVerdict v;
  for (std::size_t i = 1; i < trace.final_opsets.size(); ++i) {
    if (!(trace.final_opsets[i] == trace.final_opsets[0])) {
      v.converged = false;
      v.detail = "OpSets differ between n0 and n" + std::to_string(i);
      return v;
    }
    if (!(trace.final_docs[i] == trace.final_docs[0])) {
      v.converged = false;
      v.detail = "documents differ between n0 and n" + std::to_string(i);
      return v;
    }
  }
  if (trace.config.workload == Workload::tree_moves) {
    for (std::size_t i = 0; i < trace.final_opsets.size(); ++i) {
      TreeReport rep =
          check_tree_invariants(interpret_tree(trace.final_opsets[i]), TreeConfig{});
      if (!rep.ok) {
        v.tree_invariants_ok = false;
        v.detail = "tree invariant violated at n" + std::to_string(i) + ": " +
                   rep.violations.front();
        return v;
      }
    }
  }
  return v;
}

}  // namespace opsets

#endif  // OPSETS_SIM_HPP
