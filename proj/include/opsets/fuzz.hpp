#ifndef OPSETS_FUZZ_HPP
#define OPSETS_FUZZ_HPP

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "opsets/core.hpp"
#include "opsets/listspec.hpp"
#include "opsets/rga.hpp"

namespace opsets::fuzz {

// Seeded random log generators for the property checkers. All generators
// are deterministic functions of the RNG state.

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

/// Random insert-ops log: IDs 1..n ascending on a single node, each ref
/// either absent (head insert) or a uniformly chosen earlier ID.
inline std::vector<InsOp> gen_insert_ops_log(Rng& rng, std::size_t max_ops,
                                             const std::string& node = "f") {
  std::size_t n = 1 + pick(rng, max_ops);
  std::vector<InsOp> ops;
  for (std::size_t i = 1; i <= n; ++i) {
    std::optional<OpId> ref;
    if (i > 1 && pick(rng, 4) != 0)
      ref = OpId{1 + pick(rng, i - 1), node};
    ops.push_back(InsOp{OpId{i, node}, ref});
  }
  return ops;
}

/// Random causally ordered (crdt_ops) permutation of a valid insert-ops
/// log: repeatedly emit a random not-yet-emitted op whose ref was emitted.
inline std::vector<InsOp> gen_crdt_log(Rng& rng, std::size_t max_ops) {
  std::vector<InsOp> sorted = gen_insert_ops_log(rng, max_ops);
  std::vector<InsOp> out;
  std::vector<bool> emitted(sorted.size(), false);
  std::set<OpId> emitted_ids;
  while (out.size() < sorted.size()) {
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (!emitted[i] && (!sorted[i].ref || emitted_ids.count(*sorted[i].ref)))
        ready.push_back(i);
    std::size_t i = ready[pick(rng, ready.size())];
    emitted[i] = true;
    emitted_ids.insert(sorted[i].id);
    out.push_back(sorted[i]);
  }
  return out;
}

struct InterleavingScenario {
  std::vector<InsOp> ops;  // full log, sorted by ID
  std::vector<InsOp> xs;
  std::vector<InsOp> ys;
  std::optional<OpId> start;
};

/// Random valid log embedding two insertion sequences at a shared start.
/// With `missing_start`, the start references an ID that is never inserted.
inline InterleavingScenario gen_interleaving_scenario(Rng& rng,
                                                      bool missing_start,
                                                      std::size_t max_filler = 10,
                                                      std::size_t max_seq = 6) {
  InterleavingScenario sc;
  const std::string node_a = "a", node_b = "b";
  std::uint64_t next_ctr = 1;

  if (missing_start) {
    // Reserve counter 1 for the absent start; it is referenced but never
    // appears as an operation ID.
    sc.start = OpId{next_ctr++, "zz"};
  } else if (pick(rng, 4) == 0) {
    sc.start = std::nullopt;  // typing at the head of the document
  } else {
    InsOp anchor{OpId{next_ctr++, node_a}, std::nullopt};
    sc.ops.push_back(anchor);
    sc.start = anchor.id;
  }

  std::size_t xs_len = 1 + pick(rng, max_seq);
  std::size_t ys_len = 1 + pick(rng, max_seq);
  std::size_t filler = pick(rng, max_filler + 1);

  // Interleave the generation order of the two sequences and filler ops;
  // IDs are handed out in that order, so each sequence's IDs ascend and
  // each ref precedes its op.
  std::vector<int> kinds;
  kinds.insert(kinds.end(), xs_len, 0);
  kinds.insert(kinds.end(), ys_len, 1);
  kinds.insert(kinds.end(), filler, 2);
  std::shuffle(kinds.begin(), kinds.end(), rng);

  std::vector<OpId> other_ids;
  for (const InsOp& op : sc.ops) other_ids.push_back(op.id);

  for (int kind : kinds) {
    if (kind == 0) {
      std::optional<OpId> ref = sc.xs.empty() ? sc.start : std::optional<OpId>{sc.xs.back().id};
      sc.xs.push_back(InsOp{OpId{next_ctr++, node_a}, ref});
    } else if (kind == 1) {
      std::optional<OpId> ref = sc.ys.empty() ? sc.start : std::optional<OpId>{sc.ys.back().id};
      sc.ys.push_back(InsOp{OpId{next_ctr++, node_b}, ref});
    } else {
      std::optional<OpId> ref;
      if (!other_ids.empty() && pick(rng, 3) != 0)
        ref = other_ids[pick(rng, other_ids.size())];
      InsOp op{OpId{next_ctr++, node_a}, ref};
      other_ids.push_back(op.id);
      sc.ops.push_back(op);
    }
  }
  sc.ops.insert(sc.ops.end(), sc.xs.begin(), sc.xs.end());
  sc.ops.insert(sc.ops.end(), sc.ys.begin(), sc.ys.end());
  std::sort(sc.ops.begin(), sc.ops.end(),
            [](const InsOp& a, const InsOp& b) { return a.id < b.id; });
  return sc;
}

/// Random Insert/Delete log produced through make_insert, with the target
/// index recorded for each insertion.
inline ListSpecLog gen_listspec_log(Rng& rng, std::size_t max_ops,
                                    const std::string& node = "f") {
  ListSpecLog log;
  std::size_t n = 1 + pick(rng, max_ops);
  std::vector<OpId> inserted;
  for (std::size_t i = 1; i <= n; ++i) {
    OpId id{i, node};
    std::vector<OpId> order = interp_ops(log.ops).order;
    bool do_delete = !inserted.empty() && pick(rng, 4) == 0;
    if (do_delete) {
      log.ops.emplace_back(id, ListDelete{inserted[pick(rng, inserted.size())]});
      log.insert_index.push_back(std::nullopt);
    } else {
      std::uint64_t k = pick(rng, order.size() + 2);  // may exceed length
      PrimitiveValue val{static_cast<std::int64_t>(i)};
      log.ops.emplace_back(id, make_insert(order, val, k));
      log.insert_index.push_back(k);
      inserted.push_back(id);
    }
  }
  return log;
}

}  // namespace opsets::fuzz

#endif  // OPSETS_FUZZ_HPP
