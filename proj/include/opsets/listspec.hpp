#ifndef OPSETS_LISTSPEC_HPP
#define OPSETS_LISTSPEC_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "opsets/core.hpp"

namespace opsets {

// The list-only specification machinery: the two equivalent insertion
// interpretations, insertion sequences and the no-interleaving checker, and
// the strong-list-specification condition checkers over the Insert/Delete
// mini-language.

/// An insertion operation: absent ref means insert at the head.
struct InsOp {
  OpId id;
  std::optional<OpId> ref;

  bool operator==(const InsOp&) const = default;
};

// ---------------------------------------------------------------------------
// insert_spec / interp_ins and the relational formulation
// ---------------------------------------------------------------------------

inline std::vector<OpId> insert_spec(std::vector<OpId> xs, const InsOp& op) {
  if (!op.ref) {
    xs.insert(xs.begin(), op.id);
    return xs;
  }
  auto it = std::find(xs.begin(), xs.end(), *op.ref);
  if (it == xs.end()) return xs;  // missing ref: no effect
  xs.insert(std::next(it), op.id);
  return xs;
}

inline std::vector<OpId> interp_ins(const std::vector<InsOp>& ops) {
  std::vector<OpId> xs;
  for (const InsOp& op : ops) xs = insert_spec(std::move(xs), op);
  return xs;
}

using SuccRel = std::set<std::pair<OpId, std::optional<OpId>>>;

inline SuccRel succ_rel(const std::vector<OpId>& xs) {
  SuccRel rel;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) rel.emplace(xs[i], xs[i + 1]);
  if (!xs.empty()) rel.emplace(xs.back(), std::nullopt);
  return rel;
}

inline SuccRel insert_alt(SuccRel rel, const OpId& id, const OpId& ref) {
  auto it = std::find_if(rel.begin(), rel.end(),
                         [&](const auto& p) { return p.first == ref; });
  if (it == rel.end()) return rel;
  std::optional<OpId> next = it->second;
  rel.erase(it);
  rel.emplace(ref, id);
  rel.emplace(id, next);
  return rel;
}

/// Fold of insert_alt from {(head, none)}, with head-insertions rewritten to
/// reference the distinguished head element.
inline SuccRel interp_alt(const OpId& head, const std::vector<InsOp>& ops) {
  SuccRel rel{{head, std::nullopt}};
  for (const InsOp& op : ops)
    rel = insert_alt(std::move(rel), op.id, op.ref ? *op.ref : head);
  return rel;
}

/// The spec_ops discipline for insertion logs: sorted ascending by ID,
/// distinct, every present ref strictly below its operation's ID.
inline bool check_insert_ops(const std::vector<InsOp>& ops) {
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i > 0 && !(ops[i - 1].id < ops[i].id)) return false;
    if (ops[i].ref && !(*ops[i].ref < ops[i].id)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Insertion sequences and no-interleaving
// ---------------------------------------------------------------------------

/// True iff ops is a non-empty run of insertions where the first references
/// `start` and each later one references its predecessor's ID.
inline bool is_insert_seq(const std::optional<OpId>& start,
                          const std::vector<InsOp>& ops) {
  if (ops.empty()) return false;
  if (ops.front().ref != start) return false;
  for (std::size_t i = 1; i < ops.size(); ++i)
    if (ops[i].ref != std::optional<OpId>{ops[i - 1].id}) return false;
  return true;
}

enum class InterleaveVerdict {
  block_xy,       // all xs precede all ys
  block_yx,       // all ys precede all xs
  start_missing,  // start absent, no xs/ys insertion took effect
  violation,      // interleaved (unreachable for insert_spec)
  precondition_failed,
};

struct InterleaveResult {
  InterleaveVerdict verdict;
  std::string detail;
};

/// Block classification of a claimed list order: do all xs IDs precede all
/// ys IDs (or vice versa)? Anything else is an interleaving violation.
inline InterleaveVerdict classify_block_order(const std::vector<OpId>& order,
                                              const std::vector<OpId>& xs_ids,
                                              const std::vector<OpId>& ys_ids) {
  std::map<OpId, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos.emplace(order[i], i);
  bool xy = true, yx = true;
  for (const OpId& x : xs_ids)
    for (const OpId& y : ys_ids) {
      auto px = pos.find(x), py = pos.find(y);
      if (px == pos.end() || py == pos.end()) return InterleaveVerdict::violation;
      (px->second < py->second ? yx : xy) = false;
    }
  if (xy) return InterleaveVerdict::block_xy;
  if (yx) return InterleaveVerdict::block_yx;
  return InterleaveVerdict::violation;
}

/// Checks the no-interleaving theorem on one log: two insertion sequences
/// xs, ys from the same start must land as contiguous blocks, or, if the
/// start element was never inserted, must not take effect at all.
inline InterleaveResult check_no_interleaving(const std::vector<InsOp>& ops,
                                              const std::vector<InsOp>& xs,
                                              const std::vector<InsOp>& ys,
                                              const std::optional<OpId>& start) {
  auto fail = [](std::string d) {
    return InterleaveResult{InterleaveVerdict::precondition_failed, std::move(d)};
  };
  if (!check_insert_ops(ops)) return fail("ops is not a valid insert-ops log");
  if (!check_insert_ops(xs) || !is_insert_seq(start, xs))
    return fail("xs is not an insert_seq from start");
  if (!check_insert_ops(ys) || !is_insert_seq(start, ys))
    return fail("ys is not an insert_seq from start");
  std::set<OpId> ops_ids, seq_ids;
  for (const InsOp& op : ops) ops_ids.insert(op.id);
  for (const InsOp& op : xs)
    if (!ops_ids.count(op.id) || !seq_ids.insert(op.id).second)
      return fail("xs not embedded in ops with distinct IDs");
  for (const InsOp& op : ys)
    if (!ops_ids.count(op.id) || !seq_ids.insert(op.id).second)
      return fail("ys not embedded in ops with distinct IDs");

  std::vector<OpId> order = interp_ins(ops);
  std::set<OpId> present(order.begin(), order.end());

  if (start && !present.count(*start)) {
    for (const InsOp& op : xs)
      if (present.count(op.id))
        return {InterleaveVerdict::violation, "xs ID present despite missing start"};
    for (const InsOp& op : ys)
      if (present.count(op.id))
        return {InterleaveVerdict::violation, "ys ID present despite missing start"};
    return {InterleaveVerdict::start_missing, ""};
  }

  std::vector<OpId> xs_ids, ys_ids;
  for (const InsOp& op : xs) xs_ids.push_back(op.id);
  for (const InsOp& op : ys) ys_ids.push_back(op.id);
  auto verdict = classify_block_order(order, xs_ids, ys_ids);
  return {verdict, verdict == InterleaveVerdict::violation ? "sequences interleaved" : ""};
}

// ---------------------------------------------------------------------------
// The Insert/Delete mini-language and the strong-list conditions
// ---------------------------------------------------------------------------

struct ListInsert {
  std::optional<OpId> ref;
  PrimitiveValue val;
  bool operator==(const ListInsert&) const = default;
};
struct ListDelete {
  OpId ref;
  bool operator==(const ListDelete&) const = default;
};
using ListOp = std::variant<ListInsert, ListDelete>;

struct ListState {
  std::vector<OpId> order;
  std::map<OpId, PrimitiveValue> vals;
};

using ListLog = std::vector<std::pair<OpId, ListOp>>;

inline ListState interp_ops(const ListLog& ops) {
  ListState s;
  for (const auto& [id, op] : ops) {
    if (auto* ins = std::get_if<ListInsert>(&op)) {
      s.order = insert_spec(std::move(s.order), InsOp{id, ins->ref});
      s.vals[id] = ins->val;
    } else {
      s.vals.erase(std::get<ListDelete>(op).ref);
    }
  }
  return s;
}

/// True iff x appears before y in the interpreted order.
inline bool list_order(const ListLog& ops, const OpId& x, const OpId& y) {
  std::vector<OpId> order = interp_ops(ops).order;
  auto px = std::find(order.begin(), order.end(), x);
  auto py = std::find(order.begin(), order.end(), y);
  return px != order.end() && py != order.end() && px < py;
}

/// Insertion at index k, clamped: k = 0 (or an empty list) inserts at the
/// head, otherwise after the element at index min(k-1, length-1).
inline ListOp make_insert(const std::vector<OpId>& order, PrimitiveValue val,
                          std::uint64_t k) {
  if (k == 0 || order.empty()) return ListInsert{std::nullopt, std::move(val)};
  std::size_t i = std::min<std::size_t>(k - 1, order.size() - 1);
  return ListInsert{order[i], std::move(val)};
}

/// The sortedness discipline for Insert/Delete logs.
inline bool check_list_ops(const ListLog& ops) {
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i > 0 && !(ops[i - 1].first < ops[i].first)) return false;
    const OpId& id = ops[i].first;
    if (auto* ins = std::get_if<ListInsert>(&ops[i].second)) {
      if (ins->ref && !(*ins->ref < id)) return false;
    } else if (!(std::get<ListDelete>(ops[i].second).ref < id)) {
      return false;
    }
  }
  return true;
}

/// A log plus, for each Insert generated through make_insert, the index it
/// was aimed at (needed to check the insert-position condition).
struct ListSpecLog {
  ListLog ops;
  std::vector<std::optional<std::uint64_t>> insert_index;
};

struct AstrongConfig {
  std::size_t subset_samples = 200;
  std::size_t exhaustive_max = 12;  // exhaustive subset check below this size
  std::uint64_t seed = 1;
};

struct AstrongReport {
  bool cond_1a = true;  // contents = inserted minus deleted
  bool cond_1b = true;  // subset order consistent with full order
  bool cond_1c = true;  // elements inserted at the specified position
  bool cond_2 = true;   // list order transitive, irreflexive, total
  std::vector<std::string> witnesses;

  bool ok() const { return cond_1a && cond_1b && cond_1c && cond_2; }
};

namespace detail {

inline ListLog subset_by_mask(const ListLog& ops, std::uint64_t mask) {
  ListLog out;
  for (std::size_t i = 0; i < ops.size(); ++i)
    if (mask & (std::uint64_t{1} << i)) out.push_back(ops[i]);
  return out;
}

inline bool order_consistent(const std::vector<OpId>& sub,
                             const std::vector<OpId>& full) {
  std::map<OpId, std::size_t> pos;
  for (std::size_t i = 0; i < full.size(); ++i) pos.emplace(full[i], i);
  for (std::size_t i = 0; i + 1 < sub.size(); ++i) {
    auto a = pos.find(sub[i]), b = pos.find(sub[i + 1]);
    if (a == pos.end() || b == pos.end() || a->second >= b->second) return false;
  }
  return true;
}

}  // namespace detail

/// Desk-scale check of the four strong-list-specification conditions.
inline AstrongReport check_astrong(const ListSpecLog& log,
                                   const AstrongConfig& cfg = {}) {
  AstrongReport rep;
  const ListLog& ops = log.ops;
  if (!check_list_ops(ops)) {
    rep.cond_1a = rep.cond_1b = rep.cond_1c = rep.cond_2 = false;
    rep.witnesses.push_back("log violates the list-ops discipline");
    return rep;
  }
  ListState final_state = interp_ops(ops);

  // 1a: vals domain is exactly {inserted} minus {deleted}.
  std::set<OpId> inserted, deleted;
  for (const auto& [id, op] : ops) {
    if (std::holds_alternative<ListInsert>(op)) inserted.insert(id);
    else deleted.insert(std::get<ListDelete>(op).ref);
  }
  std::set<OpId> expected;
  std::set_difference(inserted.begin(), inserted.end(), deleted.begin(),
                      deleted.end(), std::inserter(expected, expected.end()));
  std::set<OpId> actual;
  for (const auto& [id, _] : final_state.vals) actual.insert(id);
  if (actual != expected) {
    rep.cond_1a = false;
    rep.witnesses.push_back("1a: vals domain differs from inserted minus deleted");
  }

  // 1b: for subsets of the log, relative order of pairs matches the full log.
  auto check_subset = [&](const ListLog& sub) {
    if (!detail::order_consistent(interp_ops(sub).order, final_state.order)) {
      rep.cond_1b = false;
      rep.witnesses.push_back("1b: subset order inconsistent with full order");
      return false;
    }
    return true;
  };
  if (ops.size() < cfg.exhaustive_max && ops.size() < 63) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ops.size()); ++mask)
      if (!check_subset(detail::subset_by_mask(ops, mask))) break;
  } else {
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t trial = 0; trial < cfg.subset_samples; ++trial) {
      ListLog sub;
      for (const auto& entry : ops)
        if (rng() & 1) sub.push_back(entry);
      if (!check_subset(sub)) break;
    }
  }

  // 1c: each make_insert-generated Insert landed at min(k, n-1).
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i >= log.insert_index.size() || !log.insert_index[i]) continue;
    std::uint64_t k = *log.insert_index[i];
    ListLog prefix(ops.begin(), ops.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    std::vector<OpId> order = interp_ops(prefix).order;
    std::size_t at = std::min<std::size_t>(k, order.size() - 1);
    if (order.empty() || order[at] != ops[i].first) {
      rep.cond_1c = false;
      rep.witnesses.push_back("1c: insert " + id_str(ops[i].first) +
                              " not at index " + std::to_string(at));
    }
  }

  // 2: the before-relation on the final order must be transitive,
  // irreflexive, and total over present elements. Duplicate-free order
  // gives a strict total positional order; verify the list_order predicate
  // agrees on sampled pairs and triples.
  const std::vector<OpId>& order = final_state.order;
  std::set<OpId> distinct(order.begin(), order.end());
  if (distinct.size() != order.size()) {
    rep.cond_2 = false;
    rep.witnesses.push_back("2: duplicate element in list order");
  }
  std::mt19937_64 rng2(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  std::size_t pair_samples = std::min<std::size_t>(64, order.size() * order.size());
  for (std::size_t t = 0; t < pair_samples && order.size() >= 2; ++t) {
    const OpId& x = order[rng2() % order.size()];
    const OpId& y = order[rng2() % order.size()];
    const OpId& z = order[rng2() % order.size()];
    if (list_order(ops, x, x)) {
      rep.cond_2 = false;
      rep.witnesses.push_back("2: order not irreflexive at " + id_str(x));
    }
    if (!(x == y) && list_order(ops, x, y) == list_order(ops, y, x)) {
      rep.cond_2 = false;
      rep.witnesses.push_back("2: order not total/antisymmetric");
    }
    if (list_order(ops, x, y) && list_order(ops, y, z) && !list_order(ops, x, z)) {
      rep.cond_2 = false;
      rep.witnesses.push_back("2: order not transitive");
    }
  }
  return rep;
}

}  // namespace opsets

#endif  // OPSETS_LISTSPEC_HPP
