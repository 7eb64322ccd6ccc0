#ifndef OPSETS_RGA_HPP
#define OPSETS_RGA_HPP

#include <algorithm>
#include <set>
#include <vector>

#include "opsets/core.hpp"
#include "opsets/listspec.hpp"

namespace opsets {

// The Replicated Growable Array insertion algorithm, consuming operations
// in causal (crdt_ops) delivery order, and the desk-scale equivalence check
// against the sequential list specification.

/// Places e before the first element smaller than it; appends if none.
inline std::vector<OpId> insert_body(std::vector<OpId> xs, const OpId& e) {
  auto it = std::find_if(xs.begin(), xs.end(),
                         [&](const OpId& x) { return x < e; });
  xs.insert(it, e);
  return xs;
}

/// RGA insertion: scan to the reference element, then insert_body into the
/// tail after it. A missing reference leaves the list unchanged.
inline std::vector<OpId> insert_rga(std::vector<OpId> xs, const InsOp& op) {
  if (!op.ref) return insert_body(std::move(xs), op.id);
  auto it = std::find(xs.begin(), xs.end(), *op.ref);
  if (it == xs.end()) return xs;
  // insert_body applied to the suffix after the reference element
  std::vector<OpId> tail(std::next(it), xs.end());
  tail = insert_body(std::move(tail), op.id);
  xs.erase(std::next(it), xs.end());
  xs.insert(xs.end(), tail.begin(), tail.end());
  return xs;
}

inline std::vector<OpId> interp_rga(const std::vector<InsOp>& ops) {
  std::vector<OpId> xs;
  for (const InsOp& op : ops) xs = insert_rga(std::move(xs), op);
  return xs;
}

/// The crdt_ops discipline: distinct IDs, every present ref appears earlier
/// in the sequence with a smaller ID.
inline bool check_crdt_ops(const std::vector<InsOp>& ops) {
  std::set<OpId> seen;
  for (const InsOp& op : ops) {
    if (op.ref && (!seen.count(*op.ref) || !(*op.ref < op.id))) return false;
    if (!seen.insert(op.id).second) return false;
  }
  return true;
}

struct RgaVerdict {
  bool precondition_ok = true;
  bool equal = true;
  std::vector<OpId> rga_result;
  std::vector<OpId> spec_result;
};

/// rga_meets_spec at desk scale: interpreting a causally ordered log with
/// RGA must match the sequential interpretation of its ID-sorted
/// permutation. Returns both sequences on mismatch.
inline RgaVerdict check_rga_equivalence(const std::vector<InsOp>& log) {
  RgaVerdict v;
  if (!check_crdt_ops(log)) {
    v.precondition_ok = false;
    v.equal = false;
    return v;
  }
  std::vector<InsOp> sorted = log;
  std::sort(sorted.begin(), sorted.end(),
            [](const InsOp& a, const InsOp& b) { return a.id < b.id; });
  v.rga_result = interp_rga(log);
  v.spec_result = interp_ins(sorted);
  v.equal = v.rga_result == v.spec_result;
  return v;
}

}  // namespace opsets

#endif  // OPSETS_RGA_HPP
