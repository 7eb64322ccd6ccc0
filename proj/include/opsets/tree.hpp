#ifndef OPSETS_TREE_HPP
#define OPSETS_TREE_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "opsets/core.hpp"
#include "opsets/datatypes.hpp"

namespace opsets {

/// The reserved root ID: counter 0, empty node. Generated IDs start at
/// counter 1 with non-empty nodes, so this is below all of them.
inline OpId tree_root_id() { return OpId{0, ""}; }

struct TreeConfig {
  OpId root = tree_root_id();
  bool root_is_map = true;
};

/// (ancestor, descendant) pairs: transitive closure of "x holds a value
/// referencing y", computed from the element relation.
using AncestorRelation = std::set<std::pair<OpId, OpId>>;

inline AncestorRelation ancestor(const std::set<ElemTuple>& elems) {
  AncestorRelation one_step;
  for (const ElemTuple& t : elems) one_step.emplace(t.obj, t.val);

  AncestorRelation closure = one_step;
  bool grew = true;
  while (grew) {
    grew = false;
    AncestorRelation added;
    for (const auto& [x, y] : closure)
      for (const auto& [y2, z] : one_step)
        if (y == y2 && !closure.count({x, z})) added.emplace(x, z);
    if (!added.empty()) {
      closure.insert(added.begin(), added.end());
      grew = true;
    }
  }
  return closure;
}

namespace detail {

inline DocState apply_assign_tree(DocState s, const OpId& id, const Assign& a) {
  // Cycle guard: no effect if val is already an ancestor of obj, or if the
  // assignment would parent an object to itself.
  if (a.val == a.obj) return s;
  if (ancestor(s.elems).count({a.val, a.obj})) return s;

  std::set<ElemTuple> kept;
  for (const ElemTuple& t : s.elems)
    if (a.prev.count(t.id) == 0 && t.val != a.val) kept.insert(t);
  kept.insert(ElemTuple{id, a.obj, a.key, a.val});
  s.elems = std::move(kept);
  return s;
}

}  // namespace detail

/// Tree-mode interpretation step: identical to apply_op except for Assign,
/// which is cycle-guarded and enforces single parentage (atomic move).
inline DocState apply_op_tree(DocState s, const OpId& id, const Operation& op) {
  return detail::apply_op_with(std::move(s), id, op, detail::apply_assign_tree);
}

inline DocState interpret_tree(const OpSet& o,
                               RegisterMode mode = RegisterMode::multi_value) {
  DocState init;
  init.mode = mode;
  return interpret(o, [](DocState s, const OpId& id, const Operation& op) {
    return apply_op_tree(std::move(s), id, op);
  }, std::move(init));
}

struct TreeReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Checks that the root has no parent, every referenced object has exactly
/// one parent, and the ancestor relation has no cycles.
inline TreeReport check_tree_invariants(const DocState& s, const TreeConfig& cfg) {
  TreeReport report;
  std::map<OpId, std::size_t> parent_count;
  for (const ElemTuple& t : s.elems) {
    if (t.val == cfg.root) {
      report.ok = false;
      report.violations.push_back("root has a parent: tuple " + id_str(t.id));
    }
    ++parent_count[t.val];
  }
  for (const auto& [val, count] : parent_count) {
    if (count > 1) {
      report.ok = false;
      report.violations.push_back("multiple parents for " + id_str(val));
    }
  }
  for (const auto& [anc, desc] : ancestor(s.elems)) {
    if (anc == desc) {
      report.ok = false;
      report.violations.push_back("ancestor cycle through " + id_str(anc));
    }
  }
  return report;
}

}  // namespace opsets

#endif  // OPSETS_TREE_HPP
