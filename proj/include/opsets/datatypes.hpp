#ifndef OPSETS_DATATYPES_HPP
#define OPSETS_DATATYPES_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "opsets/core.hpp"

namespace opsets {

// ---------------------------------------------------------------------------
// Document state: the pair of relations (E, L)
// ---------------------------------------------------------------------------

/// One tuple of the element relation E: an Assign with ID `id` set the slot
/// (obj, key) to the value with ID `val`.
struct ElemTuple {
  OpId id;
  OpId obj;
  ElemKey key;
  OpId val;

  auto operator<=>(const ElemTuple&) const = default;
};

enum class RegisterMode { multi_value, last_writer_wins };

/// (E, L) plus the register-behaviour flag. L maps each element to its
/// successor; nullopt is the end-of-list marker.
struct DocState {
  std::set<ElemTuple> elems;                       // E
  std::map<OpId, std::optional<OpId>> list_next;   // L
  RegisterMode mode = RegisterMode::multi_value;

  bool operator==(const DocState&) const = default;
};

/// IDs of the assignments currently held by slot (obj, key).
inline std::vector<OpId> slot_assignments(const DocState& s, const OpId& obj,
                                          const ElemKey& key) {
  std::vector<OpId> out;
  for (const ElemTuple& t : s.elems)
    if (t.obj == obj && t.key == key) out.push_back(t.id);
  return out;
}

inline bool element_visible(const DocState& s, const OpId& obj, const OpId& elem) {
  for (const ElemTuple& t : s.elems)
    if (t.obj == obj && t.key == ElemKey{elem}) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Sequential interpretation of the six operations
// ---------------------------------------------------------------------------

namespace detail {

inline DocState apply_assign_plain(DocState s, const OpId& id, const Assign& a) {
  std::set<ElemTuple> kept;
  for (const ElemTuple& t : s.elems) {
    bool drop = s.mode == RegisterMode::multi_value
                    ? a.prev.count(t.id) > 0
                    : (t.obj == a.obj && t.key == a.key);
    if (!drop) kept.insert(t);
  }
  kept.insert(ElemTuple{id, a.obj, a.key, a.val});
  s.elems = std::move(kept);
  return s;
}

template <typename AssignFn>
DocState apply_op_with(DocState s, const OpId& id, const Operation& op,
                       AssignFn&& assign_fn) {
  return std::visit(
      [&](const auto& a) -> DocState {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, MakeMap> || std::is_same_v<T, MakeVal>) {
          return s;
        } else if constexpr (std::is_same_v<T, MakeList>) {
          s.list_next.emplace(id, std::nullopt);
          return s;
        } else if constexpr (std::is_same_v<T, InsertAfter>) {
          auto it = s.list_next.find(a.ref);
          if (it == s.list_next.end()) return s;  // ref absent: no-op
          std::optional<OpId> next = it->second;
          it->second = id;
          s.list_next.emplace(id, next);
          return s;
        } else if constexpr (std::is_same_v<T, Assign>) {
          return assign_fn(std::move(s), id, a);
        } else {  // Remove
          std::set<ElemTuple> kept;
          for (const ElemTuple& t : s.elems)
            if (a.prev.count(t.id) == 0) kept.insert(t);
          s.elems = std::move(kept);
          return s;
        }
      },
      op.action);
}

}  // namespace detail

/// The interpretation step for maps, lists, and registers.
inline DocState apply_op(DocState s, const OpId& id, const Operation& op) {
  return detail::apply_op_with(std::move(s), id, op, detail::apply_assign_plain);
}

inline DocState interpret_doc(const OpSet& o,
                              RegisterMode mode = RegisterMode::multi_value) {
  DocState init;
  init.mode = mode;
  return interpret(o, [](DocState s, const OpId& id, const Operation& op) {
    return apply_op(std::move(s), id, op);
  }, std::move(init));
}

// ---------------------------------------------------------------------------
// List walking
// ---------------------------------------------------------------------------

/// Ordered chain of the list created by `list_obj`, tombstones included.
/// Throws StructureError on a cycle or on a link that dangles mid-chain.
inline std::vector<OpId> list_chain(const DocState& s, const OpId& list_obj) {
  std::vector<OpId> out;
  auto it = s.list_next.find(list_obj);
  if (it == s.list_next.end())
    throw StructureError("list_chain: object is not a list head");
  std::optional<OpId> cur = it->second;
  std::size_t guard = s.list_next.size() + 1;
  while (cur) {
    if (out.size() >= guard) throw StructureError("list_chain: cycle detected");
    out.push_back(*cur);
    auto nx = s.list_next.find(*cur);
    if (nx == s.list_next.end())
      throw StructureError("list_chain: missing successor entry");
    cur = nx->second;
  }
  return out;
}

/// Chain order, filtered to elements that hold at least one value.
inline std::vector<OpId> visible_list_elements(const DocState& s,
                                               const OpId& list_obj) {
  std::vector<OpId> out;
  for (const OpId& e : list_chain(s, list_obj))
    if (element_visible(s, list_obj, e)) out.push_back(e);
  return out;
}

/// ID of the visible element at `index`, skipping tombstones.
inline std::optional<OpId> idx_key(const DocState& s, const OpId& list_obj,
                                   std::uint64_t index) {
  std::uint64_t remaining = index;
  for (const OpId& e : list_chain(s, list_obj)) {
    if (!element_visible(s, list_obj, e)) continue;
    if (remaining == 0) return e;
    --remaining;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Materialization
// ---------------------------------------------------------------------------

/// User-facing rendering of the object graph rooted at one object.
/// Multi-value slots are ordered by assigning OpId descending (newest
/// first); an object revisited on the current path renders as a cycle
/// reference.
struct MaterializedValue {
  enum class Kind { primitive, map, list, cycle };

  Kind kind = Kind::primitive;
  PrimitiveValue prim;  // kind == primitive
  OpId cycle_ref;       // kind == cycle
  std::vector<std::pair<MapKey, std::vector<MaterializedValue>>> map_slots;
  std::vector<std::vector<MaterializedValue>> list_slots;

  bool operator==(const MaterializedValue&) const = default;

  static MaterializedValue primitive(PrimitiveValue v) {
    MaterializedValue m;
    m.kind = Kind::primitive;
    m.prim = std::move(v);
    return m;
  }
};

namespace detail {

inline MaterializedValue materialize_walk(const DocState& s, const OpId& root,
                                          const OpSet& ops,
                                          std::set<OpId>& path) {
  const Operation* op = ops.find(root);
  if (!op) throw IndexError("materialize: unknown object ID");

  if (auto* mv = std::get_if<MakeVal>(&op->action))
    return MaterializedValue::primitive(mv->val);

  if (path.count(root)) {
    MaterializedValue m;
    m.kind = MaterializedValue::Kind::cycle;
    m.cycle_ref = root;
    return m;
  }
  path.insert(root);

  auto render_slot = [&](const OpId& obj, const ElemKey& key) {
    // Newest assignment first.
    std::vector<const ElemTuple*> tuples;
    for (const ElemTuple& t : s.elems)
      if (t.obj == obj && t.key == key) tuples.push_back(&t);
    std::sort(tuples.begin(), tuples.end(),
              [](const ElemTuple* a, const ElemTuple* b) { return b->id < a->id; });
    std::vector<MaterializedValue> slot;
    for (const ElemTuple* t : tuples)
      slot.push_back(materialize_walk(s, t->val, ops, path));
    return slot;
  };

  MaterializedValue m;
  if (std::holds_alternative<MakeMap>(op->action)) {
    m.kind = MaterializedValue::Kind::map;
    std::set<MapKey> keys;
    for (const ElemTuple& t : s.elems)
      if (t.obj == root)
        if (auto* k = std::get_if<MapKey>(&t.key)) keys.insert(*k);
    for (const MapKey& k : keys)
      m.map_slots.emplace_back(k, render_slot(root, ElemKey{k}));
  } else if (std::holds_alternative<MakeList>(op->action)) {
    m.kind = MaterializedValue::Kind::list;
    for (const OpId& e : visible_list_elements(s, root))
      m.list_slots.push_back(render_slot(root, ElemKey{e}));
  } else {
    throw IndexError("materialize: root is not a MakeMap/MakeList/MakeVal");
  }

  path.erase(root);
  return m;
}

}  // namespace detail

inline MaterializedValue materialize(const DocState& s, const OpId& root,
                                     const OpSet& ops) {
  std::set<OpId> path;
  return detail::materialize_walk(s, root, ops, path);
}

}  // namespace opsets

#endif  // OPSETS_DATATYPES_HPP
