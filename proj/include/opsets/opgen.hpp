#ifndef OPSETS_OPGEN_HPP
#define OPSETS_OPGEN_HPP

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>

#include "opsets/core.hpp"
#include "opsets/datatypes.hpp"
#include "opsets/tree.hpp"

namespace opsets {

// Mutation API: the functions a node calls to grow its OpSet with
// well-formed operations describing map and list edits. Each call reads the
// current document by re-interpreting the OpSet, then appends operations
// with fresh IDs. All functions return the extended OpSet.

/// Which interpretation a generator reads (E, L) through.
enum class DocMode { plain, tree };

struct EmptyMapLiteral {};
struct EmptyListLiteral {};

/// Value argument of an edit: a primitive, a fresh empty map/list, or a
/// reference to an existing object.
struct ValueSpec {
  std::variant<PrimitiveValue, EmptyMapLiteral, EmptyListLiteral, OpId> v;

  ValueSpec(PrimitiveValue p) : v(std::move(p)) {}
  ValueSpec(EmptyMapLiteral m) : v(m) {}
  ValueSpec(EmptyListLiteral l) : v(l) {}
  static ValueSpec existing(OpId id) {
    ValueSpec s{EmptyMapLiteral{}};
    s.v = std::move(id);
    return s;
  }
};

namespace detail {

inline DocState read_doc(const OpSet& o, DocMode mode) {
  return mode == DocMode::tree ? interpret_tree(o) : interpret_doc(o);
}

inline std::set<OpId> prev_for_slot(const DocState& d, const OpId& obj,
                                    const ElemKey& key) {
  auto ids = slot_assignments(d, obj, key);
  return {ids.begin(), ids.end()};
}

inline void require_object(const OpSet& o, const OpId& id, bool want_map) {
  const Operation* op = o.find(id);
  if (!op) throw IndexError("opgen: unknown object ID");
  bool ok = want_map ? std::holds_alternative<MakeMap>(op->action)
                     : std::holds_alternative<MakeList>(op->action);
  if (!ok) throw IndexError(want_map ? "opgen: object is not a map"
                                     : "opgen: object is not a list");
}

}  // namespace detail

/// Resolves a ValueSpec to the ID of its value operation, adding a
/// MakeVal/MakeMap/MakeList where needed. Existing objects pass through.
inline std::pair<OpSet, OpId> value_id(const OpSet& o, const std::string& node,
                                       const ValueSpec& spec) {
  if (auto* existing = std::get_if<OpId>(&spec.v)) {
    if (!o.contains(*existing))
      throw IndexError("value_id: unknown existing object");
    return {o, *existing};
  }
  OpId id = o.new_id(node);
  Operation op;
  if (auto* prim = std::get_if<PrimitiveValue>(&spec.v))
    op.action = MakeVal{*prim};
  else if (std::holds_alternative<EmptyMapLiteral>(spec.v))
    op.action = MakeMap{};
  else
    op.action = MakeList{};
  return {o.add(id, std::move(op)), id};
}

inline OpSet set_map_key(const OpSet& o, const std::string& node, const OpId& map,
                         const MapKey& key, const ValueSpec& value,
                         DocMode mode = DocMode::plain) {
  detail::require_object(o, map, /*want_map=*/true);
  DocState d = detail::read_doc(o, mode);
  auto [o1, val_id] = value_id(o, node, value);
  OpId assign_id = o1.new_id(node);
  auto prev = detail::prev_for_slot(d, map, ElemKey{key});
  return o1.add(assign_id, Operation{Assign{map, ElemKey{key}, val_id, prev}});
}

inline OpSet remove_map_key(const OpSet& o, const std::string& node,
                            const OpId& map, const MapKey& key,
                            DocMode mode = DocMode::plain) {
  detail::require_object(o, map, /*want_map=*/true);
  DocState d = detail::read_doc(o, mode);
  OpId id = o.new_id(node);
  auto prev = detail::prev_for_slot(d, map, ElemKey{key});
  return o.add(id, Operation{Remove{map, ElemKey{key}, prev}});
}

/// Insert a value at a visible index. Index may equal the visible length
/// (append); anything beyond is an error.
inline OpSet ins_list_index(const OpSet& o, const std::string& node,
                            const OpId& list, std::uint64_t index,
                            const ValueSpec& value, DocMode mode = DocMode::plain) {
  detail::require_object(o, list, /*want_map=*/false);
  DocState d = detail::read_doc(o, mode);
  OpId ref;
  if (index == 0) {
    ref = list;
  } else {
    auto key = idx_key(d, list, index - 1);
    if (!key) throw IndexError("ins_list_index: index beyond visible length");
    ref = *key;
  }
  auto [o1, val_id] = value_id(o, node, value);
  OpId insert_id = o1.new_id(node);
  OpSet o2 = o1.add(insert_id, Operation{InsertAfter{ref}});
  OpId assign_id = o2.new_id(node);
  return o2.add(assign_id,
                Operation{Assign{list, ElemKey{insert_id}, val_id, {}}});
}

inline OpSet set_list_index(const OpSet& o, const std::string& node,
                            const OpId& list, std::uint64_t index,
                            const ValueSpec& value, DocMode mode = DocMode::plain) {
  detail::require_object(o, list, /*want_map=*/false);
  DocState d = detail::read_doc(o, mode);
  auto key = idx_key(d, list, index);
  if (!key) throw IndexError("set_list_index: index out of range");
  auto [o1, val_id] = value_id(o, node, value);
  OpId assign_id = o1.new_id(node);
  auto prev = detail::prev_for_slot(d, list, ElemKey{*key});
  return o1.add(assign_id, Operation{Assign{list, ElemKey{*key}, val_id, prev}});
}

inline OpSet remove_list_index(const OpSet& o, const std::string& node,
                               const OpId& list, std::uint64_t index,
                               DocMode mode = DocMode::plain) {
  detail::require_object(o, list, /*want_map=*/false);
  DocState d = detail::read_doc(o, mode);
  auto key = idx_key(d, list, index);
  if (!key) throw IndexError("remove_list_index: index out of range");
  OpId id = o.new_id(node);
  auto prev = detail::prev_for_slot(d, list, ElemKey{*key});
  return o.add(id, Operation{Remove{list, ElemKey{*key}, prev}});
}

}  // namespace opsets

#endif  // OPSETS_OPGEN_HPP
