#ifndef OPSETS_CORE_HPP
#define OPSETS_CORE_HPP

#include <bit>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace opsets {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct OpSetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two entries with the same ID but different operations.
struct UniquenessError : OpSetError {
  using OpSetError::OpSetError;
};

/// An operation depends on an ID that is not strictly below its own.
struct CausalityError : OpSetError {
  using OpSetError::OpSetError;
};

/// Counter exhausted (2^64 - 1 reached).
struct CounterOverflowError : OpSetError {
  using OpSetError::OpSetError;
};

/// A list index beyond the visible length, or an unknown object.
struct IndexError : OpSetError {
  using OpSetError::OpSetError;
};

/// A broken list chain (cycle or missing link) or similar malformed state.
struct StructureError : OpSetError {
  using OpSetError::OpSetError;
};

// ---------------------------------------------------------------------------
// Operation identifiers
// ---------------------------------------------------------------------------

/// Lamport timestamp: (counter, nodeId). Total order is lexicographic,
/// counter first, then node ID bytewise.
struct OpId {
  std::uint64_t counter = 0;
  std::string node;

  auto operator<=>(const OpId&) const = default;
};

enum class Ordering { less, equal, greater };

inline std::string id_str(const OpId& id) {
  return std::to_string(id.counter) + "@" + id.node;
}

inline Ordering compare_ids(const OpId& a, const OpId& b) {
  auto c = a <=> b;
  if (c < 0) return Ordering::less;
  if (c > 0) return Ordering::greater;
  return Ordering::equal;
}

// ---------------------------------------------------------------------------
// Values and keys
// ---------------------------------------------------------------------------

/// Wrapped primitive: null, string, int, bool, or float.
/// Floats compare bitwise so that log round-trips preserve equality.
struct PrimitiveValue {
  using Rep = std::variant<std::monostate, std::string, std::int64_t, bool, double>;
  Rep v;

  PrimitiveValue() = default;
  PrimitiveValue(Rep r) : v(std::move(r)) {}
  PrimitiveValue(const char* s) : v(std::string(s)) {}
  PrimitiveValue(std::string s) : v(std::move(s)) {}
  PrimitiveValue(std::int64_t i) : v(i) {}
  PrimitiveValue(int i) : v(std::int64_t{i}) {}
  PrimitiveValue(bool b) : v(b) {}
  PrimitiveValue(double d) : v(d) {}

  bool operator==(const PrimitiveValue& o) const {
    if (v.index() != o.v.index()) return false;
    if (auto* d = std::get_if<double>(&v)) {
      return std::bit_cast<std::uint64_t>(*d) ==
             std::bit_cast<std::uint64_t>(std::get<double>(o.v));
    }
    return v == o.v;
  }
};

/// Map key: string, int, or bool. Ordered by type tag, then value, so
/// materialized output is deterministic.
struct MapKey {
  using Rep = std::variant<std::string, std::int64_t, bool>;
  Rep v;

  MapKey() = default;
  MapKey(Rep r) : v(std::move(r)) {}
  MapKey(const char* s) : v(std::string(s)) {}
  MapKey(std::string s) : v(std::move(s)) {}
  MapKey(std::int64_t i) : v(i) {}
  MapKey(int i) : v(std::int64_t{i}) {}
  MapKey(bool b) : v(b) {}

  auto operator<=>(const MapKey&) const = default;
};

/// Key position of an Assign/Remove: a map key, or the ID of a list element.
/// Map keys sort before element IDs.
using ElemKey = std::variant<MapKey, OpId>;

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

struct MakeMap {
  bool operator==(const MakeMap&) const = default;
};
struct MakeList {
  bool operator==(const MakeList&) const = default;
};
struct MakeVal {
  PrimitiveValue val;
  bool operator==(const MakeVal&) const = default;
};
struct InsertAfter {
  OpId ref;
  bool operator==(const InsertAfter&) const = default;
};
struct Assign {
  OpId obj;
  ElemKey key;
  OpId val;
  std::set<OpId> prev;
  bool operator==(const Assign&) const = default;
};
struct Remove {
  OpId obj;
  ElemKey key;
  std::set<OpId> prev;
  bool operator==(const Remove&) const = default;
};

struct Operation {
  std::variant<MakeMap, MakeList, MakeVal, InsertAfter, Assign, Remove> action;
  bool operator==(const Operation&) const = default;
};

/// All IDs mentioned by an operation. Every dependency must be strictly
/// below the operation's own ID.
inline std::set<OpId> deps(const Operation& op) {
  std::set<OpId> out;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, InsertAfter>) {
          out.insert(a.ref);
        } else if constexpr (std::is_same_v<T, Assign>) {
          out.insert(a.obj);
          if (auto* k = std::get_if<OpId>(&a.key)) out.insert(*k);
          out.insert(a.val);
          out.insert(a.prev.begin(), a.prev.end());
        } else if constexpr (std::is_same_v<T, Remove>) {
          out.insert(a.obj);
          if (auto* k = std::get_if<OpId>(&a.key)) out.insert(*k);
          out.insert(a.prev.begin(), a.prev.end());
        }
      },
      op.action);
  return out;
}

// ---------------------------------------------------------------------------
// OpSet
// ---------------------------------------------------------------------------

/// A finite set of (OpId, Operation) pairs, unique per ID, merged by set
/// union. Values are immutable after construction; all mutators return a
/// new OpSet.
class OpSet {
 public:
  using Entry = std::pair<OpId, Operation>;

  OpSet() = default;

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  const Operation* find(const OpId& id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool contains(const OpId& id) const { return entries_.count(id) > 0; }

  /// Largest counter of any entry; 0 for the empty set.
  std::uint64_t max_counter() const {
    return entries_.empty() ? 0 : entries_.rbegin()->first.counter;
  }

  /// Fresh ID for `node`: one above the maximum counter anywhere in the set.
  OpId new_id(const std::string& node) const {
    if (node.empty()) throw OpSetError("new_id: node ID must be non-empty");
    std::uint64_t mx = max_counter();
    if (mx == std::numeric_limits<std::uint64_t>::max())
      throw CounterOverflowError("new_id: counter overflow");
    return OpId{mx + 1, node};
  }

  /// Set union with {(id, op)}. Re-adding an identical pair is a no-op.
  OpSet add(const OpId& id, Operation op) const {
    if (const Operation* existing = find(id)) {
      if (!(*existing == op))
        throw UniquenessError("add_op: duplicate ID with different operation");
      return *this;
    }
    for (const OpId& d : deps(op)) {
      if (!(d < id))
        throw CausalityError("add_op: dependency not below operation ID");
    }
    OpSet out = *this;
    out.entries_.emplace(id, std::move(op));
    return out;
  }

  /// Set union. Commutative, associative, idempotent.
  OpSet merged(const OpSet& other) const {
    const OpSet& small = size() < other.size() ? *this : other;
    const OpSet& big = size() < other.size() ? other : *this;
    OpSet out = big;
    for (const auto& [id, op] : small.entries_) {
      auto [it, inserted] = out.entries_.emplace(id, op);
      if (!inserted && !(it->second == op))
        throw UniquenessError("merge: same ID mapped to different operations");
    }
    return out;
  }

  /// Entries in ascending ID order.
  std::vector<Entry> linearize() const {
    return {entries_.begin(), entries_.end()};
  }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const OpSet&) const = default;

 private:
  std::map<OpId, Operation> entries_;
};

/// Left fold of `step` over the linearisation, from `initial`.
template <typename State, typename Step>
State interpret(const OpSet& o, Step&& step, State initial) {
  State s = std::move(initial);
  for (const auto& entry : o) s = step(std::move(s), entry.first, entry.second);
  return s;
}

/// Incremental fast path: when the new ID exceeds every existing ID, the
/// step function can be applied directly to a cached interpretation of `o`
/// instead of recomputing the whole fold.
template <typename State, typename Step>
State interpret_added(const OpSet& o, State cached, const OpId& id,
                      const Operation& op, Step&& step, State initial = State{}) {
  if (o.empty() || std::prev(o.end())->first < id)
    return step(std::move(cached), id, op);
  return interpret(o.add(id, op), step, std::move(initial));
}

}  // namespace opsets

#endif  // OPSETS_CORE_HPP
