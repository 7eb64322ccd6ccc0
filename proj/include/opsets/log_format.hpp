#ifndef OPSETS_LOG_FORMAT_HPP
#define OPSETS_LOG_FORMAT_HPP

#include <charconv>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "opsets/core.hpp"
#include "opsets/datatypes.hpp"
#include "opsets/sim.hpp"

namespace opsets {

// Operation-log file format:
//   {"version":1, "ops":[{"id":[counter,node], "action":{"t":...}} ...]}
// Canonical form uses UTF-8, a trailing LF, ops sorted by ID, and the fixed
// field order below, so equal OpSets always serialize to identical bytes.

using json = nlohmann::ordered_json;

class LogFormatError : public OpSetError {
 public:
  using OpSetError::OpSetError;
};

namespace detail {

// JSON numbers are only exact up to 2^53 - 1; larger counters travel as
// decimal strings.
constexpr std::uint64_t kMaxJsonInt = (std::uint64_t{1} << 53) - 1;

inline json counter_to_json(std::uint64_t c) {
  if (c <= kMaxJsonInt) return json(c);
  return json(std::to_string(c));
}

inline std::uint64_t counter_from_json(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && p == s.data() + s.size()) return v;
  }
  throw LogFormatError(where + ": counter must be a non-negative integer or decimal string");
}

inline json id_to_json(const OpId& id) {
  return json::array({counter_to_json(id.counter), id.node});
}

inline OpId id_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[1].is_string())
    throw LogFormatError(where + ": ID must be [counter, nodeId]");
  return OpId{counter_from_json(j[0], where), j[1].get<std::string>()};
}

inline json prim_to_json(const PrimitiveValue& v) {
  json out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          out = json{{"t", "null"}};
        } else if constexpr (std::is_same_v<T, std::string>) {
          out = json{{"t", "str"}, {"v", x}};
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          out = json{{"t", "int"}, {"v", x}};
        } else if constexpr (std::is_same_v<T, bool>) {
          out = json{{"t", "bool"}, {"v", x}};
        } else {
          out = json{{"t", "f64"}, {"v", x}};
        }
      },
      v.v);
  return out;
}

inline PrimitiveValue prim_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("t") || !j["t"].is_string())
    throw LogFormatError(where + ": tagged value must be an object with \"t\"");
  const std::string t = j["t"].get<std::string>();
  if (t == "null") return PrimitiveValue{};
  if (!j.contains("v")) throw LogFormatError(where + ": tag \"" + t + "\" needs \"v\"");
  const json& v = j["v"];
  if (t == "str" && v.is_string()) return PrimitiveValue{v.get<std::string>()};
  if (t == "int" && v.is_number_integer()) return PrimitiveValue{v.get<std::int64_t>()};
  if (t == "bool" && v.is_boolean()) return PrimitiveValue{v.get<bool>()};
  if (t == "f64" && v.is_number()) return PrimitiveValue{v.get<double>()};
  throw LogFormatError(where + ": unknown value tag \"" + t + "\" or wrong payload type");
}

inline json key_to_json(const ElemKey& key) {
  if (auto* id = std::get_if<OpId>(&key))
    return json{{"t", "id"}, {"v", id_to_json(*id)}};
  const MapKey& k = std::get<MapKey>(key);
  if (auto* s = std::get_if<std::string>(&k.v)) return json{{"t", "str"}, {"v", *s}};
  if (auto* i = std::get_if<std::int64_t>(&k.v)) return json{{"t", "int"}, {"v", *i}};
  return json{{"t", "bool"}, {"v", std::get<bool>(k.v)}};
}

inline ElemKey key_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("t") || !j["t"].is_string())
    throw LogFormatError(where + ": key must be a tagged object");
  const std::string t = j["t"].get<std::string>();
  if (t == "id") {
    if (!j.contains("v")) throw LogFormatError(where + ": key tag \"id\" needs \"v\"");
    return ElemKey{id_from_json(j["v"], where)};
  }
  PrimitiveValue p = prim_from_json(j, where);
  if (auto* s = std::get_if<std::string>(&p.v)) return ElemKey{MapKey{*s}};
  if (auto* i = std::get_if<std::int64_t>(&p.v)) return ElemKey{MapKey{*i}};
  if (auto* b = std::get_if<bool>(&p.v)) return ElemKey{MapKey{*b}};
  throw LogFormatError(where + ": key tag must be str, int, bool, or id");
}

inline json ids_to_json(const std::set<OpId>& ids) {
  json out = json::array();
  for (const OpId& id : ids) out.push_back(id_to_json(id));
  return out;
}

inline std::set<OpId> ids_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw LogFormatError(where + ": \"prev\" must be an array");
  std::set<OpId> out;
  for (const json& e : j) out.insert(id_from_json(e, where));
  return out;
}

inline json action_to_json(const Operation& op) {
  json out;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, MakeMap>) {
          out = json{{"t", "MakeMap"}};
        } else if constexpr (std::is_same_v<T, MakeList>) {
          out = json{{"t", "MakeList"}};
        } else if constexpr (std::is_same_v<T, MakeVal>) {
          out = json{{"t", "MakeVal"}, {"val", prim_to_json(a.val)}};
        } else if constexpr (std::is_same_v<T, InsertAfter>) {
          out = json{{"t", "InsertAfter"}, {"ref", id_to_json(a.ref)}};
        } else if constexpr (std::is_same_v<T, Assign>) {
          out = json{{"t", "Assign"},
                     {"obj", id_to_json(a.obj)},
                     {"key", key_to_json(a.key)},
                     {"val", id_to_json(a.val)},
                     {"prev", ids_to_json(a.prev)}};
        } else {
          out = json{{"t", "Remove"},
                     {"obj", id_to_json(a.obj)},
                     {"key", key_to_json(a.key)},
                     {"prev", ids_to_json(a.prev)}};
        }
      },
      op.action);
  return out;
}

inline Operation action_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("t") || !j["t"].is_string())
    throw LogFormatError(where + ": action must be a tagged object");
  const std::string t = j["t"].get<std::string>();
  auto need = [&](const char* field) -> const json& {
    if (!j.contains(field))
      throw LogFormatError(where + ": action \"" + t + "\" needs \"" + field + "\"");
    return j[field];
  };
  Operation op;
  if (t == "MakeMap") {
    op.action = MakeMap{};
  } else if (t == "MakeList") {
    op.action = MakeList{};
  } else if (t == "MakeVal") {
    op.action = MakeVal{prim_from_json(need("val"), where)};
  } else if (t == "InsertAfter") {
    op.action = InsertAfter{id_from_json(need("ref"), where)};
  } else if (t == "Assign") {
    op.action = Assign{id_from_json(need("obj"), where), key_from_json(need("key"), where),
                       id_from_json(need("val"), where), ids_from_json(need("prev"), where)};
  } else if (t == "Remove") {
    op.action = Remove{id_from_json(need("obj"), where), key_from_json(need("key"), where),
                       ids_from_json(need("prev"), where)};
  } else {
    throw LogFormatError(where + ": unknown action tag \"" + t + "\"");
  }
  return op;
}

}  // namespace detail

inline OpSet parse_log(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw LogFormatError(std::string("parse_log: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version") || doc["version"] != 1)
    throw LogFormatError("parse_log: expected an object with \"version\": 1");
  if (!doc.contains("ops") || !doc["ops"].is_array())
    throw LogFormatError("parse_log: expected an \"ops\" array");

  OpSet out;
  std::size_t idx = 0;
  for (const json& rec : doc["ops"]) {
    const std::string where = "ops[" + std::to_string(idx) + "]";
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("action"))
      throw LogFormatError(where + ": record must have \"id\" and \"action\"");
    OpId id = detail::id_from_json(rec["id"], where);
    Operation op = detail::action_from_json(rec["action"], where);
    try {
      out = out.add(id, std::move(op));
    } catch (const OpSetError& e) {
      throw LogFormatError(where + ": " + e.what());
    }
    ++idx;
  }
  return out;
}

inline json log_to_json(const OpSet& o) {
  json ops = json::array();
  for (const auto& [id, op] : o)
    ops.push_back(json{{"id", detail::id_to_json(id)},
                       {"action", detail::action_to_json(op)}});
  return json{{"version", 1}, {"ops", std::move(ops)}};
}

inline std::string serialize_log(const OpSet& o) { return log_to_json(o).dump() + "\n"; }

/// User-facing JSON rendering. Map keys become object keys (non-string keys
/// spelled out); a single-valued slot renders as the value itself, while a
/// slot with concurrent assignments renders as {"mv":[newest,...]}.
inline json materialized_to_json(const MaterializedValue& m) {
  auto render_slot = [](const std::vector<MaterializedValue>& slot) -> json {
    if (slot.size() == 1) return materialized_to_json(slot[0]);
    json vals = json::array();
    for (const MaterializedValue& v : slot) vals.push_back(materialized_to_json(v));
    return json{{"mv", std::move(vals)}};
  };
  switch (m.kind) {
    case MaterializedValue::Kind::primitive: {
      json out;
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>)
              out = nullptr;
            else
              out = x;
          },
          m.prim.v);
      return out;
    }
    case MaterializedValue::Kind::cycle:
      return json{{"cycle", detail::id_to_json(m.cycle_ref)}};
    case MaterializedValue::Kind::map: {
      json out = json::object();
      for (const auto& [key, slot] : m.map_slots) {
        std::string name;
        if (auto* s = std::get_if<std::string>(&key.v))
          name = *s;
        else if (auto* i = std::get_if<std::int64_t>(&key.v))
          name = std::to_string(*i);
        else
          name = std::get<bool>(key.v) ? "true" : "false";
        out[name] = render_slot(slot);
      }
      return out;
    }
    case MaterializedValue::Kind::list: {
      json out = json::array();
      for (const auto& slot : m.list_slots) out.push_back(render_slot(slot));
      return out;
    }
  }
  throw OpSetError("materialized_to_json: unreachable");
}

inline json trace_to_json(const SimTrace& trace) {
  json events = json::array();
  for (const SimEvent& e : trace.events)
    events.push_back(json{{"step", e.step}, {"node", e.node}, {"kind", e.kind},
                          {"detail", e.detail}});
  json docs = json::array();
  for (const MaterializedValue& d : trace.final_docs)
    docs.push_back(materialized_to_json(d));
  json logs = json::array();
  for (const OpSet& o : trace.final_opsets) logs.push_back(log_to_json(o));
  return json{{"nodes", trace.config.node_count},
              {"seed", trace.config.seed},
              {"events", std::move(events)},
              {"finalDocs", std::move(docs)},
              {"finalLogs", std::move(logs)}};
}

}  // namespace opsets

#endif  // OPSETS_LOG_FORMAT_HPP
