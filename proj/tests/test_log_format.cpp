#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opsets/log_format.hpp"
#include "opsets/opgen.hpp"

using namespace opsets;

namespace {

OpId id(std::uint64_t c, const char* n = "a") { return OpId{c, n}; }

}  // namespace

TEST_CASE("a one-record file parses to a one-entry OpSet") {
  OpSet o = parse_log(R"({"version":1,"ops":[{"id":[1,"a"],"action":{"t":"MakeMap"}}]})");
  CHECK(o.size() == 1);
  CHECK(std::holds_alternative<MakeMap>(o.find(id(1))->action));
}

TEST_CASE("parse errors name the offending record") {
  CHECK_THROWS_WITH_AS(
      parse_log(R"({"version":1,"ops":[{"id":[1,"a"],"action":{"t":"Bogus"}}]})"),
      doctest::Contains("ops[0]"), LogFormatError);

  // Causality violation: Assign's prev holds an ID above its own.
  const char* bad = R"({"version":1,"ops":[
    {"id":[1,"a"],"action":{"t":"MakeMap"}},
    {"id":[2,"a"],"action":{"t":"Assign","obj":[1,"a"],"key":{"t":"str","v":"k"},
                            "val":[1,"a"],"prev":[[5,"a"]]}}]})";
  CHECK_THROWS_WITH_AS(parse_log(bad), doctest::Contains("ops[1]"), LogFormatError);

  CHECK_THROWS_AS(parse_log("not json"), LogFormatError);
  CHECK_THROWS_AS(parse_log(R"({"version":2,"ops":[]})"), LogFormatError);
}

TEST_CASE("all six operations round-trip through serialization") {
  OpSet o = OpSet{}.add(id(1), Operation{MakeMap{}});
  o = o.add(id(2), Operation{MakeList{}});
  o = o.add(id(3), Operation{MakeVal{PrimitiveValue{3.5}}});
  o = o.add(id(4), Operation{InsertAfter{id(2)}});
  o = o.add(id(5), Operation{Assign{id(2), ElemKey{id(4)}, id(3), {}}});
  o = o.add(id(6), Operation{Assign{id(1), ElemKey{MapKey{true}}, id(3), {id(5)}}});
  o = o.add(id(7), Operation{Remove{id(1), ElemKey{MapKey{std::int64_t{9}}}, {id(6)}}});
  o = o.add(id(8), Operation{MakeVal{PrimitiveValue{}}});

  std::string bytes = serialize_log(o);
  OpSet back = parse_log(bytes);
  CHECK(back == o);
  CHECK(serialize_log(back) == bytes);  // canonical fixpoint
}

TEST_CASE("canonical bytes are independent of construction order") {
  OpSet a = OpSet{}.add(id(1), Operation{MakeMap{}}).add(id(2), Operation{MakeList{}});
  OpSet b = OpSet{}.add(id(2), Operation{MakeList{}}).add(id(1), Operation{MakeMap{}});
  CHECK(serialize_log(a) == serialize_log(b));
}

TEST_CASE("counters above 2^53-1 travel as decimal strings") {
  const std::uint64_t big = (std::uint64_t{1} << 53) + 7;
  OpSet o = OpSet{}.add(OpId{big, "a"}, Operation{MakeMap{}});
  std::string bytes = serialize_log(o);
  CHECK(bytes.find("\"9007199254740999\"") != std::string::npos);
  OpSet back = parse_log(bytes);
  CHECK(back == o);

  // Small counters remain JSON numbers.
  std::string small = serialize_log(OpSet{}.add(id(3), Operation{MakeMap{}}));
  CHECK(small.find("[3,\"a\"]") != std::string::npos);
}

TEST_CASE("materialized documents render as plain JSON") {
  OpSet o = OpSet{}.add(id(1), Operation{MakeMap{}});
  o = set_map_key(o, "a", id(1), MapKey{"name"}, ValueSpec{PrimitiveValue{"x"}});
  o = set_map_key(o, "a", id(1), MapKey{"n"}, ValueSpec{PrimitiveValue{5}});
  json j = materialized_to_json(materialize(interpret_doc(o), id(1), o));
  CHECK(j.dump() == R"({"n":5,"name":"x"})");

  SUBCASE("conflicting values render newest-first under mv") {
    OpSet b = set_map_key(o, "b", id(1), MapKey{"n"}, ValueSpec{PrimitiveValue{6}});
    OpSet c = set_map_key(o, "c", id(1), MapKey{"n"}, ValueSpec{PrimitiveValue{7}});
    OpSet m = b.merged(c);
    json jm = materialized_to_json(materialize(interpret_doc(m), id(1), m));
    CHECK(jm["n"].dump() == R"({"mv":[7,6]})");
  }

  SUBCASE("lists render as arrays in chain order") {
    OpSet l = OpSet{}.add(id(1), Operation{MakeList{}});
    l = ins_list_index(l, "a", id(1), 0, ValueSpec{PrimitiveValue{"H"}});
    l = ins_list_index(l, "a", id(1), 1, ValueSpec{PrimitiveValue{"i"}});
    json jl = materialized_to_json(materialize(interpret_doc(l), id(1), l));
    CHECK(jl.dump() == R"(["H","i"])");
  }
}

TEST_CASE("merge order does not affect serialized output") {
  OpSet a = OpSet{}.add(id(1), Operation{MakeMap{}});
  a = set_map_key(a, "a", id(1), MapKey{"x"}, ValueSpec{PrimitiveValue{1}});
  OpSet b = OpSet{}.add(id(1), Operation{MakeMap{}});
  b = set_map_key(b, "b", id(1), MapKey{"y"}, ValueSpec{PrimitiveValue{2}});
  CHECK(serialize_log(a.merged(b)) == serialize_log(b.merged(a)));
}
