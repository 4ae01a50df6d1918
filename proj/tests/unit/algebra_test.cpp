#include "rxo/core/algebra.hpp"
#include "rxo/error.hpp"

#include <doctest.h>

using namespace rxo;

namespace {
Value s(const char* v) { return Value::string(v); }
Value i(std::int64_t v) { return Value::integer(v); }
Value o(std::uint64_t v) { return Value::oid({v}); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::UsageError;
}
} // namespace

TEST_CASE("union is idempotent") {
  Schema sch{{"i", Domain::Integer}};
  MapEnv env;
  auto r = eval_algebra(*union_of(literal(Relation(sch, {{i(1)}})), literal(Relation(sch, {{i(1)}, {i(2)}}))), env);
  CHECK(r == Relation(sch, {{i(1)}, {i(2)}}));
}

TEST_CASE("left join pads an object without component tuples") {
  // OIDs 7, 8, 9 stand for Ship1, Ship2, Ship3
  MapEnv env;
  env.bind("R_DOCS", Relation(Schema{{"OID", Domain::Oid}, {"DocN", Domain::String}},
                              {{o(7), s("Ship1")}, {o(8), s("Ship2")}, {o(9), s("Ship3")}}));
  env.bind("R_DOCS.Items", Relation(Schema{{"OID", Domain::Oid}, {"Art", Domain::String}, {"Pieces", Domain::Integer}},
                                    {{o(7), s("Axe"), i(2)}, {o(8), s("Axe"), i(5)}, {o(8), s("Tie"), i(10)}}));
  auto expr = left_join(relvar("R_DOCS"),
                        rename(relvar("R_DOCS.Items"), {{"Art", "Items.Art"}, {"Pieces", "Items.Pieces"}}),
                        {{"OID", "OID"}});
  Relation r = eval_algebra(*select(expr, binary(BinaryOp::Eq, attr("DocN"), lit(s("Ship3")))), env);
  REQUIRE(r.size() == 1);
  const Tuple& t = *r.tuples().begin();
  CHECK(r.schema().names() == std::vector<std::string>{"OID", "DocN", "Items.Art", "Items.Pieces"});
  CHECK(t[2].is_null());
  CHECK(t[3].is_null());
  CHECK(eval_algebra(*expr, env).size() == 4);
}

TEST_CASE("projection deduplicates component rows") {
  MapEnv env;
  env.bind("Items", Relation(Schema{{"OID", Domain::Oid}, {"Art", Domain::String}, {"Pieces", Domain::Integer}},
                             {{o(1), s("Axe"), i(2)},
                              {o(2), s("Axe"), i(5)},
                              {o(2), s("Tie"), i(10)},
                              {o(4), s("Tie"), i(50)},
                              {o(4), s("Axe"), i(50)}}));
  auto r = eval_algebra(*project(relvar("Items"), std::vector<std::string>{"Art"}), env);
  CHECK(r == Relation(Schema{{"Art", Domain::String}}, {{s("Axe")}, {s("Tie")}}));
}

TEST_CASE("grouped SUM over sale items") {
  Relation sale(Schema{{"Art", Domain::String}, {"Price", Domain::Integer}, {"Pieces", Domain::Integer}},
                {{s("Tie"), i(10), i(30)}, {s("Tie"), i(11), i(20)}, {s("Axe"), i(20), i(50)}});
  auto by_art = group_aggregate(sale, {"Art"}, {{AggFunc::Sum, attr("Pieces"), "Pieces"}});
  CHECK(by_art == Relation(Schema{{"Art", Domain::String}, {"Pieces", Domain::Integer}},
                           {{s("Tie"), i(50)}, {s("Axe"), i(50)}}));
  auto amount = group_aggregate(sale, {}, {{AggFunc::Sum, binary(BinaryOp::Mul, attr("Pieces"), attr("Price")), "Amount"}});
  CHECK(amount == Relation(Schema{{"Amount", Domain::Integer}}, {{i(1520)}}));
}

TEST_CASE("aggregates over an empty input without grouping yield one row") {
  Relation empty(Schema{{"Pieces", Domain::Integer}});
  auto r = group_aggregate(empty, {}, {{AggFunc::Sum, attr("Pieces"), "s"}, {AggFunc::Count, nullptr, "c"}});
  REQUIRE(r.size() == 1);
  CHECK(r.tuples().begin()->at(0).is_null());
  CHECK(r.tuples().begin()->at(1) == i(0));
  CHECK(group_aggregate(empty, {"Pieces"}, {{AggFunc::Count, nullptr, "c"}}).empty());
  CHECK(code_of([&] { group_aggregate(Relation(Schema{{"n", Domain::String}}), {}, {{AggFunc::Sum, attr("n"), "x"}}); }) ==
        ErrorCode::TypeError);
}

TEST_CASE("evaluation errors") {
  MapEnv env;
  env.bind("A", Relation(Schema{{"a", Domain::Integer}}));
  env.bind("B", Relation(Schema{{"b", Domain::Integer}}));
  CHECK(code_of([&] { eval_algebra(*relvar("nope"), env); }) == ErrorCode::UnknownRelvar);
  CHECK(code_of([&] { eval_algebra(*union_of(relvar("A"), relvar("B")), env); }) == ErrorCode::SchemaMismatch);
  CHECK(code_of([&] { eval_algebra(*difference(relvar("A"), relvar("B")), env); }) == ErrorCode::SchemaMismatch);
  CHECK(code_of([&] { eval_algebra(*project(relvar("A"), std::vector<std::string>{"zz"}), env); }) ==
        ErrorCode::UnknownAttribute);
  CHECK(code_of([&] { eval_algebra(*join(relvar("A"), relvar("B"), {{"a", "q"}}), env); }) ==
        ErrorCode::UnknownAttribute);
}

TEST_CASE("join on differently named attributes keeps the left name") {
  MapEnv env;
  env.bind("DOCS", Relation(Schema{{"OID", Domain::Oid}, {"Cntr", Domain::Oid}}, {{o(1), o(10)}, {o(2), o(11)}}));
  env.bind("CON", Relation(Schema{{"OID", Domain::Oid}, {"Name", Domain::String}}, {{o(10), s("TheShop")}}));
  auto r = eval_algebra(*left_join(relvar("DOCS"), rename(relvar("CON"), {{"Name", "Cntr.Name"}}), {{"Cntr", "OID"}}), env);
  CHECK(r.schema().names() == std::vector<std::string>{"OID", "Cntr", "Cntr.Name"});
  CHECK(r.size() == 2);
  auto schema = infer_schema(*left_join(relvar("DOCS"), rename(relvar("CON"), {{"Name", "Cntr.Name"}}), {{"Cntr", "OID"}}),
                             [&](const std::string& n) { return env.schema_of(n); });
  CHECK(schema == r.schema());
}
