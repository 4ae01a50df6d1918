#include "rxo/core/relation.hpp"
#include "rxo/error.hpp"

#include <doctest.h>

using namespace rxo;

TEST_CASE("dates parse in both the dotted and ISO spelling") {
  auto dotted = parse_date("2010.01.01");
  auto iso = parse_date("2010-01-01");
  REQUIRE(dotted);
  REQUIRE(iso);
  CHECK(*dotted == *iso);
  CHECK(format_date(*dotted) == "2010-01-01");
  CHECK(format_date(*parse_date("1969-12-31")) == "1969-12-31");
  CHECK(format_date(*parse_date("2024-02-29")) == "2024-02-29");
  CHECK_FALSE(parse_date("2023-02-29"));
  CHECK_FALSE(parse_date("2010-13-01"));
  CHECK_FALSE(parse_date("2010/01/01"));
}

TEST_CASE("value ordering is total and NULL equals NULL for set purposes") {
  CHECK(Value::null() == Value::null());
  CHECK(Value::null() < Value::integer(0));
  CHECK(Value::integer(1) < Value::integer(2));
  CHECK(Value::string("a") != Value::integer(1));
  CHECK(Value::oid({3}).to_display() == "@3");
  CHECK(Value::real(1520).to_display() == "1520");
  CHECK(Value::real(1.5).to_literal() == "1.5");
  CHECK(Value::real(2).to_literal() == "2.0");
}

TEST_CASE("relations drop duplicates and check domains") {
  Schema s{{"i", Domain::Integer}, {"f", Domain::Float}};
  Relation r(s);
  r.insert({Value::integer(1), Value::integer(2)});
  r.insert({Value::integer(1), Value::real(2.0)});
  CHECK(r.size() == 1);
  CHECK(r.tuples().begin()->at(1).domain() == Domain::Float);
  CHECK_THROWS_AS(r.insert({Value::string("x"), Value::null()}), Error);
  CHECK_THROWS_AS(r.insert({Value::integer(1)}), Error);
  CHECK_THROWS_AS(Schema({{"a", Domain::Integer}, {"a", Domain::String}}), Error);
}

TEST_CASE("conform reorders by name and widens numbers") {
  Relation r(Schema{{"b", Domain::Integer}, {"a", Domain::String}}, {{Value::integer(1), Value::string("x")}});
  Relation c = conform(r, Schema{{"a", Domain::String}, {"b", Domain::Float}});
  CHECK(c.schema()[0].name == "a");
  CHECK(c.tuples().begin()->at(1) == Value::real(1.0));
  CHECK_THROWS_AS(conform(r, Schema{{"a", Domain::String}, {"z", Domain::Integer}}), Error);
}
