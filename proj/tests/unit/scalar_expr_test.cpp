#include "rxo/core/scalar_expr.hpp"
#include "rxo/error.hpp"

#include <doctest.h>

using namespace rxo;

namespace {
const Schema docs{{"DocN", Domain::String}, {"Date", Domain::DateTime}, {"Pieces", Domain::Integer}};
Tuple row(const char* docn, Value date, Value pieces) { return {Value::string(docn), date, pieces}; }
} // namespace

TEST_CASE("IS NULL on a NULL attribute is TRUE") {
  auto e = is_null(attr("Date"));
  CHECK(eval_scalar(*e, row("Ship1", Value::null(), Value::null()), docs) == Value::boolean(true));
  CHECK(eval_scalar(*e, row("Ship1", Value::date(*parse_date("2010-01-01")), Value::null()), docs) ==
        Value::boolean(false));
}

TEST_CASE("LIKE with a leading percent wildcard") {
  auto e = binary(BinaryOp::Like, attr("DocN"), lit(Value::string("%1")));
  CHECK(eval_scalar(*e, row("Ship1", Value(), Value()), docs) == Value::boolean(true));
  CHECK(eval_scalar(*e, row("Ship2", Value(), Value()), docs) == Value::boolean(false));
  CHECK(like_match("Axe", "A%"));
  CHECK(like_match("Axe", "A_e"));
  CHECK_FALSE(like_match("Tie", "A%"));
  CHECK(like_match("", "%"));
  CHECK(like_match("abcabc", "%bc"));
}

TEST_CASE("arithmetic and comparison propagate NULL") {
  Schema s{{"x", Domain::Integer}};
  CHECK(eval_scalar(*binary(BinaryOp::Add, lit(Value::integer(5)), lit(Value())), {Value()}, s).is_null());
  CHECK(eval_scalar(*binary(BinaryOp::Eq, attr("x"), attr("x")), {Value()}, s).is_null());
  CHECK_FALSE(holds(Value()));
  // Kleene short-circuit
  CHECK(eval_scalar(*binary(BinaryOp::And, lit(Value::boolean(false)), lit(Value())), {}, Schema{}) ==
        Value::boolean(false));
  CHECK(eval_scalar(*binary(BinaryOp::Or, lit(Value::boolean(true)), lit(Value())), {}, Schema{}) ==
        Value::boolean(true));
}

TEST_CASE("mixed numeric arithmetic widens to FLOAT") {
  Schema s;
  auto e = binary(BinaryOp::Mul, lit(Value::integer(3)), lit(Value::real(0.5)));
  CHECK(infer_domain(*e, s) == Domain::Float);
  CHECK(eval_scalar(*e, {}, s) == Value::real(1.5));
  CHECK(eval_scalar(*binary(BinaryOp::Div, lit(Value::integer(7)), lit(Value::integer(2))), {}, s) ==
        Value::integer(3));
}

TEST_CASE("type and runtime errors") {
  Schema s{{"n", Domain::String}};
  CHECK_THROWS_AS(compile(*binary(BinaryOp::Sub, attr("n"), lit(Value::integer(1))), s), Error);
  try {
    compile(*attr("missing"), s);
    FAIL("expected UnknownAttribute");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownAttribute);
  }
  try {
    eval_scalar(*binary(BinaryOp::Div, lit(Value::integer(1)), lit(Value::integer(0))), {}, Schema{});
    FAIL("expected DivisionByZero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivisionByZero);
  }
}

TEST_CASE("date comparison against a quoted literal") {
  auto e = binary(BinaryOp::Ge, attr("Date"), lit(Value::string("2010.01.01")));
  CHECK(eval_scalar(*e, row("a", Value::date(*parse_date("2010-02-01")), Value()), docs) == Value::boolean(true));
  CHECK(eval_scalar(*e, row("a", Value::date(*parse_date("2009-12-31")), Value()), docs) == Value::boolean(false));
}

TEST_CASE("CASE picks the first satisfied branch") {
  Schema s{{"t", Domain::Integer}};
  auto e = case_when({{is_null(attr("t")), lit(Value::integer(0))}}, attr("t"));
  CHECK(eval_scalar(*e, {Value()}, s) == Value::integer(0));
  CHECK(eval_scalar(*e, {Value::integer(7)}, s) == Value::integer(7));
}

TEST_CASE("printing quotes dotted names") {
  auto e = binary(BinaryOp::Eq, attr("Items.Art"), lit(Value::string("Tie")));
  CHECK(to_string(*e) == "(`Items.Art` = \"Tie\")");
  CHECK(referenced_attributes(*e) == std::set<std::string>{"Items.Art"});
}
