#include "rxo/prs/syntax.hpp"

#include "../support/test_util.hpp"

using namespace rxo;
using namespace rxo::prs;
using rxo::testing::code_of;

namespace {
std::string reprint(const std::string& text) { return to_text(*parse_algebra(text)); }
} // namespace

TEST_CASE("algebra text round trips") {
  const char* samples[] = {
      "R",
      "(R UNION S)",
      "((R JOIN S ON (OID = OID)) MINUS T)",
      "(R LEFT JOIN `R_DOCS.Items` ON (OID = OID, a = b))",
      "(R[a, (b * 2) AS c])",
      "(R WHERE ((a = 1) AND (b LIKE \"A%\")))",
      "(R RENAME a AS b, c AS d)",
      "(R GROUP BY (a) AGG (SUM((x * y)) AS s, COUNT(*) AS n))",
      "VALUES (a:INTEGER, b:FLOAT, c:DATETIME) {(1, 2.5, DATE '2010-01-01'), (2, -0.5, NULL)}",
      "(R[CASE WHEN (a IS NULL) THEN b ELSE a END AS a])",
      "(R[(- a) AS n, -3 AS m])",
  };
  for (const char* s : samples) {
    CAPTURE(s);
    CHECK(reprint(s) == s);
  }
}

TEST_CASE("infix operators associate left with postfix binding tightest") {
  CHECK(reprint("R UNION S MINUS T") == "((R UNION S) MINUS T)");
  CHECK(reprint("R JOIN S ON a = b UNION T") == "((R JOIN S ON (a = b)) UNION T)");
  CHECK(reprint("R TIMES S WHERE x = 1") == "(R TIMES (S WHERE (x = 1)))");
  CHECK(reprint("R WHERE x = 1 [a]") == "((R WHERE (x = 1))[a])");
}

TEST_CASE("scalar precedence") {
  CHECK(to_string(*parse_scalar("a + b * c = d OR NOT e AND f")) == "(((a + (b * c)) = d) OR ((NOT e) AND f))");
  CHECK(to_string(*parse_scalar("a - -1")) == "(a - -1)");
}

TEST_CASE("dotted and quoted names") {
  CHECK(reprint("R_DOCS.Items[Art]") == "(`R_DOCS.Items`[Art])");
  CHECK(reprint("`DOCS.DoShip'`") == "`DOCS.DoShip'`");
  CHECK(reprint("R[`WHERE`]") == "(R[`WHERE`])");
  CHECK(reprint("R[Date]") == "(R[Date])");
}

TEST_CASE("commands round trip") {
  const char* text =
      "CREATE R_DOCS (OID:dOID, DocN:STRING) KEY (OID) KEY (DocN) FKEY (OID) ON T (OID);"
      " CREATE V (a:INTEGER) AS (R[a]);"
      " SET R := (R UNION S);"
      " INSERT R S;"
      " DELETE R S;"
      " GET R;"
      " TRANS t (x (a:INTEGER), y ()) AS BEGIN LOCAL l (a:INTEGER) := x; IF EXISTS l THEN BEGIN INSERT R l; END;"
      " WHILE EXISTS (l WHERE (a < 3)) DO BEGIN SET l := (l[(a + 1) AS a]); END; END;"
      " EXEC t (R, VALUES () {()});"
      " EXEC BEGIN ALLOC n FROM R; ASSERT ONE n ERROR FirstOfCardinality \"one \\\"row\\\"\"; END;";
  auto cmds = parse_commands(text);
  REQUIRE(cmds.size() == 9);
  std::string printed;
  for (const auto& c : cmds) printed += (printed.empty() ? "" : " ") + to_text(c);
  CHECK(printed == text);
}

TEST_CASE("malformed input") {
  CHECK(code_of([] { parse_commands("GET R"); }) == ErrorCode::UnterminatedCommand);
  CHECK(code_of([] { parse_commands("GET R WHERE;"); }) == ErrorCode::SyntaxError);
  CHECK(code_of([] { parse_commands("FETCH R;"); }) == ErrorCode::SyntaxError);
  CHECK(code_of([] { parse_commands("GET \"open;"); }) == ErrorCode::SyntaxError);
  CHECK(code_of([] { parse_algebra("R[a + 1]"); }) == ErrorCode::SyntaxError);
  CHECK(code_of([] { parse_algebra("VALUES (a:INTEGER) {(\"x\")}"); }) == ErrorCode::SyntaxError);
  try {
    parse_commands("GET R;\nGET R ?;");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.detail().find("line 2, column 7") != std::string::npos);
  }
}
