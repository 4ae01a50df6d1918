// Acceptance suite: one PASS/FAIL line per criterion.

#include "../support/algebra_oracle.hpp"
#include "../support/procgen.hpp"

#include "rxo/core/algebra.hpp"
#include "rxo/error.hpp"
#include "rxo/oo/parser.hpp"
#include "rxo/oo/session.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace rxo;

namespace {

using Row = std::vector<std::string>;
using Table = std::set<Row>;

struct Failure {
  std::string why;
};

void expect(bool ok, const std::string& why) {
  if (!ok) throw Failure{why};
}

Table table(const Relation& r) {
  Table out;
  for (const auto& t : r.tuples()) {
    Row row;
    for (const auto& v : t) row.push_back(v.is_null() ? "" : v.to_display());
    out.insert(row);
  }
  return out;
}

std::string show(const Table& t) {
  std::string s = "{";
  for (const auto& r : t) {
    s += "(";
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
    s += ")";
  }
  return s + "}";
}

void expect_table(const Table& got, const Table& want, const std::string& what) {
  expect(got == want, what + ": got " + show(got) + ", expected " + show(want));
}

std::vector<oo::ParsedCommand> golden_prefix(const std::string& stop) {
  std::ifstream in(RXO_GOLDEN_DIR "/trade_example.rxo");
  std::stringstream ss;
  ss << in.rdbuf();
  auto cmds = oo::parse_script(ss.str());
  if (stop.empty()) return cmds;
  for (std::size_t i = 0; i < cmds.size(); ++i)
    if (cmds[i].source.rfind(stop, 0) == 0) return {cmds.begin(), cmds.begin() + i};
  throw Failure{"marker not found: " + stop};
}

oo::Session golden(const std::string& stop) {
  oo::Session s;
  for (const auto& c : golden_prefix(stop)) s.execute(c.command);
  return s;
}

Relation query(oo::Session& s, const std::string& text) { return s.execute_text(text).back(); }

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

const char* kFirstQuery = R"(SELECT #S.DocN, #S.Comment, #S.Items.Art, #S.Items.Pieces FROM DOCS<DocN LIKE "%1"> #S;)";
const char* kGoods = "SELECT #g.Art, #g.Turnover.DocN, #g.Turnover.Pieces FROM GOODS #g;";
const char* kPieces = "SELECT #g.Art, #g.Pieces FROM GOODS #g;";
const char* kAmount = "SELECT #vr.Amount FROM VALUERECORDS #vr;";

// ---- criteria ----

void criterion1() {
  auto s = golden("ALTER BANKS");
  expect(query(s, kFirstQuery).empty(), "first query is not empty before implementation");
}

void criterion2() {
  auto s = golden("CLASS VALUERECORDS");
  expect_table(table(query(s, kGoods)), {{"Axe", "Ship1", "2"}, {"Axe", "Ship2", "5"}, {"Tie", "Ship2", "10"}},
               "GOODS.Turnover");
  expect_table(table(query(s, kPieces)), {{"Axe", "7"}, {"Tie", "10"}}, "GOODS.Pieces");
  expect_table(table(query(s, kFirstQuery)), {{"Ship1", "", "Axe", "2"}}, "first query");
}

void check_after_sale(oo::Session& s) {
  expect_table(table(query(s, kFirstQuery)),
               {{"Ship1", "Shipped!", "Axe", "2"}, {"Sale1", "Sold!", "Tie", "50"}, {"Sale1", "Sold!", "Axe", "50"}},
               "second query");
  auto amount = query(s, kAmount);
  expect(amount.size() == 1, "Amount has " + std::to_string(amount.size()) + " rows");
  const auto& v = amount.tuples().begin()->at(0);
  expect(!v.is_null() && std::fabs(v.as_number() - 1520.0) < 1e-9, "Amount is " + v.to_display());
  expect_table(table(query(s, kPieces)), {{"Axe", "57"}, {"Tie", "60"}}, "GOODS.Pieces");
}

void criterion3() {
  auto s = golden("");
  check_after_sale(s);
}

void criterion4() {
  auto s = golden("");
  expect_table(table(query(s, R"(SELECT #gt.DocN, #gt.Cntr.Name, #gt.Cntr.Bank.Name
                                FROM GOODS<.Art LIKE "A%">.Turnover #gt;)")),
               {{"Ship1", "TheShop", "TheBank"}, {"Ship2", "TheShop", "TheBank"}, {"Sale1", "TheRetail", "TheBank"}},
               "Turnover references");
  expect_table(table(query(s, R"(SELECT #d.DocN, #d.Items.Art, #d.Items.Pieces
                                FROM DOCS[.Cntr.Name = "TheRetail"] #d;)")),
               {{"Ship3", "", ""}, {"Sale1", "Axe", "50"}, {"Sale1", "Tie", "50"}}, "documents of TheRetail");
}

constexpr int kInstances = 250;

void criterion5() {
  for (int seed = 1; seed <= kInstances; ++seed) {
    auto in = procgen::make_instance(seed);
    oo::Session group, seq;
    group.execute_text(procgen::setup_script(in));
    seq.execute_text(procgen::setup_script(in));
    group.execute_text(procgen::group_call(in));
    for (auto i : in.order) seq.execute_text(procgen::single_call(in, in.objects[i]));
    auto tag = "instance " + std::to_string(seed);
    expect(prs::equivalent(group.database(), seq.database()), tag + ": group and sequential databases differ");
    expect_table(table(query(group, procgen::kStateQuery)), procgen::expected_rows(in), tag + " vs interpreter");
  }
}

void criterion6() {
  std::vector<std::string> violations;
  std::size_t frames = 0;
  auto watch = [&](oo::Session& s) {
    s.set_observer([&](const prs::Frame& f) {
      if (f.locals.count("__branches")) ++frames;
      auto v = procgen::partition_violation(f);
      if (!v.empty()) violations.push_back(v);
    });
  };
  {
    oo::Session s;
    watch(s);
    for (const auto& c : golden_prefix("")) s.execute(c.command);
    s.execute_text("EXEC DOCS.DoShip(DATE '2010-02-01');");
  }
  for (int seed = 1; seed <= kInstances; ++seed) {
    auto in = procgen::make_instance(seed);
    oo::Session s;
    s.execute_text(procgen::setup_script(in));
    watch(s);
    s.execute_text(procgen::group_call(in));
    for (auto i : in.order) s.execute_text(procgen::single_call(in, in.objects[i]));
  }
  expect(frames > 0, "no procedure frames observed");
  expect(violations.empty(), std::to_string(violations.size()) + " violations, first: " +
                                 (violations.empty() ? "" : violations.front()));
}

void criterion7() {
  auto s = golden("CLASS VALUERECORDS");
  auto before = s.database();
  auto hat = code_of([&] {
    s.execute_text(R"(INSERT INTO DOCS<.DocN = "Ship2">.Items (Art, Pieces) VALUES ("Hat", 1);)");
  });
  expect(hat == ErrorCode::ForeignKeyViolation, "Hat insert did not raise ForeignKeyViolation");
  expect(prs::equivalent(s.database(), before), "Hat insert changed the database");
  auto dup = code_of([&] { s.execute_text(R"(NEW GOODS WITH SET .Art := "Axe";)"); });
  expect(dup == ErrorCode::KeyViolation, "duplicate GOODS did not raise KeyViolation");
  expect(prs::equivalent(s.database(), before), "duplicate GOODS changed the database");
  expect(s.database().next_oid == before.next_oid, "duplicate GOODS consumed an OID");
}

std::uint64_t max_oid(const prs::Database& db) {
  std::uint64_t m = 0;
  for (const auto& [name, rel] : db.stored)
    for (const auto& t : rel->tuples())
      for (const auto& v : t)
        if (!v.is_null() && v.domain() == Domain::Oid) m = std::max(m, v.as_oid().id);
  return m;
}

void criterion8() {
  auto s = golden("");
  auto dir = std::filesystem::temp_directory_path() / "rxo_acceptance_db";
  std::filesystem::remove_all(dir);
  s.save(dir);
  auto t = oo::Session::load(dir);
  std::filesystem::remove_all(dir);
  expect(prs::equivalent(s.database(), t.database()), "loaded database differs");
  check_after_sale(t);
  for (const char* q : {kFirstQuery, kAmount, kPieces})
    expect(table(query(s, q)) == table(query(t, q)), std::string("results differ for ") + q);
  auto loaded_max = max_oid(t.database());
  t.execute_text(R"(NEW GOODS WITH SET .Art := "Hat";)");
  auto fresh = query(t, R"(SELECT #g FROM GOODS<.Art = "Hat"> #g;)");
  expect(fresh.size() == 1, "new object not found");
  auto id = fresh.tuples().begin()->at(0).as_oid().id;
  expect(id > loaded_max, "new OID " + std::to_string(id) + " not above " + std::to_string(loaded_max));
}

void criterion9() {
  namespace orc = rxo::oracle;
  const Schema ab{{"a", Domain::Integer}, {"b", Domain::String}};
  const Schema cd{{"c", Domain::Integer}, {"d", Domain::String}};
  std::mt19937 rng(583);
  for (int n = 0; n < 1000; ++n) {
    auto tag = "case " + std::to_string(n) + ": ";
    MapEnv env;
    Relation x = orc::random_relation(rng, ab), y = orc::random_relation(rng, ab), z = orc::random_relation(rng, ab),
             w = orc::random_relation(rng, cd);
    env.bind("X", x);
    env.bind("Y", y);
    env.bind("Z", z);
    env.bind("W", w);
    auto X = relvar("X"), Y = relvar("Y"), Z = relvar("Z"), W = relvar("W");
    auto ev = [&](const AlgebraPtr& e) { return eval_algebra(*e, env); };
    auto bx = orc::as_bag(x), by = orc::as_bag(y), bw = orc::as_bag(w);

    expect(orc::same_set(orc::unite(bx, by), ev(union_of(X, Y))), tag + "union oracle");
    expect(orc::same_set(orc::minus(bx, by), ev(difference(X, Y))), tag + "difference oracle");
    expect(orc::same_set(orc::meet(bx, by), ev(intersect(X, Y))), tag + "intersection oracle");
    expect(orc::same_set(orc::cross(bx, bw), ev(product(X, W))), tag + "product oracle");
    expect(orc::same_set(orc::equi_join(bx, bw, 0, 0, 2, false), ev(join(X, W, {{"a", "c"}}))), tag + "join oracle");
    expect(orc::same_set(orc::equi_join(bx, bw, 1, 1, 2, true), ev(left_join(X, W, {{"b", "d"}}))),
           tag + "left join oracle");
    expect(orc::same_set(orc::filter(bx, [](const Tuple& t) { return !t[0].is_null() && t[0].as_integer() > 1; }),
                         ev(select(X, binary(BinaryOp::Gt, attr("a"), lit(Value::integer(1)))))),
           tag + "selection oracle");
    expect(orc::same_set(orc::pick(bx, {1}), ev(project(X, std::vector<std::string>{"b"}))), tag + "projection oracle");

    expect(ev(union_of(X, Y)) == ev(union_of(Y, X)), tag + "union commutativity");
    expect(ev(union_of(union_of(X, Y), Z)) == ev(union_of(X, union_of(Y, Z))), tag + "union associativity");
    auto pb = project(X, std::vector<std::string>{"b"});
    expect(ev(project(pb, std::vector<std::string>{"b"})) == ev(pb), tag + "projection idempotence");
    auto p1 = binary(BinaryOp::Ge, attr("a"), lit(Value::integer(1)));
    auto p2 = binary(BinaryOp::Ne, attr("b"), lit(Value::string("q")));
    expect(ev(select(select(X, p1), p2)) == ev(select(X, binary(BinaryOp::And, p1, p2))), tag + "selection cascade");
    expect(ev(rename(rename(X, {{"a", "z"}}), {{"z", "a"}})) == ev(X), tag + "rename inverse");
    expect(ev(union_of(difference(X, Y), intersect(X, Y))) == ev(X), tag + "difference/intersection split");
    expect(ev(intersect(difference(X, Y), Y)).empty(), tag + "difference disjointness");
  }
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    void (*run)();
    double budget_ms; // 0: no time limit
  };
  const Criterion criteria[] = {
      {1, "first query is empty before implementation", criterion1, 1000},
      {2, "state after shipments", criterion2, 1000},
      {3, "state after sale and DoShip", criterion3, 2000},
      {4, "queries on and against references", criterion4, 0},
      {5, "group execution equals sequential execution (250 instances)", criterion5, 60000},
      {6, "branch sets partition every group", criterion6, 0},
      {7, "constraint violations roll back", criterion7, 0},
      {8, "persistence round trip", criterion8, 0},
      {9, "algebra laws and oracle (1000 cases)", criterion9, 30000},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string why;
    try {
      c.run();
    } catch (const Failure& f) {
      why = f.why;
    } catch (const std::exception& e) {
      why = std::string("unexpected error: ") + e.what();
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (why.empty() && c.budget_ms > 0 && ms > c.budget_ms)
      why = "took " + std::to_string(ms) + " ms, budget " + std::to_string(c.budget_ms) + " ms";
    std::cout << (why.empty() ? "PASS" : "FAIL") << " " << c.id << " " << c.name << " (" << static_cast<long>(ms)
              << " ms)";
    if (!why.empty()) std::cout << ": " << why;
    std::cout << "\n";
    failed += !why.empty();
  }
  return failed == 0 ? 0 : 1;
}
