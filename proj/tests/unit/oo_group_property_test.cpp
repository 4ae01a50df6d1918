#include "rxo/oo/session.hpp"

#include "../support/oo_util.hpp"
#include "../support/procgen.hpp"
#include "../support/test_util.hpp"

#include <doctest.h>

using namespace rxo;
using namespace rxo::testing;
using rxo::oo::Session;

namespace {

constexpr int kInstances = 250;

struct Outcome {
  Table rows;
  prs::Database db;
  std::vector<std::string> violations;
};

Outcome run_instance(const procgen::Instance& in, bool grouped) {
  oo::Session s;
  s.execute_text(procgen::setup_script(in));
  Outcome out;
  s.set_observer([&](const prs::Frame& f) {
    auto v = procgen::partition_violation(f);
    if (!v.empty()) out.violations.push_back(v);
  });
  if (grouped) {
    s.execute_text(procgen::group_call(in));
  } else {
    for (auto i : in.order) s.execute_text(procgen::single_call(in, in.objects[i]));
  }
  out.rows = table(query(s, procgen::kStateQuery));
  out.db = s.database();
  return out;
}

} // namespace

TEST_CASE("group execution equals sequential execution and the reference interpreter") {
  for (int seed = 1; seed <= kInstances; ++seed) {
    auto in = procgen::make_instance(seed);
    CAPTURE(seed);
    INFO(procgen::setup_script(in));
    auto group = run_instance(in, true);
    auto seq = run_instance(in, false);
    CHECK(group.rows == procgen::expected_rows(in));
    CHECK(seq.rows == group.rows);
    CHECK(prs::equivalent(group.db, seq.db));
    CHECK(group.violations.empty());
    CHECK(seq.violations.empty());
  }
}

TEST_CASE("branch sets partition the group in the golden methods") {
  Session s = golden_session("EXEC DOCS");
  std::vector<std::string> violations;
  int frames = 0;
  s.set_observer([&](const prs::Frame& f) {
    if (f.locals.count("__branches")) ++frames;
    auto v = procgen::partition_violation(f);
    if (!v.empty()) violations.push_back(v);
  });
  s.execute_text(R"(EXEC DOCS<DocN LIKE "%1">.DoShip(DATE '2024-01-15');)");
  s.execute_text(R"(EXEC DOCS.DoShip(DATE '2024-02-01');)");
  CHECK(frames > 0);
  CHECK(violations.empty());
}

TEST_CASE("a loop runs each object until its own exit") {
  oo::Session s;
  s.execute_text(R"(CLASS W (Id INTEGER, N INTEGER, Steps INTEGER, Drain()) KEY (Id);
ALTER W REALIZE Id, N, Steps AS STORED;
ALTER W REALIZE Drain() AS {
  Steps := 0;
  WHILE (N > 0) DO BEGIN
    N := N - 1;
    Steps := Steps + 1;
  END
};
NEW W WITH SET .Id := 1, .N := 0;
NEW W WITH SET .Id := 2, .N := 2;
NEW W WITH SET .Id := 3, .N := 3;
EXEC W.Drain();)");
  CHECK(table(query(s, "SELECT #w.Id, #w.N, #w.Steps FROM W #w;")) ==
        Table{{"1", "0", "0"}, {"2", "0", "2"}, {"3", "0", "3"}});
}

TEST_CASE("a failing constructor leaves no trace of the new object") {
  for (int seed = 1; seed <= 20; ++seed) {
    Session s = golden_session("");
    auto before = s.database();
    // The nested object is created first, then the outer key collides.
    auto cmd = R"(NEW SALES WITH SET .DocN := "Sale1", .Cntr := (NEW CONTRACTORS WITH SET .Name := "C)" +
               std::to_string(seed) + R"(");)";
    CHECK(code_of([&] { s.execute_text(cmd); }) == ErrorCode::KeyViolation);
    CHECK(prs::equivalent(s.database(), before));
    CHECK(s.database().next_oid == before.next_oid);
  }
}

TEST_CASE("every object of a declaring class lies in exactly one implementation scope") {
  Session s = golden_session("");
  const auto& cat = s.catalog();
  for (const auto& cls : cat.class_names()) {
    auto objects = table(s.machine().get(*rxo::project(relvar(oo::real_relvar(cls)), std::vector<std::string>{"OID"})));
    for (const auto& member : cat.class_def(cls).own) {
      std::map<Row, int> hits;
      for (const auto* impl : cat.implementations_of(cls, member.name))
        for (const auto& row : table(s.machine().get(*cat.scope_of(*impl)))) ++hits[row];
      for (const auto& o : objects) {
        CAPTURE(cls);
        CAPTURE(member.name);
        CHECK(hits[o] == 1);
      }
    }
  }
}
