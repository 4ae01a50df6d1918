#include "rxo/prs/machine.hpp"
#include "rxo/prs/persistence.hpp"
#include "rxo/prs/syntax.hpp"

#include "../support/test_util.hpp"

#include <filesystem>
#include <fstream>

#include <unistd.h>

using namespace rxo;
using namespace rxo::prs;
using rxo::testing::code_of;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("rxo_persist_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Machine sample() {
  Machine m;
  m.execute(parse_commands(R"(
    CREATE R_GOODS (Art:STRING, Price:FLOAT) KEY (Art);
    CREATE `real_R_DOCS.Items` (OID:dOID, Art:STRING, Pieces:INTEGER, Note:STRING, D:DATETIME, B:BOOLEAN)
      KEY (OID, Art) FKEY (Art) ON R_GOODS (Art);
    CREATE `R_DOCS.Items` AS `real_R_DOCS.Items`[OID, Art, Pieces];
    TRANS `DOCS.Add'` (x (Art:STRING, Price:FLOAT)) AS BEGIN INSERT R_GOODS x; END;
    INSERT R_GOODS VALUES (Art:STRING, Price:FLOAT) {("Axe", 0.1), ("Tie", 1e300), ("Tab\tNew\nSlash\\", -2.0)};
    EXEC BEGIN
      ALLOC n FROM VALUES (Art:STRING) {("Axe")};
      INSERT `real_R_DOCS.Items` n[new_oid AS OID, Art, 2 AS Pieces, NULL AS Note, DATE '2010-01-01' AS D, TRUE AS B];
    END;
  )"));
  m.set_catalog_payload("class A\n  member b\n");
  return m;
}

} // namespace

TEST_CASE("save and load round trip") {
  TempDir dir;
  Machine m = sample();
  save_database(m.database(), dir.path);
  Database loaded = load_database(dir.path);
  CHECK(equivalent(m.database(), loaded));
  CHECK(loaded.next_oid == 2);
  CHECK(loaded.catalog_payload == "class A\n  member b\n");
  // a second save of the loaded value produces identical files
  TempDir again;
  save_database(loaded, again.path);
  for (const auto& e : fs::directory_iterator(dir.path)) {
    std::ifstream a(e.path()), b(again.path / e.path().filename());
    std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
  }
}

TEST_CASE("load of an empty directory") {
  TempDir dir;
  CHECK(code_of([&] { load_database(dir.path); }) == ErrorCode::FormatError);
  CHECK(code_of([&] { load_database(dir.path / "missing"); }) == ErrorCode::IoError);
}

TEST_CASE("saved files are isolated from later mutation") {
  TempDir dir;
  Machine m = sample();
  Database snapshot = m.database();
  save_database(m.database(), dir.path);
  m.execute(parse_commands(R"(DELETE R_GOODS R_GOODS WHERE Art = "Tie";)"));
  CHECK_FALSE(equivalent(snapshot, m.database()));
  CHECK(equivalent(snapshot, load_database(dir.path)));
}

TEST_CASE("malformed files report their line") {
  TempDir dir;
  save_database(sample().database(), dir.path);
  {
    std::ofstream out(dir.path / "R_GOODS.tuples", std::ios::app);
    out << "Hat\tnot-a-number\n";
  }
  try {
    load_database(dir.path);
    FAIL("expected FormatError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FormatError);
    CHECK(e.detail().find("R_GOODS.tuples line 5") != std::string::npos);
  }
  {
    std::ofstream out(dir.path / "catalog.txt");
    out << "RXO-DATABASE 1\nBOGUS\nEND\n";
  }
  CHECK(code_of([&] { load_database(dir.path); }) == ErrorCode::FormatError);
}
