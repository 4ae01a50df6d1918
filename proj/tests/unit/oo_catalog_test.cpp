#include "rxo/oo/catalog.hpp"
#include "rxo/oo/parser.hpp"
#include "rxo/prs/syntax.hpp"

#include "../support/test_util.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace rxo;
using namespace rxo::oo;
using rxo::testing::code_of;

namespace {

const char* kTradeClasses = R"(
CLASS BANKS ( Name STRING );
CLASS CONTRACTORS ( Name STRING, Bank BANKS, ID STRING ) KEY (ID);
CLASS GOODS ( Art STRING, Turnover SET OF ( DocN STRING, Cntr CONTRACTORS, Pieces INTEGER ) KEY (DocN),
              Pieces INTEGER ) KEY (Art);
CLASS DOCS ( DocN STRING, Date DATETIME, Comment STRING, Cntr CONTRACTORS, DoShip(inDate DATETIME),
             Items SET OF ( Art STRING, Pieces INTEGER ) KEY (Art) ) KEY (DocN)
  REFERENCE Items (.Art) ON GOODS (.Art);
CLASS VALUERECORDS ( Amount FLOAT );
CLASS SALES EXTEND DOCS, VALUERECORDS
  ( SaleItems SET OF ( Art STRING, Price INTEGER, Pieces INTEGER ) KEY (Art, Price) );
)";

void define_all(Catalog& cat, const std::string& script) {
  for (const auto& pc : parse_script(script)) cat.define_class(std::get<ClassCreate>(pc.command));
}

Catalog trade_catalog() {
  Catalog cat;
  define_all(cat, kTradeClasses);
  return cat;
}

void realize(Catalog& cat, const std::string& text) {
  auto r = std::get<Realize>(parse_command(text));
  for (const auto& m : r.members) cat.register_implementation(r.class_name, m, r.body, r.params);
}

std::vector<std::string> names_of(const std::vector<MemberSpec>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.name);
  return out;
}

std::vector<StepKind> kinds(const ResolvedPath& rp) {
  std::vector<StepKind> out;
  for (const auto& s : rp.steps) out.push_back(s.kind);
  return out;
}

Value oid(std::uint64_t n) { return Value::oid({n}); }

Relation oids(std::initializer_list<std::uint64_t> ns) {
  Relation r(Schema{{"OID", Domain::Oid}});
  for (auto n : ns) r.insert({oid(n)});
  return r;
}

} // namespace

TEST_CASE("multiple inheritance unites specifications") {
  Catalog cat = trade_catalog();
  auto sales = names_of(cat.effective_members("SALES"));
  CHECK(sales == std::vector<std::string>{"DocN", "Date", "Comment", "Cntr", "DoShip", "Items", "Amount", "SaleItems"});
  CHECK(std::count(sales.begin(), sales.end(), "DoShip") == 1);
  CHECK(cat.find_member("SALES", "Items")->declared_in == "DOCS");
  CHECK(cat.find_member("SALES", "Amount")->declared_in == "VALUERECORDS");
  CHECK(cat.class_def("SALES").own.size() == 1);
  CHECK(cat.ancestors("SALES") == std::vector<std::string>{"DOCS", "VALUERECORDS"});
  CHECK(cat.descendants("DOCS") == std::vector<std::string>{"SALES"});
  CHECK(cat.class_names() == std::vector<std::string>{"BANKS", "CONTRACTORS", "GOODS", "DOCS", "VALUERECORDS", "SALES"});
}

TEST_CASE("class without components") {
  Catalog cat;
  define_all(cat, "CLASS EMPTY ();");
  CHECK(cat.effective_members("EMPTY").empty());
  CHECK(cat.fully_implemented("EMPTY"));
}

TEST_CASE("identical declarations from two parents merge") {
  Catalog cat;
  define_all(cat, "CLASS A ( Name STRING ); CLASS B ( Name STRING, X INTEGER ); CLASS C EXTEND A, B ();"
                  "CLASS D EXTEND A ( Name STRING );");
  CHECK(names_of(cat.effective_members("C")) == std::vector<std::string>{"Name", "X"});
  CHECK(names_of(cat.effective_members("D")) == std::vector<std::string>{"Name"});
  CHECK(cat.class_def("D").own.empty());
}

TEST_CASE("diamond inheritance lists the shared member once") {
  Catalog cat;
  define_all(cat, "CLASS TOP ( T INTEGER ); CLASS L EXTEND TOP ( A INTEGER ); CLASS R EXTEND TOP ( B INTEGER );"
                  "CLASS BOTTOM EXTEND L, R ();");
  CHECK(names_of(cat.effective_members("BOTTOM")) == std::vector<std::string>{"T", "A", "B"});
  CHECK(cat.ancestors("BOTTOM") == std::vector<std::string>{"L", "R", "TOP"});
}

TEST_CASE("class definition errors") {
  Catalog cat = trade_catalog();
  auto define = [&](const char* text) { return code_of([&] { define_all(cat, text); }); };
  CHECK(define("CLASS BANKS ( X INTEGER );") == ErrorCode::DuplicateClass);
  CHECK(define("CLASS X EXTEND NOPE ();") == ErrorCode::UnknownParent);
  CHECK(define("CLASS X ( Bank SHOPS );") == ErrorCode::UnknownReferencedClass);
  CHECK(define("CLASS X ( S SET OF ( a NOWHERE ) );") == ErrorCode::UnknownReferencedClass);
  CHECK(define("CLASS X ( a INTEGER, a INTEGER );") == ErrorCode::MemberConflict);
  CHECK(define("CLASS X EXTEND DOCS ( DocN INTEGER );") == ErrorCode::MemberConflict);
  CHECK(define("CLASS P1 ( Name STRING ); CLASS P2 ( Name INTEGER ); CLASS X EXTEND P1, P2 ();") ==
        ErrorCode::MemberConflict);
  CHECK(define("CLASS X EXTEND DOCS ( Extra STRING ) KEY (DocN);") == ErrorCode::UnknownMember);
  CHECK(define("CLASS X ( S SET OF ( a INTEGER ) ) KEY (S);") == ErrorCode::KindMismatch);
  CHECK(define("CLASS X ( S SET OF ( a INTEGER ) KEY (b) );") == ErrorCode::UnknownMember);
  CHECK(define("CLASS X ( S SET OF ( a INTEGER ) ) REFERENCE S (.a) ON NOPE (.a);") == ErrorCode::UnknownReferencedClass);
  CHECK(define("CLASS X ( S SET OF ( a INTEGER ) ) REFERENCE S (.a) ON GOODS (.Art);") == ErrorCode::KindMismatch);
  CHECK(define("CLASS X ( S SET OF ( a STRING ) ) REFERENCE S (.a) ON GOODS (.Turnover);") == ErrorCode::UnknownMember);
  // failed definitions leave no trace
  CHECK_FALSE(cat.has_class("X"));
  CHECK(cat.class_names().size() == 8); // P1 and P2 were accepted before X failed
}

TEST_CASE("self reference is allowed") {
  Catalog cat;
  define_all(cat, "CLASS NODE ( Label STRING, Next NODE );");
  auto rp = cat.resolve_path(parse_path("NODE.Next.Next.Label"), {});
  CHECK(kinds(rp) == std::vector<StepKind>{StepKind::ClassHead, StepKind::Reference, StepKind::Reference, StepKind::Scalar});
}

TEST_CASE("path resolution") {
  Catalog cat = trade_catalog();
  auto rp = cat.resolve_path(parse_path("DOCS.Cntr.Bank.Name"), {});
  CHECK(kinds(rp) == std::vector<StepKind>{StepKind::ClassHead, StepKind::Reference, StepKind::Reference, StepKind::Scalar});
  CHECK(rp.steps[1].type == "CONTRACTORS");
  CHECK(rp.steps[2].type == "BANKS");
  CHECK(rp.last().type == "STRING");
  CHECK(rp.terminal());

  auto cntr = cat.resolve_path(parse_path("DOCS.Cntr"), {});
  CHECK_FALSE(cntr.terminal());
  CHECK(cntr.scalar_valued());
  CHECK(cntr.object_class() == "CONTRACTORS");

  ResolveScope goods;
  goods.class_context = "GOODS";
  auto art = cat.resolve_path(parse_path("Art"), goods);
  CHECK(art.steps[0].name == "this");
  CHECK(art.last().kind == StepKind::Scalar);
  CHECK(art.last().type == "STRING");
  CHECK(art.last().owner == "GOODS");

  auto turnover = cat.resolve_path(parse_path("GOODS<.Art LIKE \"A%\">.Turnover.Cntr.Bank"), {});
  CHECK(kinds(turnover) == std::vector<StepKind>{StepKind::ClassHead, StepKind::Complex, StepKind::ComplexReference,
                                                 StepKind::Reference});

  auto sale = cat.resolve_path(parse_path("SALES.Items.Art"), {});
  CHECK(sale.last().kind == StepKind::ComplexAttribute);
  CHECK(sale.steps[1].owner == "DOCS");

  ResolveScope aliased;
  aliased.aliases["#S"] = cat.resolve_path(parse_path("DOCS<DocN LIKE \"%1\">"), {});
  CHECK(cat.resolve_path(parse_path("#S.Items.Pieces"), aliased).terminal());

  ResolveScope locals;
  locals.variables["c"] = "CONTRACTORS";
  locals.variables["n"] = "INTEGER";
  CHECK(cat.resolve_path(parse_path("c.Bank.Name"), locals).terminal());
  CHECK(code_of([&] { cat.resolve_path(parse_path("n.x"), locals); }) == ErrorCode::IllegalContinuation);
}

TEST_CASE("path resolution errors") {
  Catalog cat = trade_catalog();
  auto code = [&](const char* text) { return code_of([&] { cat.resolve_path(parse_path(text), {}); }); };
  CHECK(code("BANKS.Name.X") == ErrorCode::IllegalContinuation);
  CHECK(code("NOWHERE") == ErrorCode::UnknownName);
  CHECK(code("DOCS.Nope") == ErrorCode::UnknownName);
  CHECK(code("DOCS.DoShip") == ErrorCode::UnknownName);
  CHECK(code("DOCS.Items.Color") == ErrorCode::UnknownName);
  CHECK(code("DOCS.Items.Art.X") == ErrorCode::IllegalContinuation);
  CHECK(code("DOCS<.Items = 1>") == ErrorCode::NonScalarInCondition);
  CHECK(code("DOCS<.Nope = 1>") == ErrorCode::UnknownName);
  CHECK(code("DOCS.DocN<.x = 1>") == ErrorCode::IllegalContinuation);
  CHECK(code(".DocN") == ErrorCode::UnknownName);
  CHECK_NOTHROW(cat.resolve_path(parse_path("DOCS<.Cntr.Name = \"TheRetail\", DocN LIKE \"S%\">.Items<.Pieces >= 2>"), {}));
}

TEST_CASE("implementations") {
  Catalog cat = trade_catalog();
  realize(cat, "ALTER BANKS REALIZE Name AS STORED;");
  CHECK(cat.implementation("BANKS", "Name")->stored());
  realize(cat, "ALTER DOCS REALIZE Items AS STORED;");
  realize(cat, "ALTER SALES REALIZE Items AS SELECT Art, SUM(Pieces) FROM SaleItems GROUP BY Art;");
  const Implementation* over = cat.implementation("SALES", "Items");
  REQUIRE(over);
  CHECK(over->owner == "SALES");
  CHECK(std::holds_alternative<CalculatedBody>(over->body));
  CHECK(cat.implementations_of("DOCS", "Items").size() == 2);
  CHECK(cat.effective_implementation("SALES", "Items") == over);
  CHECK(cat.effective_implementation("DOCS", "Items") == cat.implementation("DOCS", "Items"));

  realize(cat, "ALTER DOCS REALIZE DoShip(inDate DATETIME) AS { Date := inDate; };");
  CHECK(cat.implementation("DOCS", "DoShip")->params.size() == 1);
  // replacing keeps one implementation per member
  realize(cat, "ALTER DOCS REALIZE DoShip AS { Comment := \"x\"; };");
  CHECK(cat.implementations_of("DOCS", "DoShip").size() == 1);
  CHECK(std::get<ProcedureBody>(cat.implementation("DOCS", "DoShip")->body).body.size() == 1);

  auto code = [&](const char* text) { return code_of([&] { realize(cat, text); }); };
  CHECK(code("ALTER BANKS REALIZE Color AS STORED;") == ErrorCode::UnknownMember);
  CHECK(code("ALTER NOPE REALIZE Name AS STORED;") == ErrorCode::UnknownName);
  CHECK(code("ALTER DOCS REALIZE DoShip AS STORED;") == ErrorCode::KindMismatch);
  CHECK(code("ALTER DOCS REALIZE DoShip AS SELECT 1 AS x;") == ErrorCode::KindMismatch);
  CHECK(code("ALTER DOCS REALIZE Items AS { RETURN 1; };") == ErrorCode::KindMismatch);
  CHECK(code("ALTER DOCS REALIZE DoShip(d INTEGER) AS { };") == ErrorCode::KindMismatch);
  CHECK(code("ALTER DOCS REALIZE DocN(d INTEGER) AS STORED;") == ErrorCode::KindMismatch);
}

TEST_CASE("full implementation and ambiguity") {
  Catalog cat = trade_catalog();
  std::string missing;
  CHECK_FALSE(cat.fully_implemented("BANKS", &missing));
  CHECK(missing == "Name");
  realize(cat, "ALTER BANKS REALIZE Name AS STORED;");
  CHECK(cat.fully_implemented("BANKS"));

  realize(cat, "ALTER DOCS REALIZE DocN, Date, Comment, Cntr, Items AS STORED;");
  realize(cat, "ALTER DOCS REALIZE DoShip AS { };");
  CHECK(cat.fully_implemented("DOCS"));
  CHECK_FALSE(cat.fully_implemented("SALES", &missing));
  CHECK(missing == "Amount");
  CHECK_FALSE(cat.fully_implemented("VALUERECORDS"));

  Catalog dia;
  define_all(dia, "CLASS TOP ( T INTEGER ); CLASS L EXTEND TOP (); CLASS R EXTEND TOP (); CLASS B EXTEND L, R ();");
  realize(dia, "ALTER L REALIZE T AS STORED;");
  CHECK(dia.fully_implemented("B"));
  realize(dia, "ALTER R REALIZE T AS STORED;");
  CHECK(code_of([&] { dia.fully_implemented("B"); }) == ErrorCode::AmbiguousImplementation);
  realize(dia, "ALTER B REALIZE T AS STORED;");
  CHECK(dia.fully_implemented("B"));
}

TEST_CASE("scope excludes objects of overriding subclasses") {
  Catalog cat = trade_catalog();
  realize(cat, "ALTER DOCS REALIZE DoShip AS { };");
  MapEnv env;
  // 7, 8, 9 are Ship1..Ship3; 10 is Sale1, a DOCS member through SALES
  env.bind(real_relvar("DOCS"), oids({7, 8, 9, 10}));
  env.bind(real_relvar("SALES"), oids({10}));
  auto docs_scope = [&] { return eval_algebra(*cat.scope_of(*cat.implementation("DOCS", "DoShip")), env); };
  CHECK(docs_scope() == oids({7, 8, 9, 10}));
  realize(cat, "ALTER SALES REALIZE DoShip AS { };");
  CHECK(docs_scope() == oids({7, 8, 9}));
  CHECK(eval_algebra(*cat.scope_of(*cat.implementation("SALES", "DoShip")), env) == oids({10}));
}

// -- properties --------------------------------------------------------------

namespace {

struct RandomHierarchy {
  std::vector<std::vector<int>> parents;
  std::string script;
};

RandomHierarchy random_hierarchy(std::mt19937& rng, int n, bool multiple) {
  RandomHierarchy h;
  h.parents.resize(n);
  for (int i = 0; i < n; ++i) {
    std::string text = "CLASS C" + std::to_string(i);
    if (i > 0) {
      std::uniform_int_distribution<int> pick(0, i - 1);
      std::set<int> ps{pick(rng)};
      if (multiple && i > 1 && rng() % 2) ps.insert(pick(rng));
      h.parents[i].assign(ps.begin(), ps.end());
      text += " EXTEND ";
      bool first = true;
      for (int p : ps) text += (first ? "" : ", ") + std::string("C") + std::to_string(p), first = false;
    }
    text += i == 0 ? " ( m INTEGER );" : " ( own" + std::to_string(i) + " INTEGER );";
    h.script += text + "\n";
  }
  return h;
}

std::set<int> ancestors_or_self(const RandomHierarchy& h, int c) {
  std::set<int> out{c};
  for (int p : h.parents[c])
    for (int a : ancestors_or_self(h, p)) out.insert(a);
  return out;
}

} // namespace

TEST_CASE("property: implementation scopes partition the declaring class") {
  std::mt19937 rng(20240611);
  for (int round = 0; round < 150; ++round) {
    bool multiple = round % 2 == 1;
    int n = 2 + static_cast<int>(rng() % 5);
    RandomHierarchy h = random_hierarchy(rng, n, multiple);
    Catalog cat;
    define_all(cat, h.script);
    std::vector<bool> implements(n);
    for (int i = 0; i < n; ++i)
      if (rng() % 2 || i == 0) {
        implements[i] = true;
        cat.register_implementation("C" + std::to_string(i), "m", StoredBody{});
      }

    // one object of each exact class; OID k+1 belongs to class Ck and its ancestors
    MapEnv env;
    for (int c = 0; c < n; ++c) {
      Relation members(Schema{{"OID", Domain::Oid}});
      for (int k = 0; k < n; ++k)
        if (ancestors_or_self(h, k).count(c)) members.insert({oid(k + 1)});
      env.bind(real_relvar("C" + std::to_string(c)), members);
    }
    auto impls = cat.implementations_of("C0", "m");
    std::vector<Relation> scopes;
    for (auto* impl : impls) scopes.push_back(eval_algebra(*cat.scope_of(*impl), env));

    for (int k = 0; k < n; ++k) {
      auto chain = ancestors_or_self(h, k);
      int most_specific = 0;
      for (int d : chain) {
        if (!implements[d]) continue;
        bool shadowed = false;
        for (int e : chain)
          if (e != d && implements[e] && ancestors_or_self(h, e).count(d)) shadowed = true;
        if (!shadowed) ++most_specific;
      }
      int covering = 0;
      for (const auto& s : scopes) covering += s.contains({oid(k + 1)}) ? 1 : 0;
      CAPTURE(h.script);
      CAPTURE(k);
      CHECK(covering == most_specific);
      if (!multiple) CHECK(covering == 1);
    }
  }
}

TEST_CASE("property: specification union ignores parent order") {
  std::mt19937 rng(77);
  const char* types[] = {"INTEGER", "STRING", "FLOAT"};
  for (int round = 0; round < 200; ++round) {
    std::string a = "CLASS A (", b = "CLASS B (";
    int na = 1 + static_cast<int>(rng() % 4), nb = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < na; ++i) a += (i ? ", " : " ") + std::string("m") + std::to_string(i) + " " + types[i % 3];
    // B shares a prefix of A's members with identical declarations, the rest are its own
    int shared = static_cast<int>(rng() % (std::min(na, nb) + 1));
    for (int i = 0; i < nb; ++i) {
      std::string name = i < shared ? "m" + std::to_string(i) : "b" + std::to_string(i);
      b += (i ? ", " : " ") + name + " " + types[i % 3];
    }
    if (rng() % 2) b += ", Act(x INTEGER)";
    Catalog ab, ba;
    define_all(ab, a + ");" + b + "); CLASS C EXTEND A, B ();");
    define_all(ba, a + ");" + b + "); CLASS C EXTEND B, A ();");
    auto norm = [](std::vector<MemberSpec> ms) {
      std::vector<std::string> out;
      for (const auto& m : ms) out.push_back(m.name + "/" + m.type + "/" + std::to_string(static_cast<int>(m.kind)));
      std::sort(out.begin(), out.end());
      return out;
    };
    CAPTURE(a);
    CAPTURE(b);
    CHECK(norm(ab.effective_members("C")) == norm(ba.effective_members("C")));
    CHECK(ab.effective_members("C").size() == static_cast<std::size_t>(na + nb - shared) + (b.find("Act") != std::string::npos));
  }
}

TEST_CASE("property: catalog survives serialization") {
  std::mt19937 rng(5150);
  for (int round = 0; round < 100; ++round) {
    int n = 2 + static_cast<int>(rng() % 5);
    RandomHierarchy h = random_hierarchy(rng, n, true);
    Catalog cat;
    define_all(cat, h.script);
    for (int i = 0; i < n; ++i)
      if (rng() % 2) realize(cat, "ALTER C" + std::to_string(i) + " REALIZE m AS SELECT 1 AS m;");
    realize(cat, "ALTER C0 REALIZE m AS STORED;");

    Catalog back = Catalog::deserialize(cat.serialize());
    CHECK(back.serialize() == cat.serialize());
    CHECK(back.class_names() == cat.class_names());
    for (int i = 0; i < n; ++i) {
      std::string c = "C" + std::to_string(i);
      CHECK(names_of(back.effective_members(c)) == names_of(cat.effective_members(c)));
      auto p1 = cat.resolve_path(parse_path(c + "<.m = 1>"), {});
      auto p2 = back.resolve_path(parse_path(c + "<.m = 1>"), {});
      CHECK(kinds(p1) == kinds(p2));
    }
    auto i1 = cat.implementations_of("C0", "m");
    auto i2 = back.implementations_of("C0", "m");
    REQUIRE(i1.size() == i2.size());
    for (std::size_t k = 0; k < i1.size(); ++k) {
      CHECK(i1[k]->owner == i2[k]->owner);
      CHECK(prs::to_text(*cat.scope_of(*i1[k])) == prs::to_text(*back.scope_of(*i2[k])));
    }
  }
}

TEST_CASE("empty and malformed payloads") {
  CHECK(Catalog::deserialize("").class_names().empty());
  CHECK(code_of([] { Catalog::deserialize("garbage\n"); }) == ErrorCode::FormatError);
  CHECK(code_of([] { Catalog::deserialize("RXO-CATALOG 1\n999\nCLASS A ();"); }) == ErrorCode::FormatError);
}
