#include "statements.hpp"

#include "rxo/oo/printer.hpp"

#include <algorithm>

namespace rxo::oo::detail {

namespace {

using prs::Command;
namespace cmd = prs::cmd;

constexpr const char* kThese = "these";
constexpr const char* kPar = "par";
constexpr const char* kBranches = "__branches";
constexpr const char* kLocals = "__locals";
constexpr std::int64_t kReturned = -1;

std::string var_column(const std::string& name) { return "$" + name; }

ScalarPtr int_lit(std::int64_t v) { return lit(Value::integer(v)); }

/// `rel` with the rows of objects in `cur` replaced by `replacement`.
AlgebraPtr replace_rows(const std::string& rel, const AlgebraPtr& cur, const AlgebraPtr& replacement) {
  return union_of(difference(relvar(rel), join(relvar(rel), cur, {{"OID", "OID"}})), replacement);
}

/// Rows of `rel` for `cur` with column `col` set from the `__v` column of `value`.
AlgebraPtr updated_rows(const std::string& rel, const std::vector<std::string>& cols, const std::string& col,
                        const AlgebraPtr& value) {
  std::vector<ProjectItem> items;
  for (const auto& c : cols) items.push_back({attr(c == col ? "__v" : c), c});
  return project(join(relvar(rel), value, {{"OID", "OID"}}), items);
}

std::vector<std::string> schema_names(const prs::Database& db, const std::string& rel) {
  const auto* def = db.find(rel);
  if (!def) fail(ErrorCode::UnknownRelvar, "relvar '" + rel + "' is not defined");
  return def->schema.names();
}

} // namespace

Context::Context(const Catalog& c, const prs::Database& d)
    : cat(c), db(d), comp(c, d, em, [this](const NewObject& n) {
        auto [local, cmds] = emit_new(*this, n);
        em.pre.insert(em.pre.end(), cmds.begin(), cmds.end());
        return local;
      }) {}

void Context::emit(std::vector<Command>& out, Command c) {
  out.insert(out.end(), em.pre.begin(), em.pre.end());
  em.pre.clear();
  out.push_back(std::move(c));
}

void Context::require_no_pre(const std::string& what) const {
  if (!em.pre.empty()) fail(ErrorCode::Unsupported, what + " cannot use NEW or FIRST OF");
}

Scope object_scope(const std::string& cls) {
  Scope s;
  s.cls = cls;
  Anchor self;
  self.column = "OID";
  self.cls = cls;
  self.prefix = "this";
  s.self = self;
  return s;
}

std::optional<std::string> member_target(const Path& target, const Scope& s) {
  if (target.is_post_path() || target.head == "this") {
    if (target.segments.size() != 1) fail(ErrorCode::Unsupported, "assignment to " + to_source(target));
    return target.segments[0].name;
  }
  if (s.variables.count(target.head)) {
    if (!target.segments.empty()) fail(ErrorCode::Unsupported, "assignment to " + to_source(target));
    return std::nullopt;
  }
  if (!target.segments.empty()) fail(ErrorCode::Unsupported, "assignment to " + to_source(target));
  return target.head;
}

void assign_member(Context& cx, const std::string& cls, const std::string& member, const Expr& value,
                   const AlgebraPtr& cur, const Scope& s, const Rows& rows, std::vector<Command>& out) {
  auto m = cx.cat.find_member(cls, member);
  if (!m) fail(ErrorCode::UnknownName, cls + " has no component " + member);
  if (m->kind == ComponentKind::Method) fail(ErrorCode::KindMismatch, member + " is a method of " + cls);
  const std::string& root = m->declared_in;
  for (const Implementation* impl : cx.cat.implementations_of(root, member)) {
    if (impl->stored()) continue;
    out.push_back(cmd::Assert{intersect(cur, cx.cat.scope_of(*impl)), cmd::AssertMode::Empty,
                              ErrorCode::NotUpdatableCalculated,
                              member + " is calculated in " + impl->owner + " and cannot be assigned"});
  }
  if (m->kind == ComponentKind::Scalar) {
    std::string real = real_relvar(root);
    auto v = cx.comp.value(value, s, rows, "__v");
    cx.emit(out, cmd::Set{real, replace_rows(real, cur, updated_rows(real, schema_names(cx.db, real), member, v))});
    return;
  }
  auto* q = std::get_if<expr::SubSelect>(&value.node);
  if (!q) fail(ErrorCode::TypeError, "complex component " + member + " needs a SELECT value");
  auto r = cx.comp.select(*q->select, &s, &rows);
  if (r.names.size() != m->attributes.size())
    fail(ErrorCode::TypeError, member + " has " + std::to_string(m->attributes.size()) + " attributes, the query yields " +
                                   std::to_string(r.names.size()));
  std::vector<ProjectItem> items{{attr("OID"), "OID"}};
  for (std::size_t i = 0; i < r.names.size(); ++i) items.push_back({attr(r.names[i]), m->attributes[i].name});
  std::string real = real_relvar(root, member);
  cx.emit(out, cmd::Set{real, replace_rows(real, cur, project(r.rel, items))});
}

std::pair<std::string, std::vector<Command>> emit_new(Context& cx, const NewObject& n) {
  const Catalog& cat = cx.cat;
  if (!cat.has_class(n.class_name)) fail(ErrorCode::UnknownName, "unknown class " + n.class_name);
  std::string missing;
  if (!cat.fully_implemented(n.class_name, &missing))
    fail(ErrorCode::NotFullyImplemented, n.class_name + " has no implementation of " + missing);

  std::vector<Command> out;
  std::string local = cx.em.fresh("new");
  out.push_back(cmd::Alloc{local, literal(Relation(Schema{}, {Tuple{}}))});
  std::vector<std::string> classes{n.class_name};
  for (const auto& a : cat.ancestors(n.class_name)) classes.push_back(a);
  for (const auto& c : classes) {
    std::vector<ProjectItem> items{{attr(prs::kAllocAttribute), "OID"}};
    for (const auto& col : schema_names(cx.db, real_relvar(c)))
      if (col != "OID") items.push_back({lit(Value::null()), col});
    out.push_back(cmd::Insert{real_relvar(c), project(relvar(local), items)});
  }

  AlgebraPtr cur = rename(project(relvar(local), std::vector<std::string>{prs::kAllocAttribute}),
                          {{prs::kAllocAttribute, "OID"}});
  Scope s = object_scope(n.class_name);
  Rows rows{cur, {"OID"}, {}};
  for (const auto& a : n.assignments) {
    auto member = member_target(a.target, s);
    auto saved = std::exchange(cx.em.pre, {});
    assign_member(cx, n.class_name, *member, *a.value, cur, s, rows, out);
    cx.em.pre = std::move(saved);
  }
  return {local, out};
}

// -- procedures ---------------------------------------------------------------

namespace {

void collect_declarations(const StmtList& body, std::vector<TypedName>& out) {
  for (const auto& st : body) {
    if (auto* d = std::get_if<stmt::Declare>(&st.node)) {
      out.push_back({d->name, d->type});
    } else if (auto* i = std::get_if<stmt::If>(&st.node)) {
      collect_declarations(i->then_body, out);
      collect_declarations(i->else_body, out);
    } else if (auto* w = std::get_if<stmt::While>(&st.node)) {
      collect_declarations(w->body, out);
    }
  }
}

/// Group translation of one method implementation. Objects move between
/// branch numbers in a single relation, so live branches and returned objects
/// always partition the input.
class ProcedureBuilder {
public:
  ProcedureBuilder(const Catalog& cat, const prs::Database& db, const Implementation& impl)
      : cx_(cat, db), impl_(impl), scope_(object_scope(impl.owner)) {
    for (const auto& p : impl.params) {
      if (scope_.variables.count(p.name)) fail(ErrorCode::DuplicateName, "parameter " + p.name + " is declared twice");
      scope_.variables[p.name] = {var_column(p.name), p.type};
    }
    collect_declarations(std::get<ProcedureBody>(impl.body).body, locals_);
    for (const auto& l : locals_) {
      if (scope_.variables.count(l.name)) fail(ErrorCode::DuplicateName, "local " + l.name + " is declared twice");
      if (!cat.has_class(l.type) && !domain_from_name(l.type))
        fail(ErrorCode::UnknownReferencedClass, "unknown type " + l.type + " of " + l.name);
      scope_.variables[l.name] = {var_column(l.name), l.type};
    }
  }

  prs::TransactionDef build() {
    prs::TransactionDef def;
    def.name = implementation_transaction(impl_.owner, impl_.member);
    def.params.push_back({kThese, Schema{{"OID", Domain::Oid}}});
    Schema par{{"OID", Domain::Oid}};
    for (const auto& p : impl_.params) par.add({p.name, domain_of_type(cx_.cat, p.type)});
    def.params.push_back({kPar, par});

    def.body.push_back(cmd::Local{kBranches, Schema{{"OID", Domain::Oid}, {"br", Domain::Integer}},
                                  project(relvar(kThese), std::vector<ProjectItem>{{attr("OID"), "OID"}, {int_lit(0), "br"}})});
    if (!locals_.empty()) {
      Schema ls{{"OID", Domain::Oid}};
      std::vector<ProjectItem> init{{attr("OID"), "OID"}};
      for (const auto& l : locals_) {
        ls.add({l.name, domain_of_type(cx_.cat, l.type)});
        init.push_back({lit(Value::null()), l.name});
      }
      def.body.push_back(cmd::Local{kLocals, ls, project(relvar(kThese), init)});
    }
    body(std::get<ProcedureBody>(impl_.body).body, 0, def.body);
    return def;
  }

private:
  AlgebraPtr branch(std::int64_t k) const {
    return rxo::select(relvar(kBranches), binary(BinaryOp::Eq, attr("br"), int_lit(k)));
  }
  AlgebraPtr cur(std::int64_t k) const { return project(branch(k), std::vector<std::string>{"OID"}); }

  Rows env(std::int64_t k) const {
    Rows rows{cur(k), {"OID"}, {}};
    auto attach = [&](const std::string& rel, const std::vector<TypedName>& vars) {
      if (vars.empty()) return;
      std::vector<std::pair<std::string, std::string>> renames;
      for (const auto& v : vars) {
        renames.emplace_back(v.name, var_column(v.name));
        rows.add(var_column(v.name));
      }
      rows.rel = join(rows.rel, rename(relvar(rel), renames), {{"OID", "OID"}});
    };
    attach(kPar, impl_.params);
    attach(kLocals, locals_);
    return rows;
  }

  /// Moves the objects of branch `from` to `yes` or `no` by `cond`.
  void split(const Expr& cond, std::int64_t from, std::int64_t yes, std::int64_t no, std::vector<Command>& out) {
    auto c = cx_.comp.value(cond, scope_, env(from), "__c");
    auto moved = project(join(branch(from), c, {{"OID", "OID"}}),
                         std::vector<ProjectItem>{{attr("OID"), "OID"},
                                                  {case_when({{attr("__c"), int_lit(yes)}}, int_lit(no)), "br"}});
    cx_.emit(out, cmd::Set{kBranches, union_of(difference(relvar(kBranches), branch(from)), moved)});
  }

  void relabel(ScalarPtr when, std::int64_t to, std::vector<Command>& out) {
    auto br = case_when({{when, int_lit(to)}}, attr("br"));
    out.push_back(cmd::Set{kBranches, project(relvar(kBranches), std::vector<ProjectItem>{{attr("OID"), "OID"}, {br, "br"}})});
  }

  void assign_variable(const std::string& name, const Expr& value, std::int64_t k, std::vector<Command>& out) {
    bool is_param = std::any_of(impl_.params.begin(), impl_.params.end(), [&](const TypedName& p) { return p.name == name; });
    std::string rel = is_param ? kPar : kLocals;
    auto v = cx_.comp.value(value, scope_, env(k), "__v");
    std::vector<std::string> cols{"OID"};
    for (const auto& t : is_param ? impl_.params : locals_) cols.push_back(t.name);
    cx_.emit(out, cmd::Set{rel, replace_rows(rel, cur(k), updated_rows(rel, cols, name, v))});
  }

  void body(const StmtList& stmts, std::int64_t k, std::vector<Command>& out) {
    for (const auto& st : stmts) statement(st, k, out);
  }

  void statement(const Stmt& st, std::int64_t k, std::vector<Command>& out) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, stmt::Declare>) {
            // declared once at the top
          } else if constexpr (std::is_same_v<T, stmt::Assign>) {
            if (auto member = member_target(n.target, scope_)) {
              assign_member(cx_, impl_.owner, *member, *n.value, cur(k), scope_, env(k), out);
            } else {
              assign_variable(n.target.head, *n.value, k, out);
            }
          } else if constexpr (std::is_same_v<T, stmt::If>) {
            std::int64_t t = ++branches_, f = ++branches_;
            split(*n.condition, k, t, f, out);
            std::vector<Command> then_cmds, else_cmds;
            body(n.then_body, t, then_cmds);
            body(n.else_body, f, else_cmds);
            if (!then_cmds.empty()) out.push_back(cmd::If{cur(t), then_cmds, {}});
            if (!else_cmds.empty()) out.push_back(cmd::If{cur(f), else_cmds, {}});
            relabel(binary(BinaryOp::Or, binary(BinaryOp::Eq, attr("br"), int_lit(t)),
                           binary(BinaryOp::Eq, attr("br"), int_lit(f))),
                    k, out);
          } else if constexpr (std::is_same_v<T, stmt::While>) {
            std::int64_t w = ++branches_;
            split(*n.condition, k, w, k, out);
            std::vector<Command> loop;
            body(n.body, w, loop);
            split(*n.condition, w, w, k, loop);
            out.push_back(cmd::While{cur(w), loop});
          } else if constexpr (std::is_same_v<T, stmt::Return>) {
            if (n.value) fail(ErrorCode::Unsupported, "a method cannot return a value");
            relabel(binary(BinaryOp::Eq, attr("br"), int_lit(k)), kReturned, out);
          } else if constexpr (std::is_same_v<T, stmt::Call>) {
            call(n, k, out);
          }
        },
        st.node);
  }

  void call(const stmt::Call& c, std::int64_t k, std::vector<Command>& out) {
    if (c.group) fail(ErrorCode::Unsupported, "EXEC on a group inside a procedure");
    auto m = cx_.cat.find_member(impl_.owner, c.method);
    if (!m || m->kind != ComponentKind::Method) fail(ErrorCode::UnknownMethod, impl_.owner + " has no method " + c.method);
    if (m->params.size() != c.args.size())
      fail(ErrorCode::ArgumentMismatch, c.method + " expects " + std::to_string(m->params.size()) + " argument(s)");
    Rows rows = env(k);
    std::vector<ScalarPtr> args;
    for (const auto& a : c.args) args.push_back(cx_.comp.scalar(*a, scope_, rows));
    std::vector<ProjectItem> items{{attr("OID"), "OID"}};
    for (std::size_t i = 0; i < args.size(); ++i) items.push_back({args[i], m->params[i].name});
    std::vector<Command> guarded;
    cx_.emit(guarded, cmd::Exec{method_transaction(m->declared_in, c.method), {cur(k), project(rows.rel, items)}});
    out.push_back(cmd::If{cur(k), guarded, {}});
  }

  Context cx_;
  const Implementation& impl_;
  Scope scope_;
  std::vector<TypedName> locals_;
  std::int64_t branches_ = 0;
};

/// Straight-line procedure evaluated symbolically: every local is an (OID, v) relation.
class Inliner {
public:
  Inliner(Context& cx, const Implementation& impl, AlgebraPtr scope)
      : cx_(cx), impl_(impl), objects_(std::move(scope)), scope_(object_scope(impl.owner)) {}

  AlgebraPtr run(const std::string& name) {
    std::vector<TypedName> decls;
    const StmtList& stmts = std::get<ProcedureBody>(impl_.body).body;
    collect_declarations(stmts, decls);
    State st;
    for (const auto& d : decls) {
      if (st.count(d.name)) fail(ErrorCode::DuplicateName, "local " + d.name + " is declared twice");
      st[d.name] = project(objects_, std::vector<ProjectItem>{{attr("OID"), "OID"}, {lit(Value::null()), "v"}});
      scope_.variables[d.name] = {var_column(d.name), d.type};
      order_.push_back(d.name);
    }
    for (std::size_t i = 0; i < stmts.size(); ++i) {
      if (auto* r = std::get_if<stmt::Return>(&stmts[i].node)) {
        if (i + 1 != stmts.size() || !r->value) break;
        auto v = cx_.comp.value(*r->value, scope_, env(st), name);
        cx_.require_no_pre("a component procedure");
        return v;
      }
      statement(stmts[i], st);
    }
    fail(ErrorCode::Unsupported, "a component procedure must end with RETURN of a value");
  }

private:
  using State = std::map<std::string, AlgebraPtr>;

  Rows env(const State& st) {
    Rows rows{objects_, {"OID"}, {}};
    for (const auto& name : order_) {
      std::string k = cx_.em.fresh("k");
      rows.rel = left_join(rows.rel, rename(st.at(name), {{"OID", k}, {"v", var_column(name)}}), {{"OID", k}});
      rows.add(var_column(name));
    }
    return rows;
  }

  void statement(const Stmt& s, State& st) {
    if (std::holds_alternative<stmt::Declare>(s.node)) return;
    if (auto* a = std::get_if<stmt::Assign>(&s.node)) {
      if (member_target(a->target, scope_))
        fail(ErrorCode::Unsupported, "a component procedure cannot assign " + to_source(a->target));
      st[a->target.head] = cx_.comp.value(*a->value, scope_, env(st), "v");
      cx_.require_no_pre("a component procedure");
      return;
    }
    if (auto* i = std::get_if<stmt::If>(&s.node)) {
      auto c = cx_.comp.value(*i->condition, scope_, env(st), "c");
      State yes = st, no = st;
      for (const auto& x : i->then_body) statement(x, yes);
      for (const auto& x : i->else_body) statement(x, no);
      for (const auto& name : order_) {
        if (yes[name] == st[name] && no[name] == st[name]) continue;
        auto merged = join(join(c, rename(yes[name], {{"v", "t"}}), {{"OID", "OID"}}), rename(no[name], {{"v", "f"}}),
                           {{"OID", "OID"}});
        st[name] = project(merged, std::vector<ProjectItem>{{attr("OID"), "OID"},
                                                            {case_when({{attr("c"), attr("t")}}, attr("f")), "v"}});
      }
      return;
    }
    fail(ErrorCode::Unsupported, "component procedures allow only assignments, IF and a final RETURN");
  }

  Context& cx_;
  const Implementation& impl_;
  AlgebraPtr objects_;
  Scope scope_;
  std::vector<std::string> order_;
};

} // namespace

prs::TransactionDef translate_procedure(const Catalog& cat, const prs::Database& db, const Implementation& impl) {
  return ProcedureBuilder(cat, db, impl).build();
}

AlgebraPtr inline_procedure(Context& cx, const Implementation& impl, const AlgebraPtr& scope, const std::string& name) {
  return Inliner(cx, impl, scope).run(name);
}

} // namespace rxo::oo::detail
