#include "rxo/oo/translator.hpp"

#include "rxo/oo/printer.hpp"
#include "statements.hpp"

namespace rxo::oo {

using detail::Context;
using MCommand = prs::Command;
namespace cmd = prs::cmd;

namespace {

std::vector<std::string> attribute_names(const MemberSpec& m) {
  std::vector<std::string> out;
  for (const auto& a : m.attributes) out.push_back(a.name);
  return out;
}

std::vector<std::string> with_oid(std::vector<std::string> names) {
  names.insert(names.begin(), "OID");
  return names;
}

std::vector<std::vector<std::string>> component_keys(const MemberSpec& m) {
  std::vector<std::vector<std::string>> keys;
  for (const auto& k : m.keys) keys.push_back(with_oid(k));
  return keys;
}

AlgebraPtr oids(const std::string& rel) { return project(relvar(rel), std::vector<std::string>{"OID"}); }

/// Member named by an assignment target inside a complex row (`.a` or `a`).
std::string row_target(const Path& target) {
  if (target.is_post_path() && target.segments.size() == 1) return target.segments[0].name;
  if (!target.is_post_path() && !target.is_alias() && target.segments.empty()) return target.head;
  fail(ErrorCode::Unsupported, "assignment to " + to_source(target));
}

struct ComplexTarget {
  AlgebraPtr owners;
  MemberSpec member;
  std::optional<Selection> selection;
};

} // namespace

// -- classes and bindings -----------------------------------------------------

std::vector<MCommand> Translator::class_create(const std::string& cls) const {
  const ClassDef& def = cat_.class_def(cls);
  std::vector<MCommand> out;

  prs::RelVarDef real;
  real.name = real_relvar(cls);
  real.schema = Schema{{"OID", Domain::Oid}};
  real.keys.push_back({"OID"});
  for (const auto& k : def.keys) real.keys.push_back(k);
  std::vector<const MemberSpec*> scalars, complexes, methods;
  for (const auto& m : def.own) {
    if (m.declared_in != cls) continue;
    if (m.kind == ComponentKind::Scalar) scalars.push_back(&m);
    else if (m.kind == ComponentKind::Complex) complexes.push_back(&m);
    else methods.push_back(&m);
  }
  for (const auto* m : scalars) {
    real.schema.add({m->name, detail::domain_of_type(cat_, m->type)});
    if (cat_.has_class(m->type)) {
      real.fkeys.push_back({{m->name}, class_relvar(m->type), {"OID"}});
      real.ref_classes[m->name] = m->type;
    }
  }
  for (const auto& r : def.references)
    if (r.component.empty()) real.fkeys.push_back({r.attrs, class_relvar(r.target_class), r.target_attrs});
  out.push_back(cmd::Create{real});

  for (const auto* m : complexes) {
    prs::RelVarDef rc;
    rc.name = real_relvar(cls, m->name);
    rc.schema = Schema{{"OID", Domain::Oid}};
    rc.keys = component_keys(*m);
    for (const auto& a : m->attributes) {
      rc.schema.add({a.name, detail::domain_of_type(cat_, a.type)});
      if (cat_.has_class(a.type)) {
        rc.fkeys.push_back({{a.name}, class_relvar(a.type), {"OID"}});
        rc.ref_classes[a.name] = a.type;
      }
    }
    for (const auto& r : def.references)
      if (r.component == m->name) rc.fkeys.push_back({r.attrs, class_relvar(r.target_class), r.target_attrs});
    out.push_back(cmd::Create{rc});
  }
  for (const auto* m : scalars) out.push_back(cmd::Create{component_binding(cls, m->name)});
  for (const auto* m : complexes) out.push_back(cmd::Create{component_binding(cls, m->name)});
  for (const auto* m : methods) out.push_back(cmd::Trans{method_binding(cls, m->name)});

  prs::RelVarDef view;
  view.name = class_relvar(cls);
  view.kind = prs::RelvarKind::Virtual;
  view.schema = Schema{{"OID", Domain::Oid}};
  view.keys = real.keys;
  AlgebraPtr rel = oids(real_relvar(cls));
  int n = 0;
  for (const auto& m : cat_.effective_members(cls)) {
    if (m.kind == ComponentKind::Scalar) {
      std::string k = "__k" + std::to_string(++n);
      rel = left_join(rel, rename(relvar(binding_relvar(m.declared_in, m.name)), {{"OID", k}}), {{"OID", k}});
      view.schema.add({m.name, detail::domain_of_type(cat_, m.type)});
      if (cat_.has_class(m.type)) view.ref_classes[m.name] = m.type;
    } else if (m.kind == ComponentKind::Complex && m.declared_in != cls) {
      prs::RelVarDef inherited = component_binding(m.declared_in, m.name);
      inherited.name = class_relvar(cls, m.name);
      inherited.definition = join(relvar(binding_relvar(m.declared_in, m.name)), oids(real_relvar(cls)), {{"OID", "OID"}});
      out.push_back(cmd::Create{inherited});
    }
  }
  view.definition = rel;
  out.push_back(cmd::Create{view});
  return out;
}

prs::RelVarDef Translator::component_binding(const std::string& root, const std::string& member) const {
  auto m = cat_.find_member(root, member);
  if (!m || m->kind == ComponentKind::Method) fail(ErrorCode::UnknownMember, root + " has no component " + member);
  prs::RelVarDef def;
  def.name = binding_relvar(root, member);
  def.kind = prs::RelvarKind::Virtual;
  def.schema = Schema{{"OID", Domain::Oid}};
  std::vector<std::string> cols{"OID"};
  std::string real;
  if (m->kind == ComponentKind::Scalar) {
    def.schema.add({member, detail::domain_of_type(cat_, m->type)});
    if (cat_.has_class(m->type)) def.ref_classes[member] = m->type;
    def.keys.push_back({"OID"});
    cols.push_back(member);
    real = real_relvar(root);
  } else {
    for (const auto& a : m->attributes) {
      def.schema.add({a.name, detail::domain_of_type(cat_, a.type)});
      if (cat_.has_class(a.type)) def.ref_classes[a.name] = a.type;
      cols.push_back(a.name);
    }
    def.keys = component_keys(*m);
    real = real_relvar(root, member);
  }

  AlgebraPtr acc;
  for (const Implementation* impl : cat_.implementations_of(root, member)) {
    AlgebraPtr part = impl->stored() ? join(relvar(real), cat_.scope_of(*impl), {{"OID", "OID"}}) : calculated_value(*impl);
    part = project(part, cols);
    acc = acc ? union_of(acc, part) : part;
  }
  def.definition = acc ? acc : literal(Relation(def.schema));
  return def;
}

AlgebraPtr Translator::calculated_value(const Implementation& impl) const {
  auto m = cat_.find_member(impl.owner, impl.member);
  Context cx(cat_, db_);
  AlgebraPtr scope = cat_.scope_of(impl);
  if (std::holds_alternative<ProcedureBody>(impl.body)) {
    if (m->kind != ComponentKind::Scalar) fail(ErrorCode::KindMismatch, impl.member + " cannot be a procedure");
    return detail::inline_procedure(cx, impl, scope, impl.member);
  }
  const auto& body = std::get<CalculatedBody>(impl.body);
  detail::Scope s = detail::object_scope(impl.owner);
  detail::Rows rows{scope, {"OID"}, {}};
  AlgebraPtr out;
  if (m->kind == ComponentKind::Scalar) {
    out = cx.comp.value(*body.value, s, rows, impl.member);
  } else {
    auto* q = std::get_if<expr::SubSelect>(&body.value->node);
    if (!q) fail(ErrorCode::TypeError, impl.member + " needs a SELECT body");
    auto r = cx.comp.select(*q->select, &s, &rows);
    if (r.names.size() != m->attributes.size())
      fail(ErrorCode::TypeError, impl.member + " has " + std::to_string(m->attributes.size()) +
                                     " attributes, the body yields " + std::to_string(r.names.size()));
    std::vector<ProjectItem> items{{attr("OID"), "OID"}};
    for (std::size_t i = 0; i < r.names.size(); ++i) items.push_back({attr(r.names[i]), m->attributes[i].name});
    out = project(r.rel, items);
  }
  cx.require_no_pre("a calculated implementation");
  return out;
}

prs::TransactionDef Translator::method_binding(const std::string& root, const std::string& method) const {
  auto m = cat_.find_member(root, method);
  if (!m || m->kind != ComponentKind::Method) fail(ErrorCode::UnknownMethod, root + " has no method " + method);
  prs::TransactionDef def;
  def.name = method_transaction(root, method);
  def.params.push_back({"these", Schema{{"OID", Domain::Oid}}});
  Schema par{{"OID", Domain::Oid}};
  for (const auto& p : m->params) par.add({p.name, detail::domain_of_type(cat_, p.type)});
  def.params.push_back({"par", par});
  for (const Implementation* impl : cat_.implementations_of(root, method)) {
    AlgebraPtr mine = intersect(relvar("these"), cat_.scope_of(*impl));
    cmd::Exec call{implementation_transaction(impl->owner, method), {mine, join(relvar("par"), mine, {{"OID", "OID"}})}};
    def.body.push_back(cmd::If{mine, {call}, {}});
  }
  return def;
}

std::vector<MCommand> Translator::realize(const Realize& r) const {
  std::vector<MCommand> out;
  for (const auto& name : r.members) {
    auto m = cat_.find_member(r.class_name, name);
    if (!m) fail(ErrorCode::UnknownMember, r.class_name + " has no member " + name);
    if (m->kind == ComponentKind::Method) {
      out.push_back(cmd::Trans{detail::translate_procedure(cat_, db_, *cat_.implementation(r.class_name, name))});
      out.push_back(cmd::Trans{method_binding(m->declared_in, name)});
    } else {
      out.push_back(cmd::Create{component_binding(m->declared_in, name)});
    }
  }
  return out;
}

// -- commands -----------------------------------------------------------------

AlgebraPtr Translator::select(const Select& q) const {
  Context cx(cat_, db_);
  auto r = cx.comp.select(q, nullptr, nullptr);
  cx.require_no_pre("this query");
  return r.rel;
}

AlgebraPtr Translator::group_reference(const Path& p) const {
  Context cx(cat_, db_);
  return cx.comp.group(p);
}

std::vector<MCommand> Translator::translate(const Command& c) const {
  return std::visit(
      [&](const auto& n) -> std::vector<MCommand> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NewObject>) {
          Context cx(cat_, db_);
          return {cmd::Block{detail::emit_new(cx, n).second}};
        } else if constexpr (std::is_same_v<T, MethodExec>) {
          return exec(n);
        } else if constexpr (std::is_same_v<T, Select>) {
          Context cx(cat_, db_);
          auto r = cx.comp.select(n, nullptr, nullptr);
          std::vector<MCommand> body;
          cx.emit(body, cmd::Get{r.rel});
          if (body.size() == 1) return body;
          return {cmd::Block{body}};
        } else if constexpr (std::is_same_v<T, Insert>) {
          return insert(n);
        } else if constexpr (std::is_same_v<T, Update>) {
          return update(n);
        } else if constexpr (std::is_same_v<T, Delete>) {
          return remove(n);
        } else if constexpr (std::is_same_v<T, PrsCommand>) {
          return {n.command};
        } else {
          fail(ErrorCode::UsageError, "class definitions and implementations are applied through a session");
        }
      },
      c);
}

namespace {

ComplexTarget complex_target(const Catalog& cat, Context& cx, const Path& target) {
  ResolvedPath rp = cat.resolve_path(target, ResolveScope{});
  if (rp.last().kind != StepKind::Complex || target.segments.empty())
    fail(ErrorCode::Unsupported, to_source(target) + " is not a complex component");
  Path owners = target;
  ComplexTarget t;
  t.selection = owners.segments.back().selection;
  owners.segments.pop_back();
  t.owners = cx.comp.group(owners);
  t.member = *cat.find_member(rp.last().owner, rp.last().name);
  return t;
}

void assert_stored(const Catalog& cat, const AlgebraPtr& objects, const MemberSpec& m, std::vector<MCommand>& out) {
  for (const Implementation* impl : cat.implementations_of(m.declared_in, m.name)) {
    if (impl->stored()) continue;
    out.push_back(cmd::Assert{intersect(objects, cat.scope_of(*impl)), cmd::AssertMode::Empty,
                              ErrorCode::NotUpdatableCalculated,
                              m.name + " is calculated in " + impl->owner + " and cannot be changed"});
  }
}

/// Stored rows of the target component, optionally restricted by its selection.
AlgebraPtr target_rows(Context& cx, const ComplexTarget& t, const std::string& prefix, std::vector<std::string>& cols) {
  auto names = attribute_names(t.member);
  std::vector<std::pair<std::string, std::string>> renames;
  cols = {"OID"};
  for (const auto& n : names) {
    renames.emplace_back(n, prefix + "." + n);
    cols.push_back(prefix + "." + n);
  }
  AlgebraPtr rows =
      rename(join(relvar(real_relvar(t.member.declared_in, t.member.name)), t.owners, {{"OID", "OID"}}), renames);
  if (t.selection) {
    detail::Anchor a;
    a.kind = detail::Anchor::Kind::ComplexRow;
    a.cls = t.member.declared_in;
    a.complex = t.member.name;
    a.prefix = prefix;
    for (const auto& at : t.member.attributes) a.types[at.name] = at.type;
    rows = cx.comp.restrict_rows(rows, a, cols, *t.selection);
  }
  return rows;
}

AlgebraPtr unprefixed(const AlgebraPtr& rows, const MemberSpec& m, const std::string& prefix) {
  std::vector<std::pair<std::string, std::string>> renames;
  for (const auto& a : m.attributes) renames.emplace_back(prefix + "." + a.name, a.name);
  return rename(rows, renames);
}

} // namespace

std::vector<MCommand> Translator::insert(const Insert& ins) const {
  Context cx(cat_, db_);
  ComplexTarget t = complex_target(cat_, cx, ins.target);
  if (t.selection) fail(ErrorCode::Unsupported, "INSERT target with a selection on the component");
  std::vector<MCommand> out;
  assert_stored(cat_, t.owners, t.member, out);
  auto names = attribute_names(t.member);
  for (const auto& a : ins.attributes)
    if (std::find(names.begin(), names.end(), a) == names.end())
      fail(ErrorCode::UnknownName, t.member.name + " has no attribute " + a);
  AlgebraPtr values;
  for (const auto& row : ins.rows) {
    if (row.size() != ins.attributes.size())
      fail(ErrorCode::SchemaMismatch, "VALUES row has " + std::to_string(row.size()) + " value(s) for " +
                                          std::to_string(ins.attributes.size()) + " attribute(s)");
    detail::Rows rows{literal(Relation(Schema{}, {Tuple{}})), {}, {}};
    std::map<std::string, ScalarPtr> given;
    for (std::size_t i = 0; i < row.size(); ++i) given[ins.attributes[i]] = cx.comp.scalar(*row[i], detail::Scope{}, rows);
    std::vector<ProjectItem> items;
    for (const auto& n : names) items.push_back({given.count(n) ? given[n] : lit(Value::null()), n});
    AlgebraPtr r = project(rows.rel, items);
    values = values ? union_of(values, r) : r;
  }
  if (!values) return out;
  std::string real = real_relvar(t.member.declared_in, t.member.name);
  cx.emit(out, cmd::Insert{real, project(product(t.owners, values), with_oid(names))});
  return out;
}

std::vector<MCommand> Translator::update(const Update& up) const {
  Context cx(cat_, db_);
  std::vector<MCommand> out;
  ResolvedPath rp = cat_.resolve_path(up.target, ResolveScope{});
  if (rp.last().kind != StepKind::Complex) {
    std::string cls = rp.object_class();
    if (cls.empty()) fail(ErrorCode::TypeError, to_source(up.target) + " does not name objects");
    AlgebraPtr g = cx.comp.group(up.target);
    detail::Scope s = detail::object_scope(cls);
    detail::Rows rows{g, {"OID"}, {}};
    for (const auto& a : up.assignments) {
      auto member = detail::member_target(a.target, s);
      detail::assign_member(cx, cls, *member, *a.value, g, s, rows, out);
    }
    return {cmd::Block{out}};
  }

  ComplexTarget t = complex_target(cat_, cx, up.target);
  assert_stored(cat_, t.owners, t.member, out);
  const std::string prefix = "__row";
  std::vector<std::string> cols;
  AlgebraPtr selected = target_rows(cx, t, prefix, cols);
  detail::Rows rows{selected, cols, {}};
  detail::Scope s;
  detail::Anchor a;
  a.kind = detail::Anchor::Kind::ComplexRow;
  a.cls = t.member.declared_in;
  a.complex = t.member.name;
  a.prefix = prefix;
  for (const auto& at : t.member.attributes) a.types[at.name] = at.type;
  s.selection = a;
  std::map<std::string, ScalarPtr> assigned;
  for (const auto& as : up.assignments) {
    std::string name = row_target(as.target);
    if (!a.types.count(name)) fail(ErrorCode::UnknownName, t.member.name + " has no attribute " + name);
    assigned[name] = cx.comp.scalar(*as.value, s, rows);
  }
  std::vector<ProjectItem> items{{attr("OID"), "OID"}};
  for (const auto& at : t.member.attributes)
    items.push_back({assigned.count(at.name) ? assigned[at.name] : attr(prefix + "." + at.name), at.name});
  std::string real = real_relvar(t.member.declared_in, t.member.name);
  AlgebraPtr old_rows = unprefixed(project(selected, cols), t.member, prefix);
  cx.emit(out, cmd::Set{real, union_of(difference(relvar(real), old_rows), project(rows.rel, items))});
  return {cmd::Block{out}};
}

std::vector<MCommand> Translator::remove(const Delete& del) const {
  Context cx(cat_, db_);
  std::vector<MCommand> out;
  ResolvedPath rp = cat_.resolve_path(del.target, ResolveScope{});
  if (rp.last().kind == StepKind::Complex) {
    ComplexTarget t = complex_target(cat_, cx, del.target);
    assert_stored(cat_, t.owners, t.member, out);
    std::vector<std::string> cols;
    AlgebraPtr rows = unprefixed(target_rows(cx, t, "__row", cols), t.member, "__row");
    cx.emit(out, cmd::Delete{real_relvar(t.member.declared_in, t.member.name), rows});
    return {cmd::Block{out}};
  }
  if (rp.object_class().empty()) fail(ErrorCode::TypeError, to_source(del.target) + " does not name objects");
  AlgebraPtr g = cx.comp.group(del.target);
  std::vector<MCommand> body;
  body.push_back(cmd::Local{"__gone", Schema{{"OID", Domain::Oid}}, g});
  for (const auto& cls : cat_.class_names()) {
    std::vector<std::string> rels{real_relvar(cls)};
    for (const auto& m : cat_.class_def(cls).own)
      if (m.kind == ComponentKind::Complex && m.declared_in == cls) rels.push_back(real_relvar(cls, m.name));
    for (const auto& r : rels) body.push_back(cmd::Delete{r, join(relvar(r), relvar("__gone"), {{"OID", "OID"}})});
  }
  return {cmd::Block{body}};
}

std::vector<MCommand> Translator::exec(const MethodExec& ex) const {
  Context cx(cat_, db_);
  ResolvedPath rp = cat_.resolve_path(ex.group, ResolveScope{});
  std::string cls = rp.object_class();
  if (cls.empty()) fail(ErrorCode::TypeError, to_source(ex.group) + " does not name objects");
  auto m = cat_.find_member(cls, ex.method);
  if (!m || m->kind != ComponentKind::Method) fail(ErrorCode::UnknownMethod, cls + " has no method " + ex.method);
  if (m->params.size() != ex.args.size())
    fail(ErrorCode::ArgumentMismatch, ex.method + " expects " + std::to_string(m->params.size()) + " argument(s), got " +
                                          std::to_string(ex.args.size()));
  AlgebraPtr g = cx.comp.group(ex.group);
  detail::Rows rows{g, {"OID"}, {}};
  std::vector<ProjectItem> items{{attr("OID"), "OID"}};
  for (std::size_t i = 0; i < ex.args.size(); ++i)
    items.push_back({cx.comp.scalar(*ex.args[i], detail::Scope{}, rows), m->params[i].name});
  std::vector<MCommand> out;
  cx.emit(out, cmd::Exec{method_transaction(m->declared_in, ex.method), {g, project(rows.rel, items)}});
  return {cmd::Block{out}};
}

} // namespace rxo::oo
