#include "compile.hpp"

#include "rxo/oo/printer.hpp"

#include <algorithm>

namespace rxo::oo::detail {

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

bool contains_aggregate(const Expr& e) {
  return std::visit(overloaded{
                        [](const expr::Aggregate&) { return true; },
                        [](const expr::Unary& u) { return contains_aggregate(*u.operand); },
                        [](const expr::Binary& b) { return contains_aggregate(*b.lhs) || contains_aggregate(*b.rhs); },
                        [](const expr::IsNull& n) { return contains_aggregate(*n.operand); },
                        [](const auto&) { return false; },
                    },
                    e.node);
}

bool bare_count(const Expr& e) {
  auto* a = std::get_if<expr::Aggregate>(&e.node);
  return a && a->kind == AggKind::Count;
}

std::vector<std::pair<std::string, std::string>> prefixed(const std::vector<std::string>& names,
                                                          const std::string& prefix) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& n : names) out.emplace_back(n, prefix + "." + n);
  return out;
}

std::vector<std::string> attribute_names(const std::vector<TypedName>& attrs) {
  std::vector<std::string> out;
  for (const auto& a : attrs) out.push_back(a.name);
  return out;
}

ScalarPtr not_null(const std::string& col) { return is_null(attr(col), true); }

} // namespace

bool Rows::has(const std::string& c) const { return std::find(columns.begin(), columns.end(), c) != columns.end(); }

Domain domain_of_type(const Catalog& cat, const std::string& type) {
  if (cat.has_class(type)) return Domain::Oid;
  return domain_from_name(type).value_or(Domain::Any);
}

std::string Compiler::item_name(const Expr& e) {
  if (auto* p = std::get_if<expr::PathRef>(&e.node)) {
    const Path& path = p->path;
    if (path.segments.empty()) return path.head;
    if (path.is_alias() || path.is_post_path() || path.head == "this") return path.post_text();
    return path.head + "." + path.post_text();
  }
  return to_source(e);
}

// -- anchors and columns ------------------------------------------------------

Anchor Compiler::complex_anchor(const std::string& root, const std::string& component, const std::string& prefix) const {
  auto spec = cat_.find_member(root, component);
  Anchor a;
  a.kind = Anchor::Kind::ComplexRow;
  a.cls = spec->declared_in;
  a.complex = component;
  a.prefix = prefix;
  for (const auto& t : spec->attributes) a.types[t.name] = t.type;
  return a;
}

bool Compiler::anchor_has(const Anchor& a, const std::string& name) const {
  if (a.kind == Anchor::Kind::Object) {
    auto m = cat_.find_member(a.cls, name);
    return m && m->kind != ComponentKind::Method;
  }
  return a.types.count(name) > 0;
}

void Compiler::ensure_scalar(Rows& rows, const std::string& obj_col, const MemberSpec& spec, const std::string& col) {
  if (rows.has(col)) return;
  std::string k = em_.fresh("k");
  auto bound = rename(relvar(binding_relvar(spec.declared_in, spec.name)), {{"OID", k}, {spec.name, col}});
  rows.rel = left_join(rows.rel, bound, {{obj_col, k}});
  rows.add(col);
}

void Compiler::ensure_complex(Rows& rows, const std::string& obj_col, const MemberSpec& spec,
                              const std::string& prefix, bool outer) {
  if (rows.joined.count(prefix)) return;
  std::string k = em_.fresh("k");
  auto names = attribute_names(spec.attributes);
  auto renames = prefixed(names, prefix);
  renames.emplace_back("OID", k);
  auto bound = rename(relvar(binding_relvar(spec.declared_in, spec.name)), renames);
  rows.rel = outer ? left_join(rows.rel, bound, {{obj_col, k}}) : join(rows.rel, bound, {{obj_col, k}});
  for (const auto& n : names) rows.add(prefix + "." + n);
  rows.joined.insert(prefix);
}

Anchor Compiler::base_of(const Path& p, const Scope& s, std::vector<std::string>& segs, std::string& direct) const {
  segs.clear();
  for (const auto& seg : p.segments) segs.push_back(seg.name);
  auto with_head = [&] { segs.insert(segs.begin(), p.head); };

  if (p.is_post_path()) {
    if (s.selection) return *s.selection;
    if (s.self) return *s.self;
    fail(ErrorCode::UnknownName, "post-path ." + p.post_text() + " has no base");
  }
  if (p.is_alias()) {
    auto it = s.aliases.find(p.head);
    if (it == s.aliases.end()) fail(ErrorCode::UnknownName, "unknown alias " + p.head);
    return it->second;
  }
  if (s.selection && anchor_has(*s.selection, p.head)) {
    with_head();
    return *s.selection;
  }
  for (const auto& name : s.implicit) {
    const Anchor& a = s.aliases.at(name);
    if (anchor_has(a, p.head)) {
      with_head();
      return a;
    }
  }
  if (auto v = s.variables.find(p.head); v != s.variables.end()) {
    if (segs.empty()) {
      direct = v->second.column;
      return {};
    }
    if (!cat_.has_class(v->second.type))
      fail(ErrorCode::IllegalContinuation, "." + segs.front() + " continues the scalar " + p.head);
    Anchor a;
    a.column = v->second.column;
    a.cls = v->second.type;
    a.prefix = v->second.column;
    return a;
  }
  if (p.head == "this" && s.self) return *s.self;
  if (s.self && anchor_has(*s.self, p.head)) {
    with_head();
    return *s.self;
  }
  fail(ErrorCode::UnknownName, "unknown name " + p.head);
}

std::string Compiler::walk(Anchor a, const std::vector<std::string>& segs, Rows& rows, std::string* last_type) {
  if (segs.empty()) {
    if (a.kind != Anchor::Kind::Object) fail(ErrorCode::NonTerminalProjection, a.prefix + " is a row, not a value");
    return a.column;
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string& seg = segs[i];
    bool last = i + 1 == segs.size();
    std::string next_type;
    std::string col;
    if (a.kind == Anchor::Kind::Object) {
      auto m = cat_.find_member(a.cls, seg);
      if (!m || m->kind == ComponentKind::Method) fail(ErrorCode::UnknownName, a.cls + " has no component " + seg);
      if (m->kind == ComponentKind::Complex) {
        std::string prefix = a.prefix + "." + seg;
        ensure_complex(rows, a.column, *m, prefix);
        if (last) fail(ErrorCode::NonTerminalProjection, prefix + " is a set of rows, not a value");
        a = complex_anchor(m->declared_in, seg, prefix);
        continue;
      }
      col = a.prefix + "." + seg;
      ensure_scalar(rows, a.column, *m, col);
      next_type = m->type;
    } else {
      auto t = a.types.find(seg);
      if (t == a.types.end()) fail(ErrorCode::UnknownName, a.prefix + " has no attribute " + seg);
      col = a.prefix + "." + seg;
      next_type = t->second;
    }
    if (last) {
      if (last_type) *last_type = next_type;
      return col;
    }
    if (!cat_.has_class(next_type)) fail(ErrorCode::IllegalContinuation, "." + segs[i + 1] + " continues the scalar " + seg);
    a = Anchor{};
    a.column = col;
    a.cls = next_type;
    a.prefix = col;
  }
  return {}; // unreachable
}

std::string Compiler::column(const Path& p, const Scope& s, Rows& rows) {
  if (p.has_selection()) fail(ErrorCode::Unsupported, "selection inside the value path " + to_source(p));
  std::vector<std::string> segs;
  std::string direct;
  Anchor a = base_of(p, s, segs, direct);
  if (!direct.empty()) return direct;
  return walk(a, segs, rows);
}

// -- expressions --------------------------------------------------------------

ScalarPtr Compiler::scalar(const Expr& e, const Scope& s, Rows& rows) { return scalar_impl(e, s, rows, nullptr); }

ScalarPtr Compiler::scalar_impl(const Expr& e, const Scope& s, Rows& rows, std::vector<AggregateSpec>* aggs) {
  return std::visit(
      overloaded{
          [&](const expr::Literal& l) { return lit(l.value); },
          [&](const expr::PathRef& p) { return attr(column(p.path, s, rows)); },
          [&](const expr::Unary& u) { return unary(u.op, scalar_impl(*u.operand, s, rows, aggs)); },
          [&](const expr::Binary& b) {
            auto l = scalar_impl(*b.lhs, s, rows, aggs);
            return binary(b.op, l, scalar_impl(*b.rhs, s, rows, aggs));
          },
          [&](const expr::IsNull& n) { return is_null(scalar_impl(*n.operand, s, rows, aggs), n.negated); },
          [&](const expr::Aggregate& a) -> ScalarPtr {
            if (!aggs) fail(ErrorCode::TypeError, "aggregate " + to_source(e) + " outside a SELECT list");
            AggregateSpec spec;
            spec.func = a.kind == AggKind::Sum ? AggFunc::Sum : AggFunc::Count;
            for (const auto& arg : a.args) {
              auto v = scalar_impl(*arg, s, rows, nullptr);
              spec.expr = spec.expr ? binary(BinaryOp::Mul, spec.expr, v) : v;
            }
            if (spec.func == AggFunc::Sum && !spec.expr) fail(ErrorCode::TypeError, "SUM needs an argument");
            spec.name = em_.fresh("agg");
            aggs->push_back(spec);
            return attr(spec.name);
          },
          [&](const expr::SubSelect& q) -> ScalarPtr {
            std::string col = em_.fresh("sub");
            SelectResult r;
            if (s.self && rows.has("OID")) {
              Scope inner;
              inner.cls = s.cls;
              inner.self = s.self;
              inner.variables = s.variables;
              Rows ctx;
              ctx.columns = {"OID"};
              for (const auto& [_, v] : s.variables)
                if (rows.has(v.column) && v.column != "OID") ctx.columns.push_back(v.column);
              ctx.rel = project(rows.rel, ctx.columns);
              r = select(*q.select, &inner, &ctx);
              if (r.names.size() != 1) fail(ErrorCode::TypeError, "a scalar subquery must select one value");
              std::string k = em_.fresh("k");
              rows.rel = left_join(rows.rel, rename(r.rel, {{"OID", k}, {r.names[0], col}}), {{"OID", k}});
            } else {
              r = select(*q.select, nullptr, nullptr);
              if (r.names.size() != 1) fail(ErrorCode::TypeError, "a scalar subquery must select one value");
              rows.rel = product(rows.rel, rename(r.rel, {{r.names[0], col}}));
            }
            rows.add(col);
            if (r.counts[0]) return case_when({{is_null(attr(col)), lit(Value::integer(0))}}, attr(col));
            return attr(col);
          },
          [&](const expr::New& n) -> ScalarPtr {
            if (!on_new_) fail(ErrorCode::Unsupported, "NEW is not allowed here");
            std::string local = on_new_(*n.object);
            std::string col = em_.fresh("new");
            rows.rel = product(rows.rel, rename(project(relvar(local), std::vector<std::string>{prs::kAllocAttribute}),
                                                {{prs::kAllocAttribute, col}}));
            rows.add(col);
            return attr(col);
          },
          [&](const expr::FirstOf& f) -> ScalarPtr {
            auto g = group(f.group);
            em_.pre.push_back(prs::cmd::Assert{g, prs::cmd::AssertMode::ExactlyOne, ErrorCode::FirstOfCardinality,
                                               "FIRST OF " + to_source(f.group) + " must name exactly one object"});
            std::string col = em_.fresh("first");
            rows.rel = product(rows.rel, rename(g, {{"OID", col}}));
            rows.add(col);
            return attr(col);
          },
      },
      e.node);
}

AlgebraPtr Compiler::value(const Expr& e, const Scope& s, Rows rows, const std::string& name) {
  auto v = scalar(e, s, rows);
  return project(rows.rel, std::vector<ProjectItem>{{attr("OID"), "OID"}, {v, name}});
}

// -- group references ---------------------------------------------------------

AlgebraPtr Compiler::restrict_objects(AlgebraPtr rel, const std::string& cls, const Selection& sel) {
  AlgebraPtr base = project(rel, std::vector<std::string>{"OID"});
  AlgebraPtr out = base;
  for (const auto& cond : sel.conditions) {
    Rows r{base, {"OID"}, {}};
    Scope cs;
    Anchor a;
    a.column = "OID";
    a.cls = cls;
    a.prefix = em_.fresh("sel");
    cs.selection = a;
    auto c = scalar(*cond, cs, r);
    out = intersect(out, project(rxo::select(r.rel, c), std::vector<std::string>{"OID"}));
  }
  return out;
}

AlgebraPtr Compiler::restrict_rows(AlgebraPtr rel, const Anchor& row_anchor, std::vector<std::string> columns,
                                   const Selection& sel) {
  AlgebraPtr out = rel;
  for (const auto& cond : sel.conditions) {
    Rows r{rel, columns, {}};
    Scope cs;
    cs.selection = row_anchor;
    auto c = scalar(*cond, cs, r);
    out = intersect(out, project(rxo::select(r.rel, c), columns));
  }
  return out;
}

AlgebraPtr Compiler::group(const Path& p) {
  ResolvedPath rp = cat_.resolve_path(p, ResolveScope{});
  if (rp.steps[0].kind != StepKind::ClassHead || !cat_.has_class(p.head))
    fail(ErrorCode::Unsupported, "group reference " + to_source(p) + " must start at a class");
  std::string cls = p.head;
  AlgebraPtr g = project(relvar(real_relvar(cls)), std::vector<std::string>{"OID"});
  if (p.head_selection) g = restrict_objects(g, cls, *p.head_selection);
  for (std::size_t i = 0; i < p.segments.size(); ++i) {
    const Segment& seg = p.segments[i];
    const ResolvedStep& st = rp.steps[i + 1];
    if (st.kind == StepKind::Reference) {
      auto j = join(g, relvar(binding_relvar(st.owner, seg.name)), {{"OID", "OID"}});
      g = rename(project(rxo::select(j, not_null(seg.name)), std::vector<std::string>{seg.name}), {{seg.name, "OID"}});
      cls = st.type;
      if (seg.selection) g = restrict_objects(g, cls, *seg.selection);
    } else if (st.kind == StepKind::Complex && i + 1 < p.segments.size()) {
      Anchor a = complex_anchor(st.owner, seg.name, em_.fresh("c"));
      auto spec = cat_.find_member(st.owner, seg.name);
      auto names = attribute_names(spec->attributes);
      std::vector<std::string> cols;
      for (const auto& n : names) cols.push_back(a.prefix + "." + n);
      AlgebraPtr rows = project(rename(join(g, relvar(binding_relvar(st.owner, seg.name)), {{"OID", "OID"}}),
                                       prefixed(names, a.prefix)),
                                cols);
      if (seg.selection) rows = restrict_rows(rows, a, cols, *seg.selection);
      const Segment& ref = p.segments[++i];
      const ResolvedStep& rst = rp.steps[i + 1];
      if (rst.kind != StepKind::ComplexReference)
        fail(ErrorCode::TypeError, to_source(p) + " does not name objects");
      std::string col = a.prefix + "." + ref.name;
      g = rename(project(rxo::select(rows, not_null(col)), std::vector<std::string>{col}), {{col, "OID"}});
      cls = rst.type;
      if (ref.selection) g = restrict_objects(g, cls, *ref.selection);
    } else {
      fail(ErrorCode::TypeError, to_source(p) + " does not name objects");
    }
  }
  return g;
}

// -- queries ------------------------------------------------------------------

void Compiler::add_from(const FromItem& f, const std::string& alias, Scope& s, Rows& rows, bool& have) {
  const Path& p = f.path;
  auto attach = [&](AlgebraPtr item, const std::vector<std::string>& cols) {
    rows.rel = have ? product(rows.rel, item) : item;
    have = true;
    for (const auto& c : cols) rows.add(c);
  };
  bool is_class = cat_.has_class(p.head);
  bool local = !is_class && (p.head == "this" || p.is_post_path() || p.is_alias() || s.variables.count(p.head) ||
                             (s.self && anchor_has(*s.self, p.head)));
  Anchor anchor;

  if (local) {
    if (!have) fail(ErrorCode::Unsupported, "FROM item " + to_source(p) + " needs an enclosing object");
    if (p.head_selection && !p.segments.empty()) fail(ErrorCode::Unsupported, "selection inside the FROM path " + to_source(p));
    const std::optional<Selection>& last_sel = p.segments.empty() ? p.head_selection : p.segments.back().selection;
    for (std::size_t i = 0; i + 1 < p.segments.size(); ++i)
      if (p.segments[i].selection) fail(ErrorCode::Unsupported, "selection inside the FROM path " + to_source(p));
    std::vector<std::string> segs;
    std::string direct;
    Anchor base = base_of(p, s, segs, direct);
    if (!direct.empty()) {
      anchor.column = direct;
      auto v = s.variables.find(p.head);
      if (!cat_.has_class(v->second.type)) fail(ErrorCode::TypeError, p.head + " does not name objects");
      anchor.cls = v->second.type;
      anchor.prefix = alias;
    } else if (segs.empty()) {
      anchor = base;
      anchor.prefix = alias;
    } else {
      std::vector<std::string> init(segs.begin(), segs.end() - 1);
      Anchor owner = base;
      if (!init.empty()) {
        std::string owner_cls;
        owner = Anchor{};
        owner.column = walk(base, init, rows, &owner_cls);
        owner.cls = owner_cls;
      }
      if (owner.kind != Anchor::Kind::Object) fail(ErrorCode::Unsupported, "FROM item " + to_source(p));
      const std::string& owner_cls = owner.cls;
      auto m = cat_.find_member(owner_cls, segs.back());
      if (!m || m->kind == ComponentKind::Method) fail(ErrorCode::UnknownName, owner_cls + " has no component " + segs.back());
      if (m->kind == ComponentKind::Complex) {
        ensure_complex(rows, owner.column, *m, alias, false);
        anchor = complex_anchor(m->declared_in, segs.back(), alias);
        if (last_sel) rows.rel = restrict_rows(rows.rel, anchor, rows.columns, *last_sel);
      } else {
        if (!cat_.has_class(m->type)) fail(ErrorCode::TypeError, to_source(p) + " does not name objects");
        std::string col = walk(base, segs, rows);
        rows.rel = rxo::select(rows.rel, not_null(col));
        anchor.column = col;
        anchor.cls = m->type;
        anchor.prefix = alias;
        if (last_sel) rows.rel = restrict_rows(rows.rel, anchor, rows.columns, *last_sel);
      }
    }
  } else if (is_class) {
    ResolvedPath rp = cat_.resolve_path(p, ResolveScope{});
    if (rp.last().kind == StepKind::Complex) {
      Path owners = p;
      owners.segments.pop_back();
      const ResolvedStep& st = rp.last();
      auto m = cat_.find_member(st.owner, st.name);
      auto names = attribute_names(m->attributes);
      auto renames = prefixed(names, alias);
      renames.emplace_back("OID", alias);
      std::vector<std::string> cols{alias};
      for (const auto& n : names) cols.push_back(alias + "." + n);
      anchor = complex_anchor(st.owner, st.name, alias);
      AlgebraPtr item = rename(join(group(owners), relvar(binding_relvar(st.owner, st.name)), {{"OID", "OID"}}), renames);
      if (p.segments.back().selection) item = restrict_rows(item, anchor, cols, *p.segments.back().selection);
      attach(item, cols);
    } else {
      std::string cls = rp.object_class();
      if (cls.empty()) fail(ErrorCode::TypeError, to_source(p) + " does not name objects");
      anchor.column = alias;
      anchor.cls = cls;
      anchor.prefix = alias;
      attach(rename(group(p), {{"OID", alias}}), {alias});
    }
  } else if (const auto* def = db_.find(p.head)) {
    if (!p.segments.empty()) fail(ErrorCode::Unsupported, "path through the relvar " + p.head);
    anchor.kind = Anchor::Kind::Plain;
    anchor.prefix = alias;
    std::vector<std::string> names = def->schema.names();
    std::vector<std::string> cols;
    for (const auto& a : def->schema.attributes()) {
      auto rc = def->ref_classes.find(a.name);
      anchor.types[a.name] = rc != def->ref_classes.end() ? rc->second : std::string(to_string(a.domain));
      cols.push_back(alias + "." + a.name);
    }
    AlgebraPtr item = rename(relvar(p.head), prefixed(names, alias));
    if (p.head_selection) item = restrict_rows(item, anchor, cols, *p.head_selection);
    attach(item, cols);
  } else {
    fail(ErrorCode::UnknownName, "unknown FROM source " + p.head);
  }
  s.aliases[alias] = anchor;
}

SelectResult Compiler::select(const Select& q, const Scope* ctx, const Rows* ctx_rows) {
  Scope s;
  if (ctx) {
    s.cls = ctx->cls;
    s.self = ctx->self;
    s.variables = ctx->variables;
  }
  Rows rows;
  bool have = false;
  if (ctx_rows) {
    rows = *ctx_rows;
    have = true;
  }
  for (const auto& f : q.from) {
    std::string alias = f.alias.empty() ? em_.fresh("from") : f.alias;
    if (s.aliases.count(alias)) fail(ErrorCode::DuplicateName, "alias " + alias + " is used twice");
    add_from(f, alias, s, rows, have);
    if (f.alias.empty()) s.implicit.push_back(alias);
  }
  if (!have) rows.rel = literal(Relation(Schema{}, {Tuple{}}));
  if (q.where) {
    auto c = scalar(*q.where, s, rows);
    rows.rel = rxo::select(rows.rel, c);
  }

  SelectResult out;
  for (const auto& item : q.items) {
    std::string name = item.alias.empty() ? item_name(*item.value) : item.alias;
    std::string unique = name;
    for (int n = 2; std::find(out.names.begin(), out.names.end(), unique) != out.names.end(); ++n)
      unique = name + "_" + std::to_string(n);
    out.names.push_back(unique);
    out.counts.push_back(bare_count(*item.value));
  }
  bool with_oid = ctx_rows != nullptr;
  bool aggregated = !q.group_by.empty() ||
                    std::any_of(q.items.begin(), q.items.end(), [](const SelectItem& i) { return contains_aggregate(*i.value); });

  std::vector<ProjectItem> proj;
  if (with_oid) proj.push_back({attr("OID"), "OID"});
  if (!aggregated) {
    for (std::size_t i = 0; i < q.items.size(); ++i) proj.push_back({scalar(*q.items[i].value, s, rows), out.names[i]});
    out.rel = project(rows.rel, proj);
    return out;
  }

  std::vector<std::string> keys;
  if (with_oid) keys.push_back("OID");
  std::vector<std::pair<ScalarPtr, std::string>> computed;
  for (const auto& g : q.group_by) {
    auto v = scalar(*g, s, rows);
    if (auto* a = std::get_if<scalar::Attr>(&v->node())) {
      keys.push_back(a->name);
    } else {
      std::string col = em_.fresh("grp");
      computed.emplace_back(v, col);
      keys.push_back(col);
    }
  }
  std::vector<AggregateSpec> aggs;
  std::vector<ScalarPtr> items;
  for (const auto& item : q.items) items.push_back(scalar_impl(*item.value, s, rows, &aggs));
  if (!computed.empty()) {
    std::vector<ProjectItem> ext;
    for (const auto& c : rows.columns) ext.push_back({attr(c), c});
    for (const auto& [v, col] : computed) ext.push_back({v, col});
    rows.rel = project(rows.rel, ext);
  }
  std::set<std::string> available(keys.begin(), keys.end());
  for (const auto& a : aggs) available.insert(a.name);
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (const auto& ref : referenced_attributes(*items[i]))
      if (!available.count(ref))
        fail(ErrorCode::TypeError, to_source(*q.items[i].value) + " is neither grouped nor aggregated");
    proj.push_back({items[i], out.names[i]});
  }
  out.rel = project(group_aggregate(rows.rel, keys, aggs), proj);
  return out;
}

} // namespace rxo::oo::detail
