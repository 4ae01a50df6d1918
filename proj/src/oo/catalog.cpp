#include "rxo/oo/catalog.hpp"

#include "rxo/error.hpp"
#include "rxo/oo/parser.hpp"
#include "rxo/oo/printer.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace rxo::oo {

namespace {

bool same_typed(const std::vector<TypedName>& a, const std::vector<TypedName>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || a[i].type != b[i].type) return false;
  return true;
}

bool is_domain(const std::string& type) {
  auto d = domain_from_name(type);
  return d && *d != Domain::Any;
}

std::string kind_name(ComponentKind k) {
  switch (k) {
  case ComponentKind::Scalar: return "scalar component";
  case ComponentKind::Complex: return "complex component";
  case ComponentKind::Method: return "method";
  }
  return "member";
}

const char* kPayloadHeader = "RXO-CATALOG 1";

} // namespace

bool MemberSpec::same_declaration(const MemberSpec& o) const {
  return name == o.name && kind == o.kind && type == o.type && same_typed(attributes, o.attributes) &&
         keys == o.keys && same_typed(params, o.params);
}

bool ResolvedPath::terminal() const {
  auto k = last().kind;
  return k == StepKind::Scalar || k == StepKind::ComplexAttribute;
}

bool ResolvedPath::scalar_valued() const {
  auto k = last().kind;
  return k == StepKind::Scalar || k == StepKind::ComplexAttribute || k == StepKind::Reference ||
         k == StepKind::ComplexReference;
}

std::string ResolvedPath::object_class() const {
  auto k = last().kind;
  if (k == StepKind::ClassHead || k == StepKind::Reference || k == StepKind::ComplexReference) return last().type;
  return {};
}

std::string real_relvar(const std::string& cls) { return "real_R_" + cls; }
std::string real_relvar(const std::string& cls, const std::string& component) {
  return "real_R_" + cls + "." + component;
}
std::string class_relvar(const std::string& cls) { return "R_" + cls; }
std::string class_relvar(const std::string& cls, const std::string& component) { return "R_" + cls + "." + component; }
std::string binding_relvar(const std::string& root, const std::string& member) { return "R_" + root + "." + member; }
std::string method_transaction(const std::string& root, const std::string& method) {
  return root + "." + method + "'";
}
std::string implementation_transaction(const std::string& owner, const std::string& method) {
  return owner + "." + method + ".impl'";
}

// -- classes ----------------------------------------------------------------

const ClassDef& Catalog::define_class(const ClassCreate& ast) {
  if (classes_.count(ast.name)) fail(ErrorCode::DuplicateClass, "class " + ast.name + " already exists");
  for (const auto& p : ast.parents)
    if (!classes_.count(p)) fail(ErrorCode::UnknownParent, "unknown parent class " + p + " of " + ast.name);

  std::vector<MemberSpec> inherited;
  for (const auto& p : ast.parents) {
    for (auto& m : effective_members(p)) {
      auto it = std::find_if(inherited.begin(), inherited.end(), [&](const MemberSpec& x) { return x.name == m.name; });
      if (it == inherited.end()) inherited.push_back(std::move(m));
      else if (!it->same_declaration(m))
        fail(ErrorCode::MemberConflict, "member " + m.name + " is declared differently by " + it->declared_in + " and " +
                                            m.declared_in);
    }
  }

  auto check_type = [&](const std::string& type, const std::string& where) {
    if (is_domain(type) || type == ast.name || classes_.count(type)) return;
    fail(ErrorCode::UnknownReferencedClass, where + " has unknown type " + type);
  };

  ClassDef def;
  def.name = ast.name;
  def.parents = ast.parents;
  std::set<std::string> own_names;
  for (const auto& c : ast.components) {
    MemberSpec m;
    m.name = c.name;
    m.kind = c.kind;
    m.type = c.type;
    m.attributes = c.attributes;
    m.keys = c.keys;
    m.params = c.params;
    m.declared_in = ast.name;
    if (!own_names.insert(c.name).second) fail(ErrorCode::MemberConflict, "member " + c.name + " declared twice");
    switch (c.kind) {
    case ComponentKind::Scalar: check_type(c.type, ast.name + "." + c.name); break;
    case ComponentKind::Complex: {
      std::set<std::string> attrs;
      for (const auto& a : c.attributes) {
        check_type(a.type, ast.name + "." + c.name + "." + a.name);
        if (!attrs.insert(a.name).second)
          fail(ErrorCode::MemberConflict, "attribute " + a.name + " declared twice in " + c.name);
      }
      for (const auto& key : c.keys)
        for (const auto& k : key)
          if (!attrs.count(k)) fail(ErrorCode::UnknownMember, "key attribute " + k + " is not part of " + c.name);
      break;
    }
    case ComponentKind::Method:
      for (const auto& p : c.params) check_type(p.type, ast.name + "." + c.name + "(" + p.name + ")");
      break;
    }
    auto it = std::find_if(inherited.begin(), inherited.end(), [&](const MemberSpec& x) { return x.name == c.name; });
    if (it != inherited.end()) {
      if (!it->same_declaration(m))
        fail(ErrorCode::MemberConflict, "member " + c.name + " of " + ast.name + " conflicts with the one inherited from " +
                                            it->declared_in);
      continue; // identical redeclaration merges with the inherited member
    }
    def.own.push_back(std::move(m));
  }

  auto own_member = [&](const std::string& name) -> const MemberSpec* {
    for (const auto& m : def.own)
      if (m.name == name) return &m;
    return nullptr;
  };

  for (const auto& key : ast.keys) {
    for (const auto& k : key) {
      const MemberSpec* m = own_member(k);
      if (!m) fail(ErrorCode::UnknownMember, "class key member " + k + " is not an own component of " + ast.name);
      if (m->kind != ComponentKind::Scalar)
        fail(ErrorCode::KindMismatch, "class key member " + k + " is a " + kind_name(m->kind));
    }
    def.keys.push_back(key);
  }

  for (const auto& r : ast.references) {
    std::vector<std::string> local_types;
    if (r.component.empty()) {
      for (const auto& a : r.attrs) {
        const MemberSpec* m = own_member(a);
        if (!m || m->kind != ComponentKind::Scalar)
          fail(ErrorCode::UnknownMember, "reference attribute " + a + " is not an own scalar of " + ast.name);
        local_types.push_back(m->type);
      }
    } else {
      const MemberSpec* m = own_member(r.component);
      if (!m) fail(ErrorCode::UnknownMember, "reference component " + r.component + " is not an own component of " + ast.name);
      if (m->kind != ComponentKind::Complex)
        fail(ErrorCode::KindMismatch, "reference component " + r.component + " is a " + kind_name(m->kind));
      for (const auto& a : r.attrs) {
        auto it = std::find_if(m->attributes.begin(), m->attributes.end(), [&](const TypedName& t) { return t.name == a; });
        if (it == m->attributes.end()) fail(ErrorCode::UnknownMember, "attribute " + a + " is not part of " + r.component);
        local_types.push_back(it->type);
      }
    }
    if (!classes_.count(r.target_class) && r.target_class != ast.name)
      fail(ErrorCode::UnknownReferencedClass, "reference target " + r.target_class + " is not a class");
    if (r.target_attrs.size() != r.attrs.size())
      fail(ErrorCode::KindMismatch, "reference to " + r.target_class + " pairs a different number of attributes");
    for (std::size_t i = 0; i < r.target_attrs.size(); ++i) {
      std::optional<MemberSpec> t;
      if (r.target_class == ast.name) {
        if (const MemberSpec* m = own_member(r.target_attrs[i])) t = *m;
      } else {
        t = find_member(r.target_class, r.target_attrs[i]);
      }
      if (!t || t->kind != ComponentKind::Scalar)
        fail(ErrorCode::UnknownMember, "reference target " + r.target_attrs[i] + " is not a scalar of " + r.target_class);
      if (t->type != local_types[i])
        fail(ErrorCode::KindMismatch, "reference pairs " + r.attrs[i] + " with " + r.target_attrs[i] + " of another type");
    }
    def.references.push_back(r);
  }

  history_.push_back(to_source(Command{ast}));
  order_.push_back(def.name);
  return classes_.emplace(def.name, std::move(def)).first->second;
}

const ClassDef& Catalog::class_def(const std::string& name) const {
  auto it = classes_.find(name);
  if (it == classes_.end()) fail(ErrorCode::UnknownName, "unknown class " + name);
  return it->second;
}

std::vector<std::string> Catalog::ancestors(const std::string& cls) const {
  std::vector<std::string> out;
  std::vector<std::string> frontier = class_def(cls).parents;
  while (!frontier.empty()) {
    std::vector<std::string> next;
    for (const auto& p : frontier) {
      if (std::find(out.begin(), out.end(), p) != out.end()) continue;
      out.push_back(p);
      for (const auto& pp : class_def(p).parents) next.push_back(pp);
    }
    frontier = std::move(next);
  }
  return out;
}

std::vector<std::string> Catalog::descendants(const std::string& cls) const {
  std::vector<std::string> out;
  for (const auto& c : order_)
    if (c != cls && is_ancestor_or_self(cls, c)) out.push_back(c);
  return out;
}

bool Catalog::is_ancestor_or_self(const std::string& anc, const std::string& cls) const {
  if (anc == cls) return true;
  auto a = ancestors(cls);
  return std::find(a.begin(), a.end(), anc) != a.end();
}

std::vector<MemberSpec> Catalog::effective_members(const std::string& cls) const {
  const ClassDef& def = class_def(cls);
  std::vector<MemberSpec> out;
  for (const auto& p : def.parents)
    for (auto& m : effective_members(p))
      if (std::none_of(out.begin(), out.end(), [&](const MemberSpec& x) { return x.name == m.name; }))
        out.push_back(std::move(m));
  for (const auto& m : def.own) out.push_back(m);
  return out;
}

std::optional<MemberSpec> Catalog::find_member(const std::string& cls, const std::string& name) const {
  for (auto& m : effective_members(cls))
    if (m.name == name) return m;
  return std::nullopt;
}

// -- implementations ---------------------------------------------------------

const Implementation& Catalog::register_implementation(const std::string& cls, const std::string& member, ImplBody body,
                                                       std::optional<std::vector<TypedName>> params) {
  if (!has_class(cls)) fail(ErrorCode::UnknownName, "unknown class " + cls);
  auto spec = find_member(cls, member);
  if (!spec) fail(ErrorCode::UnknownMember, cls + " has no member " + member);
  bool stored = std::holds_alternative<StoredBody>(body);
  bool procedure = std::holds_alternative<ProcedureBody>(body);
  switch (spec->kind) {
  case ComponentKind::Method:
    if (!procedure) fail(ErrorCode::KindMismatch, cls + "." + member + " is a method and needs a procedure body");
    if (params && !same_typed(*params, spec->params))
      fail(ErrorCode::KindMismatch, "parameters of " + cls + "." + member + " differ from its declaration");
    break;
  case ComponentKind::Complex:
    if (procedure) fail(ErrorCode::KindMismatch, "complex component " + cls + "." + member + " cannot be a procedure");
    [[fallthrough]];
  case ComponentKind::Scalar:
    if (params && !params->empty())
      fail(ErrorCode::KindMismatch, "component " + cls + "." + member + " takes no parameters");
    break;
  }
  (void)stored;

  Implementation impl;
  impl.owner = cls;
  impl.member = member;
  impl.body = body;
  if (spec->kind == ComponentKind::Method) impl.params = spec->params;

  Realize r;
  r.class_name = cls;
  r.members = {member};
  if (spec->kind == ComponentKind::Method) r.params = spec->params;
  r.body = std::move(body);
  history_.push_back(to_source(Command{r}));

  auto key = std::make_pair(cls, member);
  impls_.erase(key);
  return impls_.emplace(key, std::move(impl)).first->second;
}

const Implementation* Catalog::implementation(const std::string& owner, const std::string& member) const {
  auto it = impls_.find({owner, member});
  return it == impls_.end() ? nullptr : &it->second;
}

std::vector<const Implementation*> Catalog::implementations_of(const std::string& root, const std::string& member) const {
  std::vector<const Implementation*> out;
  if (auto* i = implementation(root, member)) out.push_back(i);
  for (const auto& d : descendants(root))
    if (auto* i = implementation(d, member)) out.push_back(i);
  return out;
}

const Implementation* Catalog::effective_implementation(const std::string& cls, const std::string& member) const {
  std::vector<std::string> candidates;
  std::vector<std::string> chain = ancestors(cls);
  chain.insert(chain.begin(), cls);
  for (const auto& c : chain)
    if (implementation(c, member)) candidates.push_back(c);
  // keep the most specific implementers
  std::vector<std::string> minimal;
  for (const auto& c : candidates) {
    bool shadowed = std::any_of(candidates.begin(), candidates.end(),
                                [&](const std::string& o) { return o != c && is_ancestor_or_self(c, o); });
    if (!shadowed) minimal.push_back(c);
  }
  if (minimal.empty()) return nullptr;
  if (minimal.size() > 1)
    fail(ErrorCode::AmbiguousImplementation,
         member + " of " + cls + " is implemented by both " + minimal[0] + " and " + minimal[1]);
  return implementation(minimal[0], member);
}

bool Catalog::fully_implemented(const std::string& cls, std::string* missing) const {
  for (const auto& m : effective_members(cls)) {
    if (!effective_implementation(cls, m.name)) {
      if (missing) *missing = m.name;
      return false;
    }
  }
  return true;
}

AlgebraPtr Catalog::scope_of(const Implementation& impl) const {
  AlgebraPtr members = project(relvar(real_relvar(impl.owner)), std::vector<std::string>{"OID"});
  AlgebraPtr overridden;
  for (const auto& d : descendants(impl.owner)) {
    if (!implementation(d, impl.member)) continue;
    auto m = project(relvar(real_relvar(d)), std::vector<std::string>{"OID"});
    overridden = overridden ? union_of(overridden, m) : m;
  }
  return overridden ? difference(members, overridden) : members;
}

// -- path resolution ---------------------------------------------------------

ResolvedStep Catalog::member_step(const std::string& cls, const std::string& name) const {
  auto m = find_member(cls, name);
  if (!m) fail(ErrorCode::UnknownName, cls + " has no component " + name);
  ResolvedStep s;
  s.name = name;
  s.owner = m->declared_in;
  switch (m->kind) {
  case ComponentKind::Scalar:
    s.kind = is_domain(m->type) ? StepKind::Scalar : StepKind::Reference;
    s.type = m->type;
    break;
  case ComponentKind::Complex: s.kind = StepKind::Complex; break;
  case ComponentKind::Method: fail(ErrorCode::UnknownName, name + " is a method of " + cls + ", not a component");
  }
  return s;
}

void Catalog::resolve_segments(ResolvedPath& rp, const std::vector<Segment>& segments, const ResolveScope& scope) const {
  for (const auto& seg : segments) {
    const ResolvedStep& prev = rp.last();
    ResolvedStep step;
    switch (prev.kind) {
    case StepKind::ClassHead:
    case StepKind::Reference:
    case StepKind::ComplexReference: step = member_step(prev.type, seg.name); break;
    case StepKind::Complex: {
      auto spec = find_member(prev.owner, prev.name);
      auto it = std::find_if(spec->attributes.begin(), spec->attributes.end(),
                             [&](const TypedName& t) { return t.name == seg.name; });
      if (it == spec->attributes.end()) fail(ErrorCode::UnknownName, prev.name + " has no attribute " + seg.name);
      step.name = seg.name;
      step.owner = prev.owner;
      step.type = it->type;
      step.kind = is_domain(it->type) ? StepKind::ComplexAttribute : StepKind::ComplexReference;
      break;
    }
    case StepKind::Scalar:
    case StepKind::ComplexAttribute:
      fail(ErrorCode::IllegalContinuation, "." + seg.name + " continues the scalar " + prev.name);
    }
    rp.steps.push_back(step);
    if (seg.selection) {
      if (step.kind == StepKind::Scalar || step.kind == StepKind::ComplexAttribute)
        fail(ErrorCode::IllegalContinuation, "selection on the scalar " + seg.name);
      check_selection(*seg.selection, rp, scope);
    }
  }
}

ResolvedPath Catalog::resolve_path(const Path& path, const ResolveScope& scope) const {
  ResolvedPath rp;
  rp.path = path;
  const std::string& head = path.head;
  auto this_head = [&] {
    ResolvedStep s;
    s.name = "this";
    s.kind = StepKind::ClassHead;
    s.owner = scope.class_context;
    s.type = scope.class_context;
    return s;
  };

  if (path.is_post_path()) {
    if (scope.class_context.empty()) fail(ErrorCode::UnknownName, "post-path ." + path.post_text() + " has no base");
    rp.steps.push_back(this_head());
  } else if (path.is_alias()) {
    auto it = scope.aliases.find(head);
    if (it == scope.aliases.end()) fail(ErrorCode::UnknownName, "unknown alias " + head);
    rp.steps = it->second.steps;
  } else if (head == "this" && !scope.class_context.empty()) {
    rp.steps.push_back(this_head());
  } else if (auto v = scope.variables.find(head); v != scope.variables.end()) {
    ResolvedStep s;
    s.name = head;
    s.type = v->second;
    s.kind = is_domain(v->second) ? StepKind::Scalar : StepKind::Reference;
    rp.steps.push_back(s);
  } else if (!scope.class_context.empty() && find_member(scope.class_context, head)) {
    rp.steps.push_back(this_head());
    rp.steps.push_back(member_step(scope.class_context, head));
  } else if (has_class(head)) {
    ResolvedStep s;
    s.name = head;
    s.kind = StepKind::ClassHead;
    s.owner = head;
    s.type = head;
    rp.steps.push_back(s);
  } else {
    fail(ErrorCode::UnknownName, "unknown name " + head);
  }

  if (path.head_selection) {
    auto k = rp.last().kind;
    if (k == StepKind::Scalar || k == StepKind::ComplexAttribute)
      fail(ErrorCode::IllegalContinuation, "selection on the scalar " + head);
    check_selection(*path.head_selection, rp, scope);
  }
  resolve_segments(rp, path.segments, scope);
  return rp;
}

ResolvedPath Catalog::resolve_continuation(const ResolvedPath& base, const std::vector<Segment>& segments) const {
  ResolvedPath rp = base;
  for (const auto& s : segments) rp.path.segments.push_back(s);
  resolve_segments(rp, segments, ResolveScope{});
  return rp;
}

void Catalog::check_selection(const Selection& sel, const ResolvedPath& base, const ResolveScope& scope) const {
  for (const auto& c : sel.conditions) check_condition(*c, base, scope);
}

void Catalog::check_condition(const Expr& e, const ResolvedPath& base, const ResolveScope& scope) const {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::PathRef>) {
          const Path& p = n.path;
          ResolvedPath rp;
          bool relative = p.is_post_path();
          if (!relative && !p.is_alias() && !p.head_selection) {
            // a bare name inside a selection names a member of the selected element
            try {
              Segment first{p.head, std::nullopt};
              rp = resolve_continuation(base, {first});
              relative = true;
            } catch (const Error&) {
            }
            if (relative) {
              rp = resolve_continuation(rp, p.segments);
            }
          } else if (relative) {
            rp = resolve_continuation(base, p.segments);
          }
          if (!relative) rp = resolve_path(p, scope);
          if (!rp.scalar_valued())
            fail(ErrorCode::NonScalarInCondition, to_source(p) + " is not scalar-valued inside a selection");
        } else if constexpr (std::is_same_v<T, expr::Unary>) {
          check_condition(*n.operand, base, scope);
        } else if constexpr (std::is_same_v<T, expr::Binary>) {
          check_condition(*n.lhs, base, scope);
          check_condition(*n.rhs, base, scope);
        } else if constexpr (std::is_same_v<T, expr::IsNull>) {
          check_condition(*n.operand, base, scope);
        }
      },
      e.node);
}

// -- persistence -------------------------------------------------------------

std::string Catalog::serialize() const {
  std::ostringstream out;
  out << kPayloadHeader << "\n";
  for (const auto& h : history_) out << h.size() << "\n" << h << "\n";
  return out.str();
}

Catalog Catalog::deserialize(const std::string& payload) {
  Catalog cat;
  if (payload.empty()) return cat;
  std::istringstream in(payload);
  std::string line;
  if (!std::getline(in, line) || line != kPayloadHeader) fail(ErrorCode::FormatError, "catalog payload has no header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t n = 0;
    try {
      n = std::stoul(line);
    } catch (const std::exception&) {
      fail(ErrorCode::FormatError, "catalog payload: bad entry length '" + line + "'");
    }
    std::string text(n, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(n))) fail(ErrorCode::FormatError, "catalog payload truncated");
    in.get();
    Command c = parse_command(text);
    if (auto* cc = std::get_if<ClassCreate>(&c)) {
      cat.define_class(*cc);
    } else if (auto* r = std::get_if<Realize>(&c)) {
      for (const auto& m : r->members) cat.register_implementation(r->class_name, m, r->body, r->params);
    } else {
      fail(ErrorCode::FormatError, "catalog payload holds an unexpected command");
    }
  }
  return cat;
}

} // namespace rxo::oo
