#include "rxo/core/algebra.hpp"

#include "rxo/error.hpp"

#include <unordered_map>

namespace rxo {

namespace {
template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

AlgebraPtr make(algebra::Node n) { return std::make_shared<AlgebraExpr>(std::move(n)); }
} // namespace

AlgebraPtr relvar(std::string name) { return make(algebra::RelvarRef{std::move(name)}); }
AlgebraPtr literal(Relation r) { return make(algebra::Literal{std::move(r)}); }
AlgebraPtr product(AlgebraPtr l, AlgebraPtr r) { return make(algebra::Product{std::move(l), std::move(r)}); }
AlgebraPtr union_of(AlgebraPtr l, AlgebraPtr r) {
  return make(algebra::SetOp{SetOpKind::Union, std::move(l), std::move(r)});
}
AlgebraPtr difference(AlgebraPtr l, AlgebraPtr r) {
  return make(algebra::SetOp{SetOpKind::Difference, std::move(l), std::move(r)});
}
AlgebraPtr intersect(AlgebraPtr l, AlgebraPtr r) {
  return make(algebra::SetOp{SetOpKind::Intersect, std::move(l), std::move(r)});
}
AlgebraPtr join(AlgebraPtr l, AlgebraPtr r, std::vector<std::pair<std::string, std::string>> on) {
  return make(algebra::Join{std::move(l), std::move(r), std::move(on), false});
}
AlgebraPtr left_join(AlgebraPtr l, AlgebraPtr r, std::vector<std::pair<std::string, std::string>> on) {
  return make(algebra::Join{std::move(l), std::move(r), std::move(on), true});
}
AlgebraPtr project(AlgebraPtr in, std::vector<ProjectItem> items) {
  return make(algebra::Project{std::move(in), std::move(items)});
}
AlgebraPtr project(AlgebraPtr in, const std::vector<std::string>& names) {
  std::vector<ProjectItem> items;
  for (const auto& n : names) items.push_back({attr(n), n});
  return project(std::move(in), std::move(items));
}
AlgebraPtr select(AlgebraPtr in, ScalarPtr cond) { return make(algebra::Select{std::move(in), std::move(cond)}); }
AlgebraPtr rename(AlgebraPtr in, std::vector<std::pair<std::string, std::string>> renames) {
  return make(algebra::Rename{std::move(in), std::move(renames)});
}
AlgebraPtr group_aggregate(AlgebraPtr in, std::vector<std::string> group_by, std::vector<AggregateSpec> aggs) {
  return make(algebra::GroupAggregate{std::move(in), std::move(group_by), std::move(aggs)});
}

MapEnv::MapEnv(std::map<std::string, Relation> rels) {
  for (auto& [k, v] : rels) bind(k, std::move(v));
}

void MapEnv::bind(const std::string& name, Relation r) {
  rels_[name] = std::make_shared<const Relation>(std::move(r));
}

std::shared_ptr<const Relation> MapEnv::lookup(const std::string& name) const {
  auto it = rels_.find(name);
  if (it == rels_.end()) fail(ErrorCode::UnknownRelvar, "relvar '" + name + "' is not defined");
  return it->second;
}

Schema MapEnv::schema_of(const std::string& name) const { return lookup(name)->schema(); }

namespace {

Schema product_schema(const Schema& l, const Schema& r) {
  Schema out = l;
  for (const auto& a : r.attributes()) {
    if (out.contains(a.name)) fail(ErrorCode::SchemaMismatch, "product operands share attribute '" + a.name + "'");
    out.add(a);
  }
  return out;
}

Schema setop_schema(const Schema& l, const Schema& r, SetOpKind kind) {
  const char* what = kind == SetOpKind::Union ? "union" : kind == SetOpKind::Difference ? "difference" : "intersect";
  if (l.arity() != r.arity())
    fail(ErrorCode::SchemaMismatch, std::string(what) + " of " + l.to_string() + " and " + r.to_string());
  std::vector<Attribute> attrs;
  for (const auto& a : l.attributes()) {
    auto j = r.index_of(a.name);
    if (!j) fail(ErrorCode::SchemaMismatch, std::string(what) + " of " + l.to_string() + " and " + r.to_string());
    auto d = unify(a.domain, r[*j].domain);
    if (!d) fail(ErrorCode::SchemaMismatch, std::string(what) + ": attribute " + a.name + " domains differ");
    attrs.push_back({a.name, *d});
  }
  return Schema(std::move(attrs));
}

struct JoinPlan {
  Schema out;
  std::vector<std::size_t> left_keys, right_keys, right_kept;
};

JoinPlan plan_join(const Schema& l, const Schema& r, const std::vector<std::pair<std::string, std::string>>& on) {
  JoinPlan p;
  std::set<std::size_t> dropped;
  for (const auto& [a, b] : on) {
    p.left_keys.push_back(l.require(a));
    std::size_t j = r.require(b);
    p.right_keys.push_back(j);
    dropped.insert(j);
  }
  p.out = l;
  for (std::size_t j = 0; j < r.arity(); ++j) {
    if (dropped.count(j)) continue;
    if (p.out.contains(r[j].name))
      fail(ErrorCode::SchemaMismatch, "join operands share non-criteria attribute '" + r[j].name + "'");
    p.out.add(r[j]);
    p.right_kept.push_back(j);
  }
  return p;
}

Schema project_schema(const Schema& in, const std::vector<ProjectItem>& items) {
  Schema out;
  for (const auto& it : items) out.add({it.name, infer_domain(*it.expr, in)});
  return out;
}

Schema rename_schema(const Schema& in, const std::vector<std::pair<std::string, std::string>>& renames) {
  std::vector<Attribute> attrs = in.attributes();
  for (const auto& [from, to] : renames) {
    std::size_t i = in.require(from);
    attrs[i].name = to;
  }
  return Schema(std::move(attrs));
}

Schema group_schema(const Schema& in, const std::vector<std::string>& group_by, const std::vector<AggregateSpec>& aggs) {
  Schema out;
  for (const auto& g : group_by) out.add(in[in.require(g)]);
  for (const auto& a : aggs) {
    Domain d = Domain::Integer;
    if (a.func == AggFunc::Sum) {
      if (!a.expr) fail(ErrorCode::TypeError, "SUM requires an argument");
      d = infer_domain(*a.expr, in);
      if (!is_numeric(d) && d != Domain::Any) fail(ErrorCode::TypeError, "SUM over " + std::string(to_string(d)));
    } else if (a.expr) {
      infer_domain(*a.expr, in);
    }
    out.add({a.name, d});
  }
  return out;
}

Schema infer(const AlgebraExpr& e, const std::function<Schema(const std::string&)>& schema_of) {
  return std::visit(
      overloaded{
          [&](const algebra::RelvarRef& r) { return schema_of(r.name); },
          [&](const algebra::Literal& l) { return l.value.schema(); },
          [&](const algebra::Product& p) { return product_schema(infer(*p.lhs, schema_of), infer(*p.rhs, schema_of)); },
          [&](const algebra::SetOp& s) {
            return setop_schema(infer(*s.lhs, schema_of), infer(*s.rhs, schema_of), s.kind);
          },
          [&](const algebra::Join& j) {
            return plan_join(infer(*j.lhs, schema_of), infer(*j.rhs, schema_of), j.on).out;
          },
          [&](const algebra::Project& p) { return project_schema(infer(*p.input, schema_of), p.items); },
          [&](const algebra::Select& s) {
            Schema in = infer(*s.input, schema_of);
            Domain d = infer_domain(*s.condition, in);
            if (d != Domain::Boolean && d != Domain::Any) fail(ErrorCode::TypeError, "selection condition is not BOOLEAN");
            return in;
          },
          [&](const algebra::Rename& r) { return rename_schema(infer(*r.input, schema_of), r.renames); },
          [&](const algebra::GroupAggregate& g) {
            return group_schema(infer(*g.input, schema_of), g.group_by, g.aggregates);
          },
      },
      e.node());
}

Relation eval(const AlgebraExpr& e, const RelationEnv& env);

Relation eval_join(const algebra::Join& j, const RelationEnv& env) {
  Relation l = eval(*j.lhs, env);
  Relation r = eval(*j.rhs, env);
  JoinPlan plan = plan_join(l.schema(), r.schema(), j.on);
  std::map<Tuple, std::vector<const Tuple*>> index;
  for (const auto& t : r.tuples()) {
    Tuple key;
    bool has_null = false;
    for (auto k : plan.right_keys) {
      has_null = has_null || t[k].is_null();
      key.push_back(t[k]);
    }
    if (!has_null) index[std::move(key)].push_back(&t);
  }
  Relation out(plan.out);
  for (const auto& t : l.tuples()) {
    Tuple key;
    bool has_null = false;
    for (auto k : plan.left_keys) {
      has_null = has_null || t[k].is_null();
      key.push_back(t[k]);
    }
    // numeric keys of mixed domains are normalised to FLOAT for matching
    for (std::size_t i = 0; i < key.size(); ++i) {
      Domain rd = r.schema()[plan.right_keys[i]].domain;
      if (rd == Domain::Float && key[i].domain() == Domain::Integer) key[i] = Value::real(key[i].as_number());
    }
    auto it = has_null ? index.end() : index.find(key);
    if (it == index.end()) {
      if (j.left_outer) {
        Tuple nt = t;
        nt.resize(plan.out.arity());
        out.insert_unchecked(std::move(nt));
      }
      continue;
    }
    for (const Tuple* rt : it->second) {
      Tuple nt = t;
      for (auto k : plan.right_kept) nt.push_back((*rt)[k]);
      out.insert_unchecked(std::move(nt));
    }
  }
  return out;
}

Relation eval(const AlgebraExpr& e, const RelationEnv& env) {
  return std::visit(
      overloaded{
          [&](const algebra::RelvarRef& r) -> Relation { return *env.lookup(r.name); },
          [&](const algebra::Literal& l) -> Relation { return l.value; },
          [&](const algebra::Product& p) -> Relation {
            Relation l = eval(*p.lhs, env), r = eval(*p.rhs, env);
            Relation out(product_schema(l.schema(), r.schema()));
            for (const auto& a : l.tuples())
              for (const auto& b : r.tuples()) {
                Tuple t = a;
                t.insert(t.end(), b.begin(), b.end());
                out.insert_unchecked(std::move(t));
              }
            return out;
          },
          [&](const algebra::SetOp& s) -> Relation {
            Relation l = eval(*s.lhs, env), r = eval(*s.rhs, env);
            Schema schema = setop_schema(l.schema(), r.schema(), s.kind);
            Relation lc = conform(l, schema), rc = conform(r, schema);
            Relation out(schema);
            switch (s.kind) {
            case SetOpKind::Union:
              for (const auto& t : lc.tuples()) out.insert_unchecked(t);
              for (const auto& t : rc.tuples()) out.insert_unchecked(t);
              break;
            case SetOpKind::Difference:
              for (const auto& t : lc.tuples())
                if (!rc.contains(t)) out.insert_unchecked(t);
              break;
            case SetOpKind::Intersect:
              for (const auto& t : lc.tuples())
                if (rc.contains(t)) out.insert_unchecked(t);
              break;
            }
            return out;
          },
          [&](const algebra::Join& j) -> Relation { return eval_join(j, env); },
          [&](const algebra::Project& p) -> Relation {
            Relation in = eval(*p.input, env);
            Schema schema = project_schema(in.schema(), p.items);
            std::vector<CompiledScalar> fns;
            for (const auto& it : p.items) fns.push_back(compile(*it.expr, in.schema()));
            Relation out(schema);
            for (const auto& t : in.tuples()) {
              Tuple nt;
              nt.reserve(fns.size());
              for (std::size_t i = 0; i < fns.size(); ++i) {
                Value v = fns[i](t);
                if (schema[i].domain == Domain::Float && v.domain() == Domain::Integer) v = Value::real(v.as_number());
                nt.push_back(std::move(v));
              }
              out.insert_unchecked(std::move(nt));
            }
            return out;
          },
          [&](const algebra::Select& s) -> Relation {
            Relation in = eval(*s.input, env);
            auto cond = compile(*s.condition, in.schema());
            Relation out(in.schema());
            for (const auto& t : in.tuples())
              if (holds(cond(t))) out.insert_unchecked(t);
            return out;
          },
          [&](const algebra::Rename& r) -> Relation {
            Relation in = eval(*r.input, env);
            Relation out(rename_schema(in.schema(), r.renames));
            for (const auto& t : in.tuples()) out.insert_unchecked(t);
            return out;
          },
          [&](const algebra::GroupAggregate& g) -> Relation {
            return group_aggregate(eval(*g.input, env), g.group_by, g.aggregates);
          },
      },
      e.node());
}

void collect_relvars(const AlgebraExpr& e, std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const algebra::RelvarRef& r) { out.insert(r.name); },
                 [&](const algebra::Literal&) {},
                 [&](const algebra::Product& p) {
                   collect_relvars(*p.lhs, out);
                   collect_relvars(*p.rhs, out);
                 },
                 [&](const algebra::SetOp& s) {
                   collect_relvars(*s.lhs, out);
                   collect_relvars(*s.rhs, out);
                 },
                 [&](const algebra::Join& j) {
                   collect_relvars(*j.lhs, out);
                   collect_relvars(*j.rhs, out);
                 },
                 [&](const algebra::Project& p) { collect_relvars(*p.input, out); },
                 [&](const algebra::Select& s) { collect_relvars(*s.input, out); },
                 [&](const algebra::Rename& r) { collect_relvars(*r.input, out); },
                 [&](const algebra::GroupAggregate& g) { collect_relvars(*g.input, out); },
             },
             e.node());
}

} // namespace

Relation eval_algebra(const AlgebraExpr& e, const RelationEnv& env) { return eval(e, env); }

Schema infer_schema(const AlgebraExpr& e, const std::function<Schema(const std::string&)>& schema_of) {
  return infer(e, schema_of);
}

Relation group_aggregate(const Relation& rel, const std::vector<std::string>& group_by,
                         const std::vector<AggregateSpec>& aggs) {
  const Schema& in = rel.schema();
  Schema schema = group_schema(in, group_by, aggs);
  std::vector<std::size_t> keys;
  for (const auto& g : group_by) keys.push_back(in.require(g));
  std::vector<CompiledScalar> fns;
  for (const auto& a : aggs) fns.push_back(a.expr ? compile(*a.expr, in) : CompiledScalar{});

  struct Acc {
    std::vector<Value> sums;
    std::vector<std::int64_t> counts;
  };
  std::map<Tuple, Acc> groups;
  for (const auto& t : rel.tuples()) {
    Tuple key;
    for (auto k : keys) key.push_back(t[k]);
    auto [it, inserted] = groups.try_emplace(std::move(key));
    Acc& acc = it->second;
    if (inserted) {
      acc.sums.assign(aggs.size(), Value());
      acc.counts.assign(aggs.size(), 0);
    }
    for (std::size_t i = 0; i < aggs.size(); ++i) {
      if (aggs[i].func == AggFunc::Count) {
        if (!fns[i] || !fns[i](t).is_null()) ++acc.counts[i];
        continue;
      }
      Value v = fns[i](t);
      if (v.is_null()) continue;
      if (!is_numeric(v.domain())) fail(ErrorCode::TypeError, "SUM over " + v.to_literal());
      Value& s = acc.sums[i];
      if (s.is_null()) s = v;
      else if (s.domain() == Domain::Integer && v.domain() == Domain::Integer) s = Value::integer(s.as_integer() + v.as_integer());
      else s = Value::real(s.as_number() + v.as_number());
    }
  }
  if (groups.empty() && group_by.empty()) groups[Tuple{}] = Acc{std::vector<Value>(aggs.size()), std::vector<std::int64_t>(aggs.size(), 0)};

  Relation out(schema);
  for (auto& [key, acc] : groups) {
    Tuple t = key;
    for (std::size_t i = 0; i < aggs.size(); ++i) {
      if (aggs[i].func == AggFunc::Count) {
        t.push_back(Value::integer(acc.counts[i]));
      } else {
        Value v = acc.sums[i];
        Domain d = schema[key.size() + i].domain;
        if (d == Domain::Float && v.domain() == Domain::Integer) v = Value::real(v.as_number());
        t.push_back(std::move(v));
      }
    }
    out.insert_unchecked(std::move(t));
  }
  return out;
}

std::set<std::string> referenced_relvars(const AlgebraExpr& e) {
  std::set<std::string> out;
  collect_relvars(e, out);
  return out;
}

} // namespace rxo
