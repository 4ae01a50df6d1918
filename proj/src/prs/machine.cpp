#include "rxo/prs/machine.hpp"

#include <algorithm>
#include <set>

namespace rxo::prs {

namespace {
template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  return out;
}

std::string tuple_text(const Tuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + t[i].to_literal();
  return out + ")";
}
} // namespace

std::shared_ptr<const Relation> DatabaseEnv::lookup(const std::string& name) const {
  const RelVarDef* def = db_.find(name);
  if (!def) fail(ErrorCode::UnknownRelvar, "relvar '" + name + "' is not defined");
  if (def->kind == RelvarKind::Real) return db_.stored.at(name);
  if (auto it = cache_.find(name); it != cache_.end()) return it->second;
  if (std::find(expanding_.begin(), expanding_.end(), name) != expanding_.end())
    fail(ErrorCode::CyclicDefinition, "virtual relvar '" + name + "' depends on itself");
  expanding_.push_back(name);
  std::shared_ptr<const Relation> value;
  try {
    value = std::make_shared<const Relation>(conform(eval_algebra(*def->definition, *this), def->schema));
  } catch (...) {
    expanding_.pop_back();
    throw;
  }
  expanding_.pop_back();
  cache_[name] = value;
  return value;
}

Schema DatabaseEnv::schema_of(const std::string& name) const {
  const RelVarDef* def = db_.find(name);
  if (!def) fail(ErrorCode::UnknownRelvar, "relvar '" + name + "' is not defined");
  return def->schema;
}

namespace {

/// Frame locals shadow database relvars.
class FrameEnv : public RelationEnv {
public:
  FrameEnv(const Database& db, const Frame* frame) : db_env_(db), frame_(frame) {}
  std::shared_ptr<const Relation> lookup(const std::string& name) const override {
    if (frame_) {
      if (auto it = frame_->locals.find(name); it != frame_->locals.end())
        return std::shared_ptr<const Relation>(std::shared_ptr<const Relation>(), &it->second);
    }
    return db_env_.lookup(name);
  }
  Schema schema_of(const std::string& name) const override {
    if (frame_) {
      if (auto it = frame_->locals.find(name); it != frame_->locals.end()) return it->second.schema();
    }
    return db_env_.schema_of(name);
  }

private:
  DatabaseEnv db_env_;
  const Frame* frame_;
};

/// Names reachable from `roots` through virtual definitions (roots included).
std::set<std::string> dependency_closure(const Database& db, const std::set<std::string>& roots) {
  std::set<std::string> seen;
  std::vector<std::string> work(roots.begin(), roots.end());
  while (!work.empty()) {
    std::string n = work.back();
    work.pop_back();
    if (!seen.insert(n).second) continue;
    const RelVarDef* def = db.find(n);
    if (def && def->kind == RelvarKind::Virtual && def->definition)
      for (const auto& r : referenced_relvars(*def->definition)) work.push_back(r);
  }
  return seen;
}

void validate_attr_list(const Schema& schema, const std::vector<std::string>& attrs, const std::string& what) {
  if (attrs.empty()) fail(ErrorCode::SchemaMismatch, what + " names no attributes");
  for (const auto& a : attrs) schema.require(a);
}

class Executor {
public:
  Executor(Database& db, const MachineOptions& opts, const FrameObserver& obs, ExecResult& result)
      : db_(db), opts_(opts), observer_(obs), result_(result) {}

  void run(const Command& c, Frame* frame) {
    std::visit([&](const auto& n) { apply(n, frame); }, c.node);
    if (frame && observer_) observer_(*frame);
  }

  void run_all(const std::vector<Command>& body, Frame* frame) {
    for (const auto& c : body) run(c, frame);
  }

private:
  Relation eval(const AlgebraPtr& e, const Frame* frame) {
    FrameEnv env(db_, frame);
    return eval_algebra(*e, env);
  }

  void apply(const cmd::Create& c, Frame*) {
    RelVarDef def = c.def;
    if (const RelVarDef* existing = db_.find(def.name)) {
      if (!(existing->kind == RelvarKind::Virtual && def.kind == RelvarKind::Virtual))
        fail(ErrorCode::DuplicateName, "relvar '" + def.name + "' already exists");
    }
    if (def.kind == RelvarKind::Virtual) {
      if (!def.definition) fail(ErrorCode::SyntaxError, "virtual relvar '" + def.name + "' needs a definition");
      auto refs = referenced_relvars(*def.definition);
      if (refs.count(def.name) || dependency_closure(db_, refs).count(def.name))
        fail(ErrorCode::CyclicDefinition, "definition of '" + def.name + "' refers to itself");
      Schema inferred = infer_schema(*def.definition, [&](const std::string& n) {
        const RelVarDef* d = db_.find(n);
        if (!d) fail(ErrorCode::UnknownRelvar, "relvar '" + n + "' is not defined");
        return d->schema;
      });
      if (def.schema.arity() > 0) {
        // declared header must name the same attributes; declared domains win
        conform(Relation(inferred), def.schema);
      } else {
        def.schema = inferred;
      }
    } else {
      def.definition = nullptr;
      if (db_.find(def.name)) fail(ErrorCode::DuplicateName, "relvar '" + def.name + "' already exists");
      db_.stored[def.name] = std::make_shared<const Relation>(def.schema);
    }
    for (const auto& k : def.keys) validate_attr_list(def.schema, k, "KEY of " + def.name);
    for (const auto& fk : def.fkeys) {
      validate_attr_list(def.schema, fk.attrs, "FKEY of " + def.name);
      if (fk.attrs.size() != fk.target_attrs.size())
        fail(ErrorCode::SchemaMismatch, "FKEY of " + def.name + " has mismatched attribute counts");
    }
    db_.relvars[def.name] = std::move(def);
  }

  void assign(const std::string& target, const AlgebraPtr& value, Frame* frame) {
    if (frame) {
      if (auto it = frame->locals.find(target); it != frame->locals.end()) {
        Relation v = eval(value, frame);
        it->second = conform(v, it->second.schema());
        return;
      }
    }
    const RelVarDef* def = db_.find(target);
    if (!def) fail(ErrorCode::UnknownRelvar, "relvar '" + target + "' is not defined");
    if (def->kind == RelvarKind::Virtual)
      fail(ErrorCode::VirtualTargetNotUpdatable, "cannot assign to virtual relvar '" + target + "'");
    Relation v = eval(value, frame);
    db_.stored[target] = std::make_shared<const Relation>(conform(v, def->schema));
  }

  void apply(const cmd::Set& c, Frame* frame) { assign(c.target, c.value, frame); }
  void apply(const cmd::Insert& c, Frame* frame) { assign(c.target, union_of(relvar(c.target), c.value), frame); }
  void apply(const cmd::Delete& c, Frame* frame) { assign(c.target, difference(relvar(c.target), c.value), frame); }
  void apply(const cmd::Get& c, Frame* frame) { result_.outputs.push_back(eval(c.value, frame)); }
  void apply(const cmd::Trans& c, Frame*) { db_.transactions[c.def.name] = c.def; }

  void apply(const cmd::Exec& c, Frame* frame) {
    auto it = db_.transactions.find(c.name);
    if (it == db_.transactions.end()) fail(ErrorCode::UnknownTransaction, "transaction '" + c.name + "' is not defined");
    const TransactionDef def = it->second; // body may redefine transactions
    if (def.params.size() != c.args.size())
      fail(ErrorCode::ArgumentMismatch, c.name + " expects " + std::to_string(def.params.size()) + " argument(s), got " +
                                            std::to_string(c.args.size()));
    Frame callee{def.name, {}};
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      Relation v = eval(c.args[i], frame);
      try {
        callee.locals.emplace(def.params[i].name, conform(v, def.params[i].schema));
      } catch (const Error& e) {
        fail(ErrorCode::ArgumentMismatch, c.name + " parameter " + def.params[i].name + ": " + e.detail());
      }
    }
    if (++depth_ > 256) fail(ErrorCode::LoopLimitExceeded, "transaction call depth exceeded in " + c.name);
    run_all(def.body, &callee);
    --depth_;
  }

  void apply(const cmd::Block& c, Frame* frame) {
    if (frame) {
      run_all(c.body, frame);
      return;
    }
    Frame anon;
    run_all(c.body, &anon);
  }

  void apply(const cmd::Local& c, Frame* frame) {
    if (!frame) fail(ErrorCode::SyntaxError, "LOCAL " + c.name + " outside a transaction body");
    if (frame->locals.count(c.name)) fail(ErrorCode::DuplicateName, "local '" + c.name + "' already declared");
    Relation init = c.init ? conform(eval(c.init, frame), c.schema) : Relation(c.schema);
    frame->locals.emplace(c.name, std::move(init));
  }

  void apply(const cmd::If& c, Frame* frame) {
    if (!eval(c.probe, frame).empty()) run_all(c.then_body, frame);
    else run_all(c.else_body, frame);
  }

  void apply(const cmd::While& c, Frame* frame) {
    std::size_t iterations = 0;
    while (!eval(c.probe, frame).empty()) {
      if (++iterations > opts_.loop_limit)
        fail(ErrorCode::LoopLimitExceeded, "loop exceeded " + std::to_string(opts_.loop_limit) + " iterations");
      run_all(c.body, frame);
    }
  }

  void apply(const cmd::Assert& c, Frame* frame) {
    Relation v = eval(c.value, frame);
    bool ok = c.mode == cmd::AssertMode::Empty ? v.empty() : v.size() == 1;
    if (!ok) fail(c.code, c.message + " (" + std::to_string(v.size()) + " tuple(s))");
  }

  void apply(const cmd::Alloc& c, Frame* frame) {
    if (!frame) fail(ErrorCode::SyntaxError, "ALLOC outside a transaction body");
    Relation src = eval(c.source, frame);
    Schema schema = src.schema();
    schema.add({kAllocAttribute, Domain::Oid});
    Relation out(schema);
    for (const auto& t : src.tuples()) {
      Tuple nt = t;
      nt.push_back(Value::oid({db_.next_oid++}));
      out.insert_unchecked(std::move(nt));
    }
    frame->locals[c.target] = std::move(out);
  }

  Database& db_;
  const MachineOptions& opts_;
  const FrameObserver& observer_;
  ExecResult& result_;
  int depth_ = 0;
};

void check_relvar(const Database& db, const RelVarDef& def, bool check_keys, const std::set<std::string>* changed,
                  DatabaseEnv& env, std::vector<std::string>* sink) {
  auto report = [&](ErrorCode code, const std::string& msg) {
    if (sink) sink->push_back(std::string(to_string(code)) + ": " + msg);
    else fail(code, msg);
  };
  const Relation& rel = db.stored_value(def.name);
  const Schema& schema = def.schema;
  if (check_keys) {
    for (const auto& key : def.keys) {
      std::vector<std::size_t> idx;
      for (const auto& a : key) idx.push_back(schema.require(a));
      std::set<Tuple> seen;
      for (const auto& t : rel.tuples()) {
        Tuple k;
        bool has_null = false;
        for (auto i : idx) {
          has_null = has_null || t[i].is_null();
          k.push_back(t[i]);
        }
        if (has_null) continue;
        if (!seen.insert(k).second) {
          report(ErrorCode::KeyViolation, def.name + " KEY(" + join_names(key) + "): duplicate value " + tuple_text(k));
          break;
        }
      }
    }
  }
  for (const auto& fk : def.fkeys) {
    if (changed) {
      bool affected = changed->count(def.name) > 0;
      if (!affected) {
        auto deps = dependency_closure(db, {fk.target});
        affected = std::any_of(deps.begin(), deps.end(), [&](const std::string& d) { return changed->count(d) > 0; });
      }
      if (!affected) continue;
    }
    std::shared_ptr<const Relation> target;
    try {
      target = env.lookup(fk.target);
    } catch (const Error& e) {
      report(e.code(), def.name + " FKEY(" + join_names(fk.attrs) + ") ON " + fk.target + ": " + e.detail());
      continue;
    }
    std::vector<std::size_t> tidx, lidx;
    for (const auto& a : fk.target_attrs) tidx.push_back(target->schema().require(a));
    for (const auto& a : fk.attrs) lidx.push_back(schema.require(a));
    std::set<Tuple> present;
    for (const auto& t : target->tuples()) {
      Tuple k;
      for (auto i : tidx) k.push_back(t[i]);
      present.insert(std::move(k));
    }
    for (const auto& t : rel.tuples()) {
      Tuple k;
      bool has_null = false;
      for (std::size_t j = 0; j < lidx.size(); ++j) {
        Value v = t[lidx[j]];
        has_null = has_null || v.is_null();
        if (auto c = coerce(v, target->schema()[tidx[j]].domain)) v = *c;
        k.push_back(v);
      }
      if (has_null || present.count(k)) continue;
      report(ErrorCode::ForeignKeyViolation, def.name + " FKEY(" + join_names(fk.attrs) + ") ON " + fk.target + "(" +
                                                 join_names(fk.target_attrs) + "): no target for " + tuple_text(k));
      break;
    }
  }
}

} // namespace

void check_constraints(const Database& db, const std::set<std::string>& changed) {
  DatabaseEnv env(db);
  for (const auto& [name, def] : db.relvars)
    if (def.kind == RelvarKind::Real) check_relvar(db, def, changed.count(name) > 0, &changed, env, nullptr);
}

std::vector<std::string> find_violations(const Database& db) {
  std::vector<std::string> out;
  DatabaseEnv env(db);
  for (const auto& [name, def] : db.relvars)
    if (def.kind == RelvarKind::Real) check_relvar(db, def, true, nullptr, env, &out);
  return out;
}

ExecResult Machine::execute(const Command& c) {
  Database working = db_;
  ExecResult result;
  Executor ex(working, opts_, observer_, result);
  ex.run(c, nullptr);
  std::set<std::string> changed;
  for (const auto& [name, rel] : working.stored) {
    auto it = db_.stored.find(name);
    if (it == db_.stored.end() || it->second != rel) changed.insert(name);
  }
  for (const auto& [name, def] : working.relvars) {
    if (def.kind != RelvarKind::Virtual) continue;
    const RelVarDef* before = db_.find(name);
    if (!before || before->definition != def.definition) changed.insert(name);
  }
  check_constraints(working, changed);
  db_ = std::move(working);
  return result;
}

ExecResult Machine::execute(const std::vector<Command>& commands) { return execute(Command(cmd::Block{commands})); }

Relation Machine::get(const AlgebraExpr& e) const {
  DatabaseEnv env(db_);
  return eval_algebra(e, env);
}

} // namespace rxo::prs
