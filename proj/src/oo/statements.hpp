#pragma once
// Statement-level translation shared by NEW, UPDATE and procedures. Internal.

#include "compile.hpp"

#include <utility>

namespace rxo::oo::detail {

/// Compilation state for one translated command.
class Context {
public:
  Context(const Catalog& cat, const prs::Database& db);
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;

  const Catalog& cat;
  const prs::Database& db;
  Emitter em;
  Compiler comp;

  /// Appends the queued pre-commands, then `c`.
  void emit(std::vector<prs::Command>& out, prs::Command c);
  /// Fails when compiled expressions queued commands that cannot run here.
  void require_no_pre(const std::string& what) const;
};

/// Scope of a class context whose objects are the rows' OID column.
Scope object_scope(const std::string& cls);

/// Commands setting `member` of the objects in `cur` to `value`, evaluated on `rows`.
void assign_member(Context& cx, const std::string& cls, const std::string& member, const Expr& value,
                   const AlgebraPtr& cur, const Scope& s, const Rows& rows, std::vector<prs::Command>& out);

/// Commands creating one object; returns the local holding its OID in `new_oid`.
std::pair<std::string, std::vector<prs::Command>> emit_new(Context& cx, const NewObject& n);

/// Member name when `target` names a member of the context object.
std::optional<std::string> member_target(const Path& target, const Scope& s);

/// Group-executed transaction for a procedure implementation of a method.
prs::TransactionDef translate_procedure(const Catalog& cat, const prs::Database& db, const Implementation& impl);

/// (OID, name) value of a straight-line procedure implementing a scalar component.
AlgebraPtr inline_procedure(Context& cx, const Implementation& impl, const AlgebraPtr& scope, const std::string& name);

} // namespace rxo::oo::detail
