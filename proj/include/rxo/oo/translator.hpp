#pragma once

#include "rxo/oo/catalog.hpp"
#include "rxo/prs/database.hpp"

#include <string>
#include <vector>

namespace rxo::oo {

/// Compiles object-language commands into machine commands. The catalog and
/// database must be the ones the emitted commands will run against.
class Translator {
public:
  Translator(const Catalog& catalog, const prs::Database& db) : cat_(catalog), db_(db) {}

  /// Relvars, empty bindings and method transactions of a class already in the catalog.
  std::vector<prs::Command> class_create(const std::string& cls) const;
  /// Rebuilt bindings and transactions once `r` is registered in the catalog.
  std::vector<prs::Command> realize(const Realize& r) const;
  /// NEW, EXEC, SELECT, INSERT, UPDATE, DELETE and raw machine commands.
  std::vector<prs::Command> translate(const Command& c) const;

  AlgebraPtr select(const Select& q) const;
  /// Unary OID relation of the objects named by a group reference.
  AlgebraPtr group_reference(const Path& p) const;

  /// Definition of the binding relvar of a member declared in `root`.
  prs::RelVarDef component_binding(const std::string& root, const std::string& member) const;
  /// Transaction dispatching a method of `root` to every implementation's objects.
  prs::TransactionDef method_binding(const std::string& root, const std::string& method) const;
  /// Value of a calculated or procedure-valued implementation for the objects in its scope.
  AlgebraPtr calculated_value(const Implementation& impl) const;

private:
  std::vector<prs::Command> insert(const Insert& ins) const;
  std::vector<prs::Command> update(const Update& up) const;
  std::vector<prs::Command> remove(const Delete& del) const;
  std::vector<prs::Command> exec(const MethodExec& ex) const;

  const Catalog& cat_;
  const prs::Database& db_;
};

} // namespace rxo::oo
