#pragma once

#include "rxo/prs/database.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace rxo::prs {

/// Local variables of one executing transaction body.
struct Frame {
  std::string transaction; // empty for anonymous blocks
  std::map<std::string, Relation> locals;
};

/// Called after every command executed inside a frame.
using FrameObserver = std::function<void(const Frame&)>;

struct MachineOptions {
  std::size_t loop_limit = 1'000'000;
};

struct ExecResult {
  std::vector<Relation> outputs; // one per GET, in execution order
};

/// Relation environment over a database value: REAL relvars read their stored
/// tuples, VIRTUAL relvars expand their definitions recursively. Expansions are
/// memoised for the lifetime of the environment.
class DatabaseEnv : public RelationEnv {
public:
  explicit DatabaseEnv(const Database& db) : db_(db) {}
  std::shared_ptr<const Relation> lookup(const std::string& name) const override;
  Schema schema_of(const std::string& name) const override;

private:
  const Database& db_;
  mutable std::map<std::string, std::shared_ptr<const Relation>> cache_;
  mutable std::vector<std::string> expanding_;
};

/// The programmable relational system. Every top-level command executes
/// atomically against a working copy; the committed value changes only when
/// the command and the constraint check both succeed.
class Machine {
public:
  Machine() = default;
  explicit Machine(Database db, MachineOptions opts = {}) : db_(std::move(db)), opts_(opts) {}

  const Database& database() const { return db_; }
  void reset(Database db) { db_ = std::move(db); }
  MachineOptions& options() { return opts_; }

  ExecResult execute(const Command& c);
  ExecResult execute(const std::vector<Command>& commands);

  /// Read-only evaluation against the committed value.
  Relation get(const AlgebraExpr& e) const;

  void set_observer(FrameObserver obs) { observer_ = std::move(obs); }

  /// Direct mutation of the opaque catalog region (outside any transaction).
  void set_catalog_payload(std::string payload) { db_.catalog_payload = std::move(payload); }

private:
  Database db_;
  MachineOptions opts_;
  FrameObserver observer_;
};

/// Every key and foreign-key violation in `db`, as readable messages.
std::vector<std::string> find_violations(const Database& db);

/// Key/foreign-key check restricted to constraints that could be affected by
/// changes to `changed` REAL relvars. Throws KeyViolation / ForeignKeyViolation.
void check_constraints(const Database& db, const std::set<std::string>& changed);

} // namespace rxo::prs
