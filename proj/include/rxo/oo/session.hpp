#pragma once

#include "rxo/oo/catalog.hpp"
#include "rxo/oo/parser.hpp"
#include "rxo/prs/machine.hpp"

#include <filesystem>
#include <string_view>
#include <vector>

namespace rxo::oo {

/// A database with its class catalog. Every command is atomic: a failing
/// command leaves both the database and the catalog unchanged.
class Session {
public:
  Session() = default;
  /// Opens an existing database value; its catalog region is deserialized.
  explicit Session(prs::Database db, prs::MachineOptions opts = {});

  /// Runs one command and returns the relations it printed.
  std::vector<Relation> execute(const Command& c);
  /// Runs every command of a script in order, stopping at the first error.
  std::vector<Relation> execute_text(std::string_view script);

  const Catalog& catalog() const { return catalog_; }
  const prs::Database& database() const { return machine_.database(); }
  prs::Machine& machine() { return machine_; }
  void set_observer(prs::FrameObserver obs) { machine_.set_observer(std::move(obs)); }

  void save(const std::filesystem::path& dir) const;
  static Session load(const std::filesystem::path& dir, prs::MachineOptions opts = {});

private:
  void run(const std::vector<prs::Command>& cmds, const Catalog* next, std::vector<Relation>* out);

  Catalog catalog_;
  prs::Machine machine_;
};

} // namespace rxo::oo
