#pragma once

#include "rxo/prs/commands.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>

namespace rxo::prs {

/// Total database value: schema, stored tuples, stored transactions, the OID
/// counter and an opaque catalog region owned by the object layer.
struct Database {
  std::map<std::string, RelVarDef> relvars;
  std::map<std::string, std::shared_ptr<const Relation>> stored;
  std::map<std::string, TransactionDef> transactions;
  std::uint64_t next_oid = 1;
  std::string catalog_payload;

  const RelVarDef* find(const std::string& name) const {
    auto it = relvars.find(name);
    return it == relvars.end() ? nullptr : &it->second;
  }
  const Relation& stored_value(const std::string& name) const { return *stored.at(name); }
};

/// Deep value equality (definitions compared through their canonical text).
bool equivalent(const Database& a, const Database& b);

} // namespace rxo::prs
