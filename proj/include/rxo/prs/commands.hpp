#pragma once

#include "rxo/core/algebra.hpp"
#include "rxo/error.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace rxo::prs {

enum class RelvarKind { Real, Virtual };

struct ForeignKey {
  std::vector<std::string> attrs;
  std::string target;
  std::vector<std::string> target_attrs;
};

struct RelVarDef {
  std::string name;
  Schema schema;
  RelvarKind kind = RelvarKind::Real;
  std::vector<std::vector<std::string>> keys;
  std::vector<ForeignKey> fkeys;
  AlgebraPtr definition; // VIRTUAL only
  /// dOID attributes declared with a class name as domain (attribute -> class).
  /// Informational for the machine; the object layer resolves paths through them.
  std::map<std::string, std::string> ref_classes;
};

struct Command;

struct Param {
  std::string name;
  Schema schema;
};

struct TransactionDef {
  std::string name;
  std::vector<Param> params;
  std::vector<Command> body;
};

namespace cmd {
/// CREATE. A VIRTUAL definition replaces an existing VIRTUAL relvar of the same name.
struct Create {
  RelVarDef def;
};
/// SET target := value. Targets a REAL relvar or a local of the current frame.
struct Set {
  std::string target;
  AlgebraPtr value;
};
/// INSERT target value, shorthand for SET target := target UNION value.
struct Insert {
  std::string target;
  AlgebraPtr value;
};
/// DELETE target value, shorthand for SET target := target MINUS value.
struct Delete {
  std::string target;
  AlgebraPtr value;
};
struct Get {
  AlgebraPtr value;
};
struct Trans {
  TransactionDef def;
};
struct Exec {
  std::string name;
  std::vector<AlgebraPtr> args;
};
/// Anonymous `EXEC begin ... end`.
struct Block {
  std::vector<Command> body;
};
/// Frame-local relation variable; starts as `init` or empty.
struct Local {
  std::string name;
  Schema schema;
  AlgebraPtr init;
};
/// Runs `then_body` when `probe` is nonempty, otherwise `else_body`.
struct If {
  AlgebraPtr probe;
  std::vector<Command> then_body;
  std::vector<Command> else_body;
};
/// Repeats `body` while `probe` is nonempty.
struct While {
  AlgebraPtr probe;
  std::vector<Command> body;
};
enum class AssertMode { Empty, ExactlyOne };
/// Raises `code` with `message` unless `value` satisfies `mode`.
struct Assert {
  AlgebraPtr value;
  AssertMode mode = AssertMode::Empty;
  ErrorCode code = ErrorCode::AssertionFailed;
  std::string message;
};
/// ALLOC target FROM source: binds local `target` to source extended with a
/// fresh `new_oid` per tuple.
struct Alloc {
  std::string target;
  AlgebraPtr source;
};
} // namespace cmd

struct Command {
  using Node = std::variant<cmd::Create, cmd::Set, cmd::Insert, cmd::Delete, cmd::Get, cmd::Trans, cmd::Exec, cmd::Block,
                            cmd::Local, cmd::If, cmd::While, cmd::Assert, cmd::Alloc>;
  Node node;

  template <class T> Command(T n) : node(std::move(n)) {}
};

inline constexpr const char* kAllocAttribute = "new_oid";

} // namespace rxo::prs
