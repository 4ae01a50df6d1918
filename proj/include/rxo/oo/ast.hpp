#pragma once

#include "rxo/core/scalar_expr.hpp"
#include "rxo/prs/commands.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rxo::oo {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Object selection: comma-separated conditions (intertuples AND).
struct Selection {
  std::vector<ExprPtr> conditions;
};

struct Segment {
  std::string name;
  std::optional<Selection> selection;
};

/// `head<sel>.seg<sel>...`. A post-path (`.Items.Art`) has an empty head.
struct Path {
  std::string head; // class, alias (`#g`), relvar, in-scope name or `this`
  std::optional<Selection> head_selection;
  std::vector<Segment> segments;

  bool is_post_path() const { return head.empty(); }
  bool is_alias() const { return !head.empty() && head[0] == '#'; }
  /// Dotted member names after the head, e.g. `Items.Art`.
  std::string post_text() const;
  bool has_selection() const;
};

struct Select;
struct NewObject;

enum class AggKind { Sum, Count };

namespace expr {
struct Literal {
  Value value;
};
struct PathRef {
  Path path;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs, rhs;
};
struct IsNull {
  ExprPtr operand;
  bool negated = false;
};
/// SUM(a) or SUM(a, b, ...) meaning SUM(a * b * ...); COUNT(*) has no args.
struct Aggregate {
  AggKind kind;
  std::vector<ExprPtr> args;
};
struct SubSelect {
  std::shared_ptr<const Select> select;
};
struct New {
  std::shared_ptr<const NewObject> object;
};
/// `FIRST OF group`: the sole object of a group reference.
struct FirstOf {
  Path group;
};
using Node = std::variant<Literal, PathRef, Unary, Binary, IsNull, Aggregate, SubSelect, New, FirstOf>;
} // namespace expr

struct Expr {
  expr::Node node;
  template <class T> explicit Expr(T n) : node(std::move(n)) {}
};

template <class T> ExprPtr make_expr(T n) { return std::make_shared<const Expr>(std::move(n)); }

// ---------------------------------------------------------------------------
// Procedure statements

struct Stmt;
using StmtList = std::vector<Stmt>;

namespace stmt {
struct Declare {
  std::string name;
  std::string type; // domain or class name
};
/// `target := value`; target is a member, local or parameter name (optionally dotted).
struct Assign {
  Path target;
  ExprPtr value;
};
struct If {
  ExprPtr condition;
  StmtList then_body;
  StmtList else_body;
};
struct While {
  ExprPtr condition;
  StmtList body;
};
struct Return {
  ExprPtr value; // may be null
};
/// `M(args)` on `this`, or `EXEC group.M(args)`.
struct Call {
  std::optional<Path> group;
  std::string method;
  std::vector<ExprPtr> args;
};
using Node = std::variant<Declare, Assign, If, While, Return, Call>;
} // namespace stmt

struct Stmt {
  stmt::Node node;
  template <class T> Stmt(T n) : node(std::move(n)) {}
};

// ---------------------------------------------------------------------------
// Commands

struct TypedName {
  std::string name;
  std::string type; // domain or class name
};

enum class ComponentKind { Scalar, Complex, Method };

struct ComponentDecl {
  std::string name;
  ComponentKind kind = ComponentKind::Scalar;
  std::string type;                           // Scalar
  std::vector<TypedName> attributes;          // Complex
  std::vector<std::vector<std::string>> keys; // Complex
  std::vector<TypedName> params;              // Method
};

/// `REFERENCE Comp (.a, ...) ON Class (.b, ...)`; an empty component means
/// scalar components of the class itself.
struct RefConstraint {
  std::string component;
  std::vector<std::string> attrs;
  std::string target_class;
  std::vector<std::string> target_attrs;
};

struct ClassCreate {
  std::string name;
  std::vector<std::string> parents;
  std::vector<ComponentDecl> components;
  std::vector<std::vector<std::string>> keys;
  std::vector<RefConstraint> references;
};

struct StoredBody {};
struct CalculatedBody {
  ExprPtr value; // usually a SubSelect
};
struct ProcedureBody {
  StmtList body;
};
using ImplBody = std::variant<StoredBody, CalculatedBody, ProcedureBody>;

struct Realize {
  std::string class_name;
  std::vector<std::string> members;
  std::optional<std::vector<TypedName>> params; // method signature, when given
  ImplBody body;
};

struct NewObject {
  std::string class_name;
  std::vector<stmt::Assign> assignments;
};

struct MethodExec {
  Path group;
  std::string method;
  std::vector<ExprPtr> args;
};

struct SelectItem {
  ExprPtr value;
  std::string alias; // AS name, empty when absent
};

struct FromItem {
  Path path;
  std::string alias; // `#S`, empty when absent
};

struct Select {
  std::vector<SelectItem> items;
  std::vector<FromItem> from;
  ExprPtr where;
  std::vector<ExprPtr> group_by;
};

struct Insert {
  Path target;
  std::vector<std::string> attributes;
  std::vector<std::vector<ExprPtr>> rows;
};

struct Update {
  Path target;
  std::vector<stmt::Assign> assignments;
};

struct Delete {
  Path target;
};

struct PrsCommand {
  prs::Command command;
};

using Command = std::variant<ClassCreate, Realize, NewObject, MethodExec, Select, Insert, Update, Delete, PrsCommand>;

} // namespace rxo::oo
