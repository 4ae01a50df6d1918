#pragma once

#include "rxo/core/relation.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rxo {

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Like };
enum class UnaryOp { Not, Neg };

std::string_view to_string(BinaryOp op);

class ScalarExpr;

namespace scalar {
struct Attr {
  std::string name;
};
struct Literal {
  Value value;
};
struct Unary {
  UnaryOp op;
  std::shared_ptr<const ScalarExpr> operand;
};
struct Binary {
  BinaryOp op;
  std::shared_ptr<const ScalarExpr> lhs, rhs;
};
struct IsNull {
  std::shared_ptr<const ScalarExpr> operand;
  bool negated = false;
};
struct Case {
  std::vector<std::pair<std::shared_ptr<const ScalarExpr>, std::shared_ptr<const ScalarExpr>>> branches;
  std::shared_ptr<const ScalarExpr> otherwise; // may be null
};
using Node = std::variant<Attr, Literal, Unary, Binary, IsNull, Case>;
} // namespace scalar

/// Immutable scalar expression tree over attribute references of one schema.
class ScalarExpr {
public:
  explicit ScalarExpr(scalar::Node node) : node_(std::move(node)) {}
  const scalar::Node& node() const { return node_; }

private:
  scalar::Node node_;
};

using ScalarPtr = std::shared_ptr<const ScalarExpr>;

ScalarPtr attr(std::string name);
ScalarPtr lit(Value v);
ScalarPtr unary(UnaryOp op, ScalarPtr operand);
ScalarPtr binary(BinaryOp op, ScalarPtr lhs, ScalarPtr rhs);
ScalarPtr is_null(ScalarPtr operand, bool negated = false);
ScalarPtr case_when(std::vector<std::pair<ScalarPtr, ScalarPtr>> branches, ScalarPtr otherwise);

/// Static type check; throws UnknownAttribute or TypeError.
Domain infer_domain(const ScalarExpr& e, const Schema& schema);

using CompiledScalar = std::function<Value(const Tuple&)>;
/// Resolves attribute references against `schema` once and returns an evaluator.
CompiledScalar compile(const ScalarExpr& e, const Schema& schema);

/// NULL-propagating evaluation of `e` on one tuple.
Value eval_scalar(const ScalarExpr& e, const Tuple& tuple, const Schema& schema);

/// True only for a non-NULL TRUE result; NULL conditions do not hold.
inline bool holds(const Value& v) { return !v.is_null() && v.domain() == Domain::Boolean && v.as_bool(); }

bool like_match(std::string_view text, std::string_view pattern);

std::set<std::string> referenced_attributes(const ScalarExpr& e);
ScalarPtr rename_attributes(const ScalarPtr& e, const std::map<std::string, std::string>& renames);

/// Quotes an identifier with backticks unless it is a plain identifier.
std::string quote_identifier(std::string_view name);
std::string to_string(const ScalarExpr& e);

bool equal(const ScalarExpr& a, const ScalarExpr& b);

} // namespace rxo
