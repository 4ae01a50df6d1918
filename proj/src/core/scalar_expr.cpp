#include "rxo/core/scalar_expr.hpp"

#include "rxo/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace rxo {

std::string_view to_string(BinaryOp op) {
  switch (op) {
  case BinaryOp::Add: return "+";
  case BinaryOp::Sub: return "-";
  case BinaryOp::Mul: return "*";
  case BinaryOp::Div: return "/";
  case BinaryOp::Eq: return "=";
  case BinaryOp::Ne: return "<>";
  case BinaryOp::Lt: return "<";
  case BinaryOp::Le: return "<=";
  case BinaryOp::Gt: return ">";
  case BinaryOp::Ge: return ">=";
  case BinaryOp::And: return "AND";
  case BinaryOp::Or: return "OR";
  case BinaryOp::Like: return "LIKE";
  }
  return "?";
}

ScalarPtr attr(std::string name) { return std::make_shared<ScalarExpr>(scalar::Attr{std::move(name)}); }
ScalarPtr lit(Value v) { return std::make_shared<ScalarExpr>(scalar::Literal{std::move(v)}); }
ScalarPtr unary(UnaryOp op, ScalarPtr operand) {
  return std::make_shared<ScalarExpr>(scalar::Unary{op, std::move(operand)});
}
ScalarPtr binary(BinaryOp op, ScalarPtr lhs, ScalarPtr rhs) {
  return std::make_shared<ScalarExpr>(scalar::Binary{op, std::move(lhs), std::move(rhs)});
}
ScalarPtr is_null(ScalarPtr operand, bool negated) {
  return std::make_shared<ScalarExpr>(scalar::IsNull{std::move(operand), negated});
}
ScalarPtr case_when(std::vector<std::pair<ScalarPtr, ScalarPtr>> branches, ScalarPtr otherwise) {
  return std::make_shared<ScalarExpr>(scalar::Case{std::move(branches), std::move(otherwise)});
}

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

bool is_comparison(BinaryOp op) {
  return op == BinaryOp::Eq || op == BinaryOp::Ne || op == BinaryOp::Lt || op == BinaryOp::Le ||
         op == BinaryOp::Gt || op == BinaryOp::Ge;
}

bool comparable(Domain a, Domain b) {
  if (a == Domain::Any || b == Domain::Any || a == b) return true;
  if (is_numeric(a) && is_numeric(b)) return true;
  // quoted date literals arrive as strings
  return (a == Domain::DateTime && b == Domain::String) || (a == Domain::String && b == Domain::DateTime);
}

[[noreturn]] void type_error(const std::string& what) { fail(ErrorCode::TypeError, what); }

Domain infer(const ScalarExpr& e, const Schema& schema) {
  return std::visit(
      overloaded{
          [&](const scalar::Attr& a) { return schema[schema.require(a.name)].domain; },
          [&](const scalar::Literal& l) { return l.value.domain(); },
          [&](const scalar::Unary& u) {
            Domain d = infer(*u.operand, schema);
            if (u.op == UnaryOp::Not) {
              if (d != Domain::Boolean && d != Domain::Any) type_error("NOT applied to " + std::string(to_string(d)));
              return Domain::Boolean;
            }
            if (!is_numeric(d) && d != Domain::Any) type_error("negation of " + std::string(to_string(d)));
            return d;
          },
          [&](const scalar::Binary& b) {
            Domain l = infer(*b.lhs, schema), r = infer(*b.rhs, schema);
            switch (b.op) {
            case BinaryOp::And:
            case BinaryOp::Or:
              for (Domain d : {l, r})
                if (d != Domain::Boolean && d != Domain::Any)
                  type_error(std::string(to_string(b.op)) + " over " + std::string(to_string(d)));
              return Domain::Boolean;
            case BinaryOp::Like:
              for (Domain d : {l, r})
                if (d != Domain::String && d != Domain::Any) type_error("LIKE over " + std::string(to_string(d)));
              return Domain::Boolean;
            case BinaryOp::Add:
              if ((l == Domain::String || l == Domain::Any) && (r == Domain::String || r == Domain::Any) &&
                  (l == Domain::String || r == Domain::String))
                return Domain::String;
              [[fallthrough]];
            case BinaryOp::Sub:
            case BinaryOp::Mul:
            case BinaryOp::Div: {
              if ((!is_numeric(l) && l != Domain::Any) || (!is_numeric(r) && r != Domain::Any))
                type_error(std::string(to_string(b.op)) + " over " + std::string(to_string(l)) + " and " +
                           std::string(to_string(r)));
              if (l == Domain::Any) return r;
              if (r == Domain::Any) return l;
              return (l == Domain::Float || r == Domain::Float) ? Domain::Float : Domain::Integer;
            }
            default:
              if (!comparable(l, r))
                type_error("comparison of " + std::string(to_string(l)) + " with " + std::string(to_string(r)));
              return Domain::Boolean;
            }
          },
          [&](const scalar::IsNull& n) {
            infer(*n.operand, schema);
            return Domain::Boolean;
          },
          [&](const scalar::Case& c) {
            Domain result = Domain::Any;
            auto merge = [&](Domain d) {
              auto u = unify(result, d);
              if (!u) type_error("CASE branches of " + std::string(to_string(result)) + " and " +
                                 std::string(to_string(d)));
              result = *u;
            };
            for (const auto& [cond, val] : c.branches) {
              Domain cd = infer(*cond, schema);
              if (cd != Domain::Boolean && cd != Domain::Any) type_error("CASE condition is not BOOLEAN");
              merge(infer(*val, schema));
            }
            if (c.otherwise) merge(infer(*c.otherwise, schema));
            return result;
          },
      },
      e.node());
}

// Compares two non-NULL values of comparable domains. Returns <0, 0, >0.
int compare_values(const Value& a, const Value& b) {
  if (is_numeric(a.domain()) && is_numeric(b.domain())) {
    if (a.domain() == Domain::Integer && b.domain() == Domain::Integer)
      return a.as_integer() < b.as_integer() ? -1 : (a.as_integer() > b.as_integer() ? 1 : 0);
    double x = a.as_number(), y = b.as_number();
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (a.domain() != b.domain()) {
    auto da = coerce(a, Domain::DateTime), db = coerce(b, Domain::DateTime);
    if (da && db && da->domain() == Domain::DateTime && db->domain() == Domain::DateTime)
      return compare_values(*da, *db);
    type_error("cannot compare " + a.to_literal() + " with " + b.to_literal());
  }
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

Value arithmetic(BinaryOp op, const Value& a, const Value& b) {
  if (op == BinaryOp::Add && a.domain() == Domain::String && b.domain() == Domain::String)
    return Value::string(a.as_string() + b.as_string());
  if (!is_numeric(a.domain()) || !is_numeric(b.domain()))
    type_error("arithmetic on " + a.to_literal() + " and " + b.to_literal());
  if (a.domain() == Domain::Integer && b.domain() == Domain::Integer) {
    std::int64_t x = a.as_integer(), y = b.as_integer();
    switch (op) {
    case BinaryOp::Add: return Value::integer(x + y);
    case BinaryOp::Sub: return Value::integer(x - y);
    case BinaryOp::Mul: return Value::integer(x * y);
    default:
      if (y == 0) fail(ErrorCode::DivisionByZero, "integer division by zero");
      return Value::integer(x / y);
    }
  }
  double x = a.as_number(), y = b.as_number();
  switch (op) {
  case BinaryOp::Add: return Value::real(x + y);
  case BinaryOp::Sub: return Value::real(x - y);
  case BinaryOp::Mul: return Value::real(x * y);
  default:
    if (y == 0.0) fail(ErrorCode::DivisionByZero, "division by zero");
    return Value::real(x / y);
  }
}

CompiledScalar compile_node(const ScalarExpr& e, const Schema& schema) {
  return std::visit(
      overloaded{
          [&](const scalar::Attr& a) -> CompiledScalar {
            std::size_t i = schema.require(a.name);
            return [i](const Tuple& t) { return t[i]; };
          },
          [&](const scalar::Literal& l) -> CompiledScalar {
            Value v = l.value;
            return [v](const Tuple&) { return v; };
          },
          [&](const scalar::Unary& u) -> CompiledScalar {
            auto inner = compile_node(*u.operand, schema);
            if (u.op == UnaryOp::Not)
              return [inner](const Tuple& t) {
                Value v = inner(t);
                if (v.is_null()) return v;
                return Value::boolean(!v.as_bool());
              };
            return [inner](const Tuple& t) {
              Value v = inner(t);
              if (v.is_null()) return v;
              if (v.domain() == Domain::Integer) return Value::integer(-v.as_integer());
              if (v.domain() == Domain::Float) return Value::real(-v.as_real());
              type_error("negation of " + v.to_literal());
            };
          },
          [&](const scalar::Binary& b) -> CompiledScalar {
            auto l = compile_node(*b.lhs, schema);
            auto r = compile_node(*b.rhs, schema);
            BinaryOp op = b.op;
            if (op == BinaryOp::And)
              return [l, r](const Tuple& t) {
                Value x = l(t);
                if (!x.is_null() && !x.as_bool()) return Value::boolean(false);
                Value y = r(t);
                if (!y.is_null() && !y.as_bool()) return Value::boolean(false);
                if (x.is_null() || y.is_null()) return Value::null();
                return Value::boolean(true);
              };
            if (op == BinaryOp::Or)
              return [l, r](const Tuple& t) {
                Value x = l(t);
                if (!x.is_null() && x.as_bool()) return Value::boolean(true);
                Value y = r(t);
                if (!y.is_null() && y.as_bool()) return Value::boolean(true);
                if (x.is_null() || y.is_null()) return Value::null();
                return Value::boolean(false);
              };
            return [l, r, op](const Tuple& t) {
              Value x = l(t), y = r(t);
              if (x.is_null() || y.is_null()) return Value::null();
              if (op == BinaryOp::Like) {
                if (x.domain() != Domain::String || y.domain() != Domain::String)
                  type_error("LIKE over non-strings");
                return Value::boolean(like_match(x.as_string(), y.as_string()));
              }
              if (!is_comparison(op)) return arithmetic(op, x, y);
              int c = compare_values(x, y);
              switch (op) {
              case BinaryOp::Eq: return Value::boolean(c == 0);
              case BinaryOp::Ne: return Value::boolean(c != 0);
              case BinaryOp::Lt: return Value::boolean(c < 0);
              case BinaryOp::Le: return Value::boolean(c <= 0);
              case BinaryOp::Gt: return Value::boolean(c > 0);
              default: return Value::boolean(c >= 0);
              }
            };
          },
          [&](const scalar::IsNull& n) -> CompiledScalar {
            auto inner = compile_node(*n.operand, schema);
            bool negated = n.negated;
            return [inner, negated](const Tuple& t) { return Value::boolean(inner(t).is_null() != negated); };
          },
          [&](const scalar::Case& c) -> CompiledScalar {
            std::vector<std::pair<CompiledScalar, CompiledScalar>> branches;
            for (const auto& [cond, val] : c.branches)
              branches.emplace_back(compile_node(*cond, schema), compile_node(*val, schema));
            CompiledScalar otherwise =
                c.otherwise ? compile_node(*c.otherwise, schema) : CompiledScalar([](const Tuple&) { return Value(); });
            return [branches, otherwise](const Tuple& t) {
              for (const auto& [cond, val] : branches)
                if (holds(cond(t))) return val(t);
              return otherwise(t);
            };
          },
      },
      e.node());
}

void collect_attrs(const ScalarExpr& e, std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const scalar::Attr& a) { out.insert(a.name); },
                 [&](const scalar::Literal&) {},
                 [&](const scalar::Unary& u) { collect_attrs(*u.operand, out); },
                 [&](const scalar::Binary& b) {
                   collect_attrs(*b.lhs, out);
                   collect_attrs(*b.rhs, out);
                 },
                 [&](const scalar::IsNull& n) { collect_attrs(*n.operand, out); },
                 [&](const scalar::Case& c) {
                   for (const auto& [cond, val] : c.branches) {
                     collect_attrs(*cond, out);
                     collect_attrs(*val, out);
                   }
                   if (c.otherwise) collect_attrs(*c.otherwise, out);
                 },
             },
             e.node());
}

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words{
      "AND",    "OR",     "NOT",  "LIKE",  "IS",     "NULL",  "TRUE",  "FALSE", "CASE",     "WHEN",  "THEN",
      "ELSE",   "END",    "UNION", "MINUS", "INTERSECT", "INTERSEPT", "TIMES", "JOIN", "LEFT", "ON",
      "WHERE",  "RENAME", "AS",   "GROUP", "BY",     "VALUES", "SUM",  "COUNT", "KEY",   "FKEY",  "CREATE",
      "SET",    "GET",    "TRANS", "EXEC", "BEGIN",  "LOCAL", "IF",    "WHILE", "ASSERT", "ALLOC", "INSERT",
      "DELETE", "EXISTS", "FROM", "VIRTUAL", "REAL", "EMPTY", "ONE", "DO", "DROP", "AGG", "ERROR"};
  return words;
}

} // namespace

Domain infer_domain(const ScalarExpr& e, const Schema& schema) { return infer(e, schema); }

CompiledScalar compile(const ScalarExpr& e, const Schema& schema) {
  infer(e, schema);
  return compile_node(e, schema);
}

Value eval_scalar(const ScalarExpr& e, const Tuple& tuple, const Schema& schema) {
  return compile(e, schema)(tuple);
}

bool like_match(std::string_view text, std::string_view pattern) {
  // iterative wildcard match with backtracking on the last '%'
  std::size_t t = 0, p = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '_' || pattern[p] == text[t])) {
      ++t;
      ++p;
    } else if (p < pattern.size() && pattern[p] == '%') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '%') ++p;
  return p == pattern.size();
}

std::set<std::string> referenced_attributes(const ScalarExpr& e) {
  std::set<std::string> out;
  collect_attrs(e, out);
  return out;
}

ScalarPtr rename_attributes(const ScalarPtr& e, const std::map<std::string, std::string>& renames) {
  return std::visit(
      overloaded{
          [&](const scalar::Attr& a) -> ScalarPtr {
            auto it = renames.find(a.name);
            return it == renames.end() ? e : attr(it->second);
          },
          [&](const scalar::Literal&) -> ScalarPtr { return e; },
          [&](const scalar::Unary& u) -> ScalarPtr { return unary(u.op, rename_attributes(u.operand, renames)); },
          [&](const scalar::Binary& b) -> ScalarPtr {
            return binary(b.op, rename_attributes(b.lhs, renames), rename_attributes(b.rhs, renames));
          },
          [&](const scalar::IsNull& n) -> ScalarPtr {
            return is_null(rename_attributes(n.operand, renames), n.negated);
          },
          [&](const scalar::Case& c) -> ScalarPtr {
            std::vector<std::pair<ScalarPtr, ScalarPtr>> br;
            for (const auto& [cond, val] : c.branches)
              br.emplace_back(rename_attributes(cond, renames), rename_attributes(val, renames));
            return case_when(std::move(br), c.otherwise ? rename_attributes(c.otherwise, renames) : nullptr);
          },
      },
      e->node());
}

std::string quote_identifier(std::string_view name) {
  bool plain = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
  if (plain) {
    std::string upper(name);
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (reserved_words().count(upper)) plain = false;
  }
  if (plain) return std::string(name);
  std::string out = "`";
  for (char c : name) {
    if (c == '`' || c == '\\') out += '\\';
    out += c;
  }
  return out + "`";
}

std::string to_string(const ScalarExpr& e) {
  return std::visit(
      overloaded{
          [&](const scalar::Attr& a) { return quote_identifier(a.name); },
          [&](const scalar::Literal& l) { return l.value.to_literal(); },
          [&](const scalar::Unary& u) {
            return std::string(u.op == UnaryOp::Not ? "(NOT " : "(- ") + to_string(*u.operand) + ")";
          },
          [&](const scalar::Binary& b) {
            return "(" + to_string(*b.lhs) + " " + std::string(to_string(b.op)) + " " + to_string(*b.rhs) + ")";
          },
          [&](const scalar::IsNull& n) {
            return "(" + to_string(*n.operand) + (n.negated ? " IS NOT NULL)" : " IS NULL)");
          },
          [&](const scalar::Case& c) {
            std::string out = "CASE";
            for (const auto& [cond, val] : c.branches) out += " WHEN " + to_string(*cond) + " THEN " + to_string(*val);
            if (c.otherwise) out += " ELSE " + to_string(*c.otherwise);
            return out + " END";
          },
      },
      e.node());
}

bool equal(const ScalarExpr& a, const ScalarExpr& b) { return to_string(a) == to_string(b); }

} // namespace rxo
