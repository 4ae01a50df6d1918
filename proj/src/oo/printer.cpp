#include "rxo/oo/printer.hpp"

#include "rxo/prs/syntax.hpp"

namespace rxo::oo {

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string selection_text(const std::optional<Selection>& sel) {
  if (!sel) return "";
  std::vector<std::string> parts;
  for (const auto& c : sel->conditions) parts.push_back(to_source(*c));
  return "[" + join(parts) + "]";
}

std::string exprs(const std::vector<ExprPtr>& xs) {
  std::vector<std::string> parts;
  for (const auto& x : xs) parts.push_back(to_source(*x));
  return join(parts);
}

std::string assign_text(const stmt::Assign& a) { return to_source(a.target) + " := " + to_source(*a.value); }

std::string new_text(const NewObject& n) {
  std::string out = "NEW " + n.class_name;
  if (!n.assignments.empty()) {
    std::vector<std::string> parts;
    for (const auto& a : n.assignments) parts.push_back(assign_text(a));
    out += " WITH SET " + join(parts);
  }
  return out;
}

std::string body_text(const StmtList& body) {
  std::string out = "BEGIN";
  for (const auto& s : body) out += " " + to_source(s);
  return out + " END";
}

std::string typed(const std::vector<TypedName>& xs) {
  std::vector<std::string> parts;
  for (const auto& x : xs) parts.push_back(x.name + " " + x.type);
  return "(" + join(parts) + ")";
}

std::string members(const std::vector<std::string>& xs, bool dotted) {
  std::vector<std::string> parts;
  for (const auto& x : xs) parts.push_back((dotted ? "." : "") + x);
  return "(" + join(parts) + ")";
}

} // namespace

std::string to_source(const Path& p) {
  std::string out = p.head + selection_text(p.head_selection);
  for (const auto& s : p.segments) out += "." + s.name + selection_text(s.selection);
  return out;
}

std::string to_source(const Expr& e) {
  return std::visit(
      overloaded{
          [](const expr::Literal& l) { return l.value.to_literal(); },
          [](const expr::PathRef& p) { return to_source(p.path); },
          [](const expr::Unary& u) {
            return std::string(u.op == UnaryOp::Not ? "(NOT " : "(- ") + to_source(*u.operand) + ")";
          },
          [](const expr::Binary& b) {
            return "(" + to_source(*b.lhs) + " " + std::string(to_string(b.op)) + " " + to_source(*b.rhs) + ")";
          },
          [](const expr::IsNull& n) { return "(" + to_source(*n.operand) + (n.negated ? " IS NOT NULL)" : " IS NULL)"); },
          [](const expr::Aggregate& a) {
            std::string name = a.kind == AggKind::Sum ? "SUM(" : "COUNT(";
            return name + (a.args.empty() ? "*" : exprs(a.args)) + ")";
          },
          [](const expr::SubSelect& s) { return "(" + to_source(*s.select) + ")"; },
          [](const expr::New& n) { return "(" + new_text(*n.object) + ")"; },
          [](const expr::FirstOf& f) { return "(FIRST OF " + to_source(f.group) + ")"; },
      },
      e.node);
}

std::string to_source(const Stmt& s) {
  return std::visit(
      overloaded{
          [](const stmt::Declare& d) { return "DECLARE " + d.name + " " + d.type + ";"; },
          [](const stmt::Assign& a) { return assign_text(a) + ";"; },
          [](const stmt::If& i) {
            std::string out = "IF " + to_source(*i.condition) + " THEN " + body_text(i.then_body);
            if (!i.else_body.empty()) out += " ELSE " + body_text(i.else_body);
            return out;
          },
          [](const stmt::While& w) { return "WHILE " + to_source(*w.condition) + " DO " + body_text(w.body); },
          [](const stmt::Return& r) { return std::string("RETURN") + (r.value ? " " + to_source(*r.value) : "") + ";"; },
          [](const stmt::Call& c) {
            std::string head = c.group ? "EXEC " + to_source(*c.group) + "." : "";
            return head + c.method + "(" + exprs(c.args) + ");";
          },
      },
      s.node);
}

std::string to_source(const Select& s) {
  std::vector<std::string> items, from;
  for (const auto& i : s.items) items.push_back(to_source(*i.value) + (i.alias.empty() ? "" : " AS " + i.alias));
  for (const auto& f : s.from) from.push_back(to_source(f.path) + (f.alias.empty() ? "" : " " + f.alias));
  std::string out = "SELECT " + join(items);
  if (!from.empty()) out += " FROM " + join(from);
  if (s.where) out += " WHERE " + to_source(*s.where);
  if (!s.group_by.empty()) out += " GROUP BY " + exprs(s.group_by);
  return out;
}

std::string to_source(const Command& c) {
  return std::visit(
      overloaded{
          [](const ClassCreate& c) {
            std::string out = "CLASS " + c.name;
            if (!c.parents.empty()) out += " EXTEND " + join(c.parents);
            std::vector<std::string> comps;
            for (const auto& m : c.components) {
              switch (m.kind) {
              case ComponentKind::Scalar: comps.push_back(m.name + " " + m.type); break;
              case ComponentKind::Method: comps.push_back(m.name + typed(m.params)); break;
              case ComponentKind::Complex: {
                std::string t = m.name + " SET OF " + typed(m.attributes);
                for (const auto& k : m.keys) t += " KEY " + members(k, false);
                comps.push_back(t);
              }
              }
            }
            out += " (" + join(comps) + ")";
            for (const auto& k : c.keys) out += " KEY " + members(k, false);
            for (const auto& r : c.references) {
              out += " REFERENCE " + (r.component.empty() ? "" : r.component + " ") + members(r.attrs, true) + " ON " +
                     r.target_class + " " + members(r.target_attrs, true);
            }
            return out + ";";
          },
          [](const Realize& r) {
            std::string out = "ALTER " + r.class_name + " REALIZE " + join(r.members);
            if (r.params) out += typed(*r.params);
            out += " AS ";
            return out + std::visit(overloaded{
                                        [](const StoredBody&) { return std::string("STORED;"); },
                                        [](const CalculatedBody& b) { return to_source(*b.value) + ";"; },
                                        [](const ProcedureBody& b) { return body_text(b.body) + ";"; },
                                    },
                                    r.body);
          },
          [](const NewObject& n) { return new_text(n) + ";"; },
          [](const MethodExec& m) { return "EXEC " + to_source(m.group) + "." + m.method + "(" + exprs(m.args) + ");"; },
          [](const Select& s) { return to_source(s) + ";"; },
          [](const Insert& i) {
            std::vector<std::string> rows;
            for (const auto& r : i.rows) rows.push_back("(" + exprs(r) + ")");
            return "INSERT INTO " + to_source(i.target) + " " + members(i.attributes, false) + " VALUES " + join(rows) + ";";
          },
          [](const Update& u) {
            std::vector<std::string> parts;
            for (const auto& a : u.assignments) parts.push_back(assign_text(a));
            return "UPDATE " + to_source(u.target) + " SET (" + join(parts) + ");";
          },
          [](const Delete& d) { return "DELETE FROM " + to_source(d.target) + ";"; },
          [](const PrsCommand& p) { return prs::to_text(p.command); },
      },
      c);
}

} // namespace rxo::oo
