#include "rxo/prs/syntax.hpp"

#include "rxo/error.hpp"
#include "rxo/prs/database.hpp"

#include <set>

namespace rxo::prs {

namespace {

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

std::string q(const std::string& name) { return quote_identifier(name); }

std::string name_list(const std::vector<std::string>& names) {
  std::string out = "(";
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + q(names[i]);
  return out + ")";
}

std::string body_text(const std::vector<Command>& body) {
  std::string out = "BEGIN";
  for (const auto& c : body) out += " " + to_text(c);
  return out + " END";
}

std::string project_item_text(const ProjectItem& item) {
  if (auto a = std::get_if<scalar::Attr>(&item.expr->node()); a && a->name == item.name) return q(item.name);
  return to_string(*item.expr) + " AS " + q(item.name);
}

const char* kSetOpWords[] = {"UNION", "MINUS", "INTERSECT"};

} // namespace

namespace {
std::string schema_text(const Schema& s, const std::map<std::string, std::string>* refs) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.arity(); ++i) {
    std::string domain(to_string(s[i].domain));
    if (refs)
      if (auto it = refs->find(s[i].name); it != refs->end()) domain = q(it->second);
    out += (i ? ", " : "") + q(s[i].name) + ":" + domain;
  }
  return out + ")";
}
} // namespace

std::string to_text(const Schema& s) { return schema_text(s, nullptr); }

std::string to_text(const AlgebraExpr& e) {
  return std::visit(
      overloaded{
          [](const algebra::RelvarRef& r) { return q(r.name); },
          [](const algebra::Literal& l) {
            std::string out = "VALUES " + to_text(l.value.schema()) + " {";
            bool first = true;
            for (const auto& t : l.value.tuples()) {
              out += first ? "(" : ", (";
              first = false;
              for (std::size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + t[i].to_literal();
              out += ")";
            }
            return out + "}";
          },
          [](const algebra::Product& p) { return "(" + to_text(*p.lhs) + " TIMES " + to_text(*p.rhs) + ")"; },
          [](const algebra::SetOp& s) {
            return "(" + to_text(*s.lhs) + " " + kSetOpWords[static_cast<int>(s.kind)] + " " + to_text(*s.rhs) + ")";
          },
          [](const algebra::Join& j) {
            std::string out = "(" + to_text(*j.lhs) + (j.left_outer ? " LEFT JOIN " : " JOIN ") + to_text(*j.rhs) + " ON (";
            for (std::size_t i = 0; i < j.on.size(); ++i) out += (i ? ", " : "") + q(j.on[i].first) + " = " + q(j.on[i].second);
            return out + "))";
          },
          [](const algebra::Project& p) {
            std::string out = "(" + to_text(*p.input) + "[";
            for (std::size_t i = 0; i < p.items.size(); ++i) out += (i ? ", " : "") + project_item_text(p.items[i]);
            return out + "])";
          },
          [](const algebra::Select& s) { return "(" + to_text(*s.input) + " WHERE " + to_string(*s.condition) + ")"; },
          [](const algebra::Rename& r) {
            std::string out = "(" + to_text(*r.input) + " RENAME ";
            for (std::size_t i = 0; i < r.renames.size(); ++i)
              out += (i ? ", " : "") + q(r.renames[i].first) + " AS " + q(r.renames[i].second);
            return out + ")";
          },
          [](const algebra::GroupAggregate& g) {
            std::string out = "(" + to_text(*g.input) + " GROUP BY " + name_list(g.group_by) + " AGG (";
            for (std::size_t i = 0; i < g.aggregates.size(); ++i) {
              const auto& a = g.aggregates[i];
              out += i ? ", " : "";
              out += a.func == AggFunc::Sum ? "SUM(" : "COUNT(";
              out += a.expr ? to_string(*a.expr) : "*";
              out += ") AS " + q(a.name);
            }
            return out + "))";
          },
      },
      e.node());
}

std::string to_text(const RelVarDef& def) {
  std::string out = "CREATE " + q(def.name) + " " + schema_text(def.schema, &def.ref_classes);
  for (const auto& k : def.keys) out += " KEY " + name_list(k);
  for (const auto& fk : def.fkeys) out += " FKEY " + name_list(fk.attrs) + " ON " + q(fk.target) + " " + name_list(fk.target_attrs);
  if (def.kind == RelvarKind::Virtual) out += " AS " + to_text(*def.definition);
  return out + ";";
}

std::string to_text(const TransactionDef& def) {
  std::string out = "TRANS " + q(def.name) + " (";
  for (std::size_t i = 0; i < def.params.size(); ++i)
    out += (i ? ", " : "") + q(def.params[i].name) + " " + to_text(def.params[i].schema);
  return out + ") AS " + body_text(def.body) + ";";
}

std::string to_text(const Command& c) {
  return std::visit(
      overloaded{
          [](const cmd::Create& x) { return to_text(x.def); },
          [](const cmd::Set& x) { return "SET " + q(x.target) + " := " + to_text(*x.value) + ";"; },
          [](const cmd::Insert& x) { return "INSERT " + q(x.target) + " " + to_text(*x.value) + ";"; },
          [](const cmd::Delete& x) { return "DELETE " + q(x.target) + " " + to_text(*x.value) + ";"; },
          [](const cmd::Get& x) { return "GET " + to_text(*x.value) + ";"; },
          [](const cmd::Trans& x) { return to_text(x.def); },
          [](const cmd::Exec& x) {
            std::string out = "EXEC " + q(x.name) + " (";
            for (std::size_t i = 0; i < x.args.size(); ++i) out += (i ? ", " : "") + to_text(*x.args[i]);
            return out + ");";
          },
          [](const cmd::Block& x) { return "EXEC " + body_text(x.body) + ";"; },
          [](const cmd::Local& x) {
            std::string out = "LOCAL " + q(x.name) + " " + to_text(x.schema);
            if (x.init) out += " := " + to_text(*x.init);
            return out + ";";
          },
          [](const cmd::If& x) {
            std::string out = "IF EXISTS " + to_text(*x.probe) + " THEN " + body_text(x.then_body);
            if (!x.else_body.empty()) out += " ELSE " + body_text(x.else_body);
            return out + ";";
          },
          [](const cmd::While& x) { return "WHILE EXISTS " + to_text(*x.probe) + " DO " + body_text(x.body) + ";"; },
          [](const cmd::Assert& x) {
            return std::string("ASSERT ") + (x.mode == cmd::AssertMode::Empty ? "EMPTY " : "ONE ") + to_text(*x.value) +
                   " ERROR " + std::string(to_string(x.code)) + " " + Value::string(x.message).to_literal() + ";";
          },
          [](const cmd::Alloc& x) { return "ALLOC " + q(x.target) + " FROM " + to_text(*x.source) + ";"; },
      },
      c.node);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool is_reserved(const Token& t) { return t.kind == TokenKind::Ident && quote_identifier(t.text) != t.text; }

/// Identifier, optionally dotted (`R_DOCS.Items`) when the dots are unspaced.
std::string parse_name(TokenCursor& cur, std::string_view what) {
  const Token& t = cur.peek();
  if (t.kind == TokenKind::QuotedIdent) return cur.next().text;
  if (t.kind != TokenKind::Ident || is_reserved(t)) cur.error("expected " + std::string(what));
  std::string name = cur.next().text;
  while (cur.peek().is_symbol(".") && !cur.peek().space_before && cur.peek(1).kind == TokenKind::Ident &&
         !cur.peek(1).space_before) {
    cur.next();
    name += "." + cur.next().text;
  }
  return name;
}

std::vector<std::string> parse_name_list(TokenCursor& cur) {
  std::vector<std::string> out;
  cur.expect_symbol("(");
  if (cur.accept_symbol(")")) return out;
  do out.push_back(parse_name(cur, "attribute name"));
  while (cur.accept_symbol(","));
  cur.expect_symbol(")");
  return out;
}

ScalarPtr parse_or(TokenCursor& cur);

ScalarPtr parse_atom(TokenCursor& cur) {
  const Token& t = cur.peek();
  if (t.is_symbol("(")) {
    cur.next();
    auto e = parse_or(cur);
    cur.expect_symbol(")");
    return e;
  }
  if (t.is_symbol("-")) {
    cur.next();
    const Token& n = cur.peek();
    if (!n.space_before && (n.kind == TokenKind::Integer || n.kind == TokenKind::Float)) {
      std::string text = "-" + cur.next().text;
      if (n.kind == TokenKind::Integer) return lit(Value::integer(std::stoll(text)));
      return lit(Value::real(std::stod(text)));
    }
    return unary(UnaryOp::Neg, parse_atom(cur));
  }
  if (t.kind == TokenKind::Integer) {
    try {
      return lit(Value::integer(std::stoll(cur.next().text)));
    } catch (const std::out_of_range&) {
      cur.error_at(t, "integer literal out of range");
    }
  }
  if (t.kind == TokenKind::Float) return lit(Value::real(std::stod(cur.next().text)));
  if (t.kind == TokenKind::String) return lit(Value::string(cur.next().text));
  if (t.kind == TokenKind::QuotedIdent) return attr(cur.next().text);
  if (t.is_keyword("NULL")) return cur.next(), lit(Value::null());
  if (t.is_keyword("TRUE")) return cur.next(), lit(Value::boolean(true));
  if (t.is_keyword("FALSE")) return cur.next(), lit(Value::boolean(false));
  if (t.is_keyword("DATE") && cur.peek(1).kind == TokenKind::String) {
    cur.next();
    const Token& s = cur.next();
    auto d = parse_date(s.text);
    if (!d) cur.error_at(s, "malformed date literal");
    return lit(Value::date(*d));
  }
  if (t.is_keyword("CASE")) {
    cur.next();
    std::vector<std::pair<ScalarPtr, ScalarPtr>> branches;
    while (cur.accept_keyword("WHEN")) {
      auto cond = parse_or(cur);
      cur.expect_keyword("THEN");
      branches.emplace_back(cond, parse_or(cur));
    }
    if (branches.empty()) cur.error("expected WHEN");
    ScalarPtr otherwise;
    if (cur.accept_keyword("ELSE")) otherwise = parse_or(cur);
    cur.expect_keyword("END");
    return case_when(std::move(branches), otherwise);
  }
  if (t.kind == TokenKind::Ident && !is_reserved(t)) return attr(parse_name(cur, "expression"));
  cur.error("expected expression");
}

ScalarPtr parse_mul(TokenCursor& cur) {
  auto lhs = parse_atom(cur);
  for (;;) {
    if (cur.accept_symbol("*")) lhs = binary(BinaryOp::Mul, lhs, parse_atom(cur));
    else if (cur.accept_symbol("/")) lhs = binary(BinaryOp::Div, lhs, parse_atom(cur));
    else return lhs;
  }
}

ScalarPtr parse_add(TokenCursor& cur) {
  auto lhs = parse_mul(cur);
  for (;;) {
    if (cur.accept_symbol("+")) lhs = binary(BinaryOp::Add, lhs, parse_mul(cur));
    else if (cur.accept_symbol("-")) lhs = binary(BinaryOp::Sub, lhs, parse_mul(cur));
    else return lhs;
  }
}

ScalarPtr parse_cmp(TokenCursor& cur) {
  auto lhs = parse_add(cur);
  static const std::pair<const char*, BinaryOp> ops[] = {{"=", BinaryOp::Eq},  {"<>", BinaryOp::Ne}, {"!=", BinaryOp::Ne},
                                                         {"<=", BinaryOp::Le}, {">=", BinaryOp::Ge}, {"<", BinaryOp::Lt},
                                                         {">", BinaryOp::Gt}};
  for (const auto& [sym, op] : ops)
    if (cur.accept_symbol(sym)) return binary(op, lhs, parse_add(cur));
  if (cur.accept_keyword("LIKE")) return binary(BinaryOp::Like, lhs, parse_add(cur));
  if (cur.accept_keyword("IS")) {
    bool negated = cur.accept_keyword("NOT");
    cur.expect_keyword("NULL");
    return is_null(lhs, negated);
  }
  return lhs;
}

ScalarPtr parse_not(TokenCursor& cur) {
  if (cur.accept_keyword("NOT")) return unary(UnaryOp::Not, parse_not(cur));
  return parse_cmp(cur);
}

ScalarPtr parse_and(TokenCursor& cur) {
  auto lhs = parse_not(cur);
  while (cur.accept_keyword("AND")) lhs = binary(BinaryOp::And, lhs, parse_not(cur));
  return lhs;
}

ScalarPtr parse_or(TokenCursor& cur) {
  auto lhs = parse_and(cur);
  while (cur.accept_keyword("OR")) lhs = binary(BinaryOp::Or, lhs, parse_and(cur));
  return lhs;
}

Domain parse_domain(TokenCursor& cur, std::string* ref_class) {
  const Token& t = cur.peek();
  if (t.kind == TokenKind::Ident)
    if (auto d = domain_from_name(t.text)) {
      cur.next();
      return *d;
    }
  if (ref_class && (t.kind == TokenKind::Ident || t.kind == TokenKind::QuotedIdent)) {
    *ref_class = parse_name(cur, "domain name");
    return Domain::Oid;
  }
  cur.error("expected domain name");
}

Schema parse_schema_impl(TokenCursor& cur, std::map<std::string, std::string>* refs) {
  Schema schema;
  cur.expect_symbol("(");
  if (cur.accept_symbol(")")) return schema;
  do {
    const Token& at = cur.peek();
    std::string name = parse_name(cur, "attribute name");
    cur.expect_symbol(":");
    std::string ref_class;
    Domain d = parse_domain(cur, refs ? &ref_class : nullptr);
    if (!ref_class.empty()) (*refs)[name] = ref_class;
    try {
      schema.add({name, d});
    } catch (const Error& e) {
      cur.error_at(at, e.detail() + ";");
    }
  } while (cur.accept_symbol(","));
  cur.expect_symbol(")");
  return schema;
}

AlgebraPtr parse_values(TokenCursor& cur) {
  Schema schema = parse_schema(cur);
  Relation rel(schema, {});
  cur.expect_symbol("{");
  if (!cur.accept_symbol("}")) {
    do {
      const Token& start = cur.peek();
      cur.expect_symbol("(");
      Tuple t;
      if (!cur.peek().is_symbol(")")) {
        do {
          auto e = parse_atom(cur);
          auto l = std::get_if<scalar::Literal>(&e->node());
          if (!l) cur.error_at(start, "expected literal value in tuple");
          t.push_back(l->value);
        } while (cur.accept_symbol(","));
      }
      cur.expect_symbol(")");
      try {
        rel.insert(std::move(t));
      } catch (const Error& e) {
        cur.error_at(start, e.detail() + ";");
      }
    } while (cur.accept_symbol(","));
    cur.expect_symbol("}");
  }
  return literal(std::move(rel));
}

AlgebraPtr parse_primary(TokenCursor& cur) {
  if (cur.accept_symbol("(")) {
    auto e = parse_algebra(cur);
    cur.expect_symbol(")");
    return e;
  }
  if (cur.accept_keyword("VALUES")) return parse_values(cur);
  return relvar(parse_name(cur, "relation expression"));
}

ProjectItem parse_project_item(TokenCursor& cur) {
  const Token& start = cur.peek();
  auto e = parse_or(cur);
  if (cur.accept_keyword("AS")) return {e, parse_name(cur, "attribute name")};
  if (auto a = std::get_if<scalar::Attr>(&e->node())) return {e, a->name};
  cur.error_at(start, "computed projection item needs AS name;");
}

AlgebraPtr parse_postfix(TokenCursor& cur) {
  auto e = parse_primary(cur);
  for (;;) {
    if (cur.accept_symbol("[")) {
      std::vector<ProjectItem> items;
      if (!cur.peek().is_symbol("]")) {
        do items.push_back(parse_project_item(cur));
        while (cur.accept_symbol(","));
      }
      cur.expect_symbol("]");
      e = project(e, std::move(items));
    } else if (cur.accept_keyword("WHERE")) {
      e = select(e, parse_or(cur));
    } else if (cur.accept_keyword("RENAME")) {
      std::vector<std::pair<std::string, std::string>> renames;
      do {
        std::string from = parse_name(cur, "attribute name");
        cur.expect_keyword("AS");
        renames.emplace_back(from, parse_name(cur, "attribute name"));
      } while (cur.peek().is_symbol(",") && cur.peek(2).is_keyword("AS") && cur.accept_symbol(","));
      e = rename(e, std::move(renames));
    } else if (cur.accept_keyword("GROUP")) {
      cur.expect_keyword("BY");
      auto by = parse_name_list(cur);
      std::vector<AggregateSpec> aggs;
      cur.expect_keyword("AGG");
      cur.expect_symbol("(");
      if (!cur.peek().is_symbol(")")) {
        do {
          AggregateSpec spec;
          if (cur.accept_keyword("SUM")) spec.func = AggFunc::Sum;
          else if (cur.accept_keyword("COUNT")) spec.func = AggFunc::Count;
          else cur.error("expected SUM or COUNT");
          cur.expect_symbol("(");
          if (spec.func == AggFunc::Count && cur.accept_symbol("*")) {
          } else {
            spec.expr = parse_or(cur);
          }
          cur.expect_symbol(")");
          cur.expect_keyword("AS");
          spec.name = parse_name(cur, "aggregate name");
          aggs.push_back(std::move(spec));
        } while (cur.accept_symbol(","));
      }
      cur.expect_symbol(")");
      e = group_aggregate(e, std::move(by), std::move(aggs));
    } else {
      return e;
    }
  }
}

AlgebraPtr parse_join(TokenCursor& cur) {
  auto lhs = parse_postfix(cur);
  for (;;) {
    if (cur.accept_keyword("TIMES")) {
      lhs = product(lhs, parse_postfix(cur));
      continue;
    }
    bool left = false;
    if (cur.peek().is_keyword("LEFT") && cur.peek(1).is_keyword("JOIN")) {
      cur.next();
      left = true;
    } else if (!cur.peek().is_keyword("JOIN")) {
      return lhs;
    }
    cur.expect_keyword("JOIN");
    auto rhs = parse_postfix(cur);
    cur.expect_keyword("ON");
    std::vector<std::pair<std::string, std::string>> on;
    bool paren = cur.accept_symbol("(");
    if (!(paren && cur.peek().is_symbol(")"))) {
      do {
        std::string a = parse_name(cur, "attribute name");
        cur.expect_symbol("=");
        on.emplace_back(a, parse_name(cur, "attribute name"));
      } while (cur.accept_symbol(","));
    }
    if (paren) cur.expect_symbol(")");
    lhs = left ? left_join(lhs, rhs, std::move(on)) : join(lhs, rhs, std::move(on));
  }
}

std::vector<Command> parse_body(TokenCursor& cur) {
  cur.expect_keyword("BEGIN");
  std::vector<Command> body;
  while (!cur.peek().is_keyword("END")) {
    if (cur.at_end()) cur.error("expected END");
    body.push_back(parse_command(cur));
  }
  cur.expect_keyword("END");
  return body;
}

void end_command(TokenCursor& cur) { cur.expect_symbol(";"); }

Command parse_create(TokenCursor& cur) {
  RelVarDef def;
  def.name = parse_name(cur, "relvar name");
  bool has_schema = cur.peek().is_symbol("(");
  if (has_schema) def.schema = parse_schema_impl(cur, &def.ref_classes);
  for (;;) {
    if (cur.accept_keyword("KEY")) {
      def.keys.push_back(parse_name_list(cur));
    } else if (cur.accept_keyword("FKEY")) {
      ForeignKey fk;
      fk.attrs = parse_name_list(cur);
      cur.expect_keyword("ON");
      fk.target = parse_name(cur, "relvar name");
      fk.target_attrs = cur.peek().is_symbol("(") ? parse_name_list(cur) : fk.attrs;
      if (fk.target_attrs.size() != fk.attrs.size()) cur.error("foreign key attribute counts differ;");
      def.fkeys.push_back(std::move(fk));
    } else {
      break;
    }
  }
  if (cur.accept_keyword("AS")) {
    def.kind = RelvarKind::Virtual;
    def.definition = parse_algebra(cur);
  } else if (!has_schema) {
    cur.error("expected attribute list or AS");
  }
  end_command(cur);
  return cmd::Create{std::move(def)};
}

} // namespace

Schema parse_schema(TokenCursor& cur) { return parse_schema_impl(cur, nullptr); }

ScalarPtr parse_scalar(TokenCursor& cur) { return parse_or(cur); }

AlgebraPtr parse_algebra(TokenCursor& cur) {
  auto lhs = parse_join(cur);
  for (;;) {
    if (cur.accept_keyword("UNION")) lhs = union_of(lhs, parse_join(cur));
    else if (cur.accept_keyword("MINUS")) lhs = difference(lhs, parse_join(cur));
    else if (cur.accept_keyword("INTERSECT") || cur.accept_keyword("INTERSEPT")) lhs = intersect(lhs, parse_join(cur));
    else return lhs;
  }
}

Command parse_command(TokenCursor& cur) {
  const Token& t = cur.peek();
  if (cur.accept_keyword("CREATE")) return parse_create(cur);
  if (cur.accept_keyword("SET")) {
    std::string target = parse_name(cur, "relvar name");
    cur.expect_symbol(":=");
    auto value = parse_algebra(cur);
    end_command(cur);
    return cmd::Set{target, value};
  }
  if (cur.accept_keyword("INSERT") || cur.accept_keyword("DELETE")) {
    bool insert = t.is_keyword("INSERT");
    std::string target = parse_name(cur, "relvar name");
    auto value = parse_algebra(cur);
    end_command(cur);
    if (insert) return cmd::Insert{target, value};
    return cmd::Delete{target, value};
  }
  if (cur.accept_keyword("GET")) {
    auto value = parse_algebra(cur);
    end_command(cur);
    return cmd::Get{value};
  }
  if (cur.accept_keyword("TRANS")) {
    TransactionDef def;
    def.name = parse_name(cur, "transaction name");
    cur.expect_symbol("(");
    if (!cur.accept_symbol(")")) {
      do {
        Param p;
        p.name = parse_name(cur, "parameter name");
        p.schema = parse_schema(cur);
        def.params.push_back(std::move(p));
      } while (cur.accept_symbol(","));
      cur.expect_symbol(")");
    }
    cur.expect_keyword("AS");
    def.body = parse_body(cur);
    end_command(cur);
    return cmd::Trans{std::move(def)};
  }
  if (cur.accept_keyword("EXEC")) {
    if (cur.peek().is_keyword("BEGIN")) {
      auto body = parse_body(cur);
      end_command(cur);
      return cmd::Block{std::move(body)};
    }
    cmd::Exec e;
    e.name = parse_name(cur, "transaction name");
    cur.expect_symbol("(");
    if (!cur.accept_symbol(")")) {
      do e.args.push_back(parse_algebra(cur));
      while (cur.accept_symbol(","));
      cur.expect_symbol(")");
    }
    end_command(cur);
    return e;
  }
  if (cur.accept_keyword("LOCAL")) {
    cmd::Local l;
    l.name = parse_name(cur, "local name");
    l.schema = parse_schema(cur);
    if (cur.accept_symbol(":=")) l.init = parse_algebra(cur);
    end_command(cur);
    return l;
  }
  if (cur.accept_keyword("IF")) {
    cmd::If c;
    cur.expect_keyword("EXISTS");
    c.probe = parse_algebra(cur);
    cur.expect_keyword("THEN");
    c.then_body = parse_body(cur);
    if (cur.accept_keyword("ELSE")) c.else_body = parse_body(cur);
    end_command(cur);
    return c;
  }
  if (cur.accept_keyword("WHILE")) {
    cmd::While w;
    cur.expect_keyword("EXISTS");
    w.probe = parse_algebra(cur);
    cur.expect_keyword("DO");
    w.body = parse_body(cur);
    end_command(cur);
    return w;
  }
  if (cur.accept_keyword("ASSERT")) {
    cmd::Assert a;
    if (cur.accept_keyword("EMPTY")) a.mode = cmd::AssertMode::Empty;
    else if (cur.accept_keyword("ONE")) a.mode = cmd::AssertMode::ExactlyOne;
    else cur.error("expected EMPTY or ONE");
    a.value = parse_algebra(cur);
    cur.expect_keyword("ERROR");
    const Token& code = cur.peek();
    if (code.kind != TokenKind::Ident || !error_code_from_name(code.text, a.code)) cur.error("expected error code");
    cur.next();
    if (cur.peek().kind != TokenKind::String) cur.error("expected message string");
    a.message = cur.next().text;
    end_command(cur);
    return a;
  }
  if (cur.accept_keyword("ALLOC")) {
    cmd::Alloc a;
    a.target = parse_name(cur, "local name");
    cur.expect_keyword("FROM");
    a.source = parse_algebra(cur);
    end_command(cur);
    return a;
  }
  cur.error("expected command");
}

ScalarPtr parse_scalar(std::string_view text) {
  TokenCursor cur(tokenize(text));
  auto e = parse_or(cur);
  if (!cur.at_end()) cur.error("unexpected trailing input;");
  return e;
}

AlgebraPtr parse_algebra(std::string_view text) {
  TokenCursor cur(tokenize(text));
  auto e = parse_algebra(cur);
  if (!cur.at_end()) cur.error("unexpected trailing input;");
  return e;
}

std::vector<Command> parse_commands(std::string_view text) {
  TokenCursor cur(tokenize(text));
  std::vector<Command> out;
  while (!cur.at_end()) out.push_back(parse_command(cur));
  return out;
}

// Definitions compare through canonical text; stored values directly.
bool equivalent(const Database& a, const Database& b) {
  if (a.next_oid != b.next_oid || a.catalog_payload != b.catalog_payload) return false;
  if (a.relvars.size() != b.relvars.size() || a.transactions.size() != b.transactions.size()) return false;
  for (const auto& [name, def] : a.relvars) {
    const RelVarDef* other = b.find(name);
    if (!other || to_text(def) != to_text(*other)) return false;
  }
  for (const auto& [name, def] : a.transactions) {
    auto it = b.transactions.find(name);
    if (it == b.transactions.end() || to_text(def) != to_text(it->second)) return false;
  }
  if (a.stored.size() != b.stored.size()) return false;
  for (const auto& [name, rel] : a.stored) {
    auto it = b.stored.find(name);
    if (it == b.stored.end() || !(*rel == *it->second)) return false;
  }
  return true;
}

} // namespace rxo::prs
