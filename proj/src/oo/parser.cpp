#include "rxo/oo/parser.hpp"

#include "rxo/error.hpp"
#include "rxo/prs/lexer.hpp"
#include "rxo/prs/syntax.hpp"

#include <set>

namespace rxo::oo {

std::string Path::post_text() const {
  std::string out;
  for (const auto& s : segments) out += (out.empty() ? "" : ".") + s.name;
  return out;
}

bool Path::has_selection() const {
  if (head_selection) return true;
  for (const auto& s : segments)
    if (s.selection) return true;
  return false;
}

namespace {

const std::set<std::string>& keywords() {
  static const std::set<std::string> words{
      "SELECT", "FROM",   "WHERE", "GROUP", "BY",      "AS",   "AND",     "OR",        "NOT",    "LIKE",
      "IS",     "NULL",   "TRUE",  "FALSE", "THEN",    "ELSE", "END",     "BEGIN",     "DO",     "NEW",
      "FIRST",  "OF",     "WITH",  "SET",   "VALUES",  "ON",   "KEY",     "REFERENCE", "EXEC",   "IF",
      "WHILE",  "RETURN", "DECLARE", "INTO", "CLASS",  "ALTER", "REALIZE", "EXTEND",   "STORED", "UPDATE",
      "INSERT", "DELETE", "SUM",   "COUNT"};
  return words;
}

bool is_keyword_token(const Token& t) {
  if (t.kind != TokenKind::Ident) return false;
  std::string upper = t.text;
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return keywords().count(upper) > 0;
}

class Parser {
public:
  explicit Parser(std::string_view text) : cur_(tokenize(text)) {}

  TokenCursor& cursor() { return cur_; }

  Command command() {
    const Token& t = cur_.peek();
    if (t.is_keyword("CLASS")) return class_create();
    if (t.is_keyword("ALTER")) return realize();
    if (t.is_keyword("NEW")) {
      auto n = new_object();
      end();
      return n;
    }
    if (t.is_keyword("SELECT")) {
      auto s = select();
      end();
      return s;
    }
    if (t.is_keyword("EXEC")) {
      const Token& n1 = cur_.peek(1);
      bool prs = n1.is_keyword("BEGIN") || n1.kind == TokenKind::QuotedIdent ||
                 (n1.kind == TokenKind::Ident && cur_.peek(2).is_symbol("("));
      if (prs) return prs_command();
      return method_exec();
    }
    if (t.is_keyword("INSERT")) {
      if (cur_.peek(1).is_keyword("INTO")) return insert();
      return prs_command();
    }
    if (t.is_keyword("DELETE")) {
      if (cur_.peek(1).is_keyword("FROM")) return remove();
      return prs_command();
    }
    if (t.is_keyword("UPDATE")) return update();
    if (t.is_keyword("CREATE") || t.is_keyword("SET") || t.is_keyword("GET") || t.is_keyword("TRANS"))
      return prs_command();
    cur_.error("expected command");
  }

  Path path(bool angle) {
    Path p;
    const Token& t = cur_.peek();
    if (t.is_symbol(".")) {
      // post-path: head stays empty
    } else if (t.kind == TokenKind::Alias || t.kind == TokenKind::QuotedIdent) {
      p.head = cur_.next().text;
    } else if (t.kind == TokenKind::Ident && !is_keyword_token(t)) {
      p.head = cur_.next().text;
    } else {
      cur_.error("expected path");
    }
    if (!p.head.empty()) p.head_selection = selection(angle);
    bool first = p.head.empty();
    for (;;) {
      // tolerate a stray `>` between a selection and the next segment
      if (cur_.peek().is_symbol(">") && cur_.peek(1).is_symbol(".") && !cur_.peek(1).space_before &&
          (p.head_selection || (!p.segments.empty() && p.segments.back().selection)) && angle)
        cur_.next();
      if (!cur_.peek().is_symbol(".")) break;
      const Token& nt = cur_.peek(1);
      if (nt.kind != TokenKind::Ident && nt.kind != TokenKind::QuotedIdent) {
        if (first) cur_.error_at(nt, "expected member name");
        break;
      }
      cur_.next();
      Segment s;
      s.name = cur_.next().text;
      s.selection = selection(angle);
      p.segments.push_back(std::move(s));
      first = false;
    }
    return p;
  }

  ExprPtr expression() { return or_expr(); }

  StmtList statements_until(std::string_view closer) {
    StmtList out;
    for (;;) {
      while (cur_.accept_symbol(";")) {
      }
      if (closer == "}" ? cur_.peek().is_symbol("}") : cur_.peek().is_keyword("END")) break;
      if (cur_.at_end()) cur_.error(closer == "}" ? "expected '}'" : "expected END");
      out.push_back(statement());
    }
    cur_.next();
    return out;
  }

private:
  void end() { cur_.expect_symbol(";"); }

  std::string name(std::string_view what) {
    const Token& t = cur_.peek();
    if ((t.kind == TokenKind::Ident && !is_keyword_token(t)) || t.kind == TokenKind::QuotedIdent) return cur_.next().text;
    cur_.error("expected " + std::string(what));
  }

  /// `.a.b` or `a.b`, returned without the leading dot.
  std::string member_path() {
    cur_.accept_symbol(".");
    std::string out = name("member name");
    while (cur_.peek().is_symbol(".") && cur_.peek(1).kind == TokenKind::Ident) {
      cur_.next();
      out += "." + cur_.next().text;
    }
    return out;
  }

  std::vector<std::string> member_list() {
    std::vector<std::string> out;
    cur_.expect_symbol("(");
    if (cur_.accept_symbol(")")) return out;
    do out.push_back(member_path());
    while (cur_.accept_symbol(","));
    cur_.expect_symbol(")");
    return out;
  }

  std::string type_name() {
    const Token& t = cur_.peek();
    if (t.kind == TokenKind::Ident || t.kind == TokenKind::QuotedIdent) return cur_.next().text;
    cur_.error("expected type name");
  }

  TypedName typed_name() {
    TypedName tn;
    tn.name = name("name");
    cur_.accept_symbol(":");
    tn.type = type_name();
    return tn;
  }

  std::vector<TypedName> typed_list() {
    std::vector<TypedName> out;
    cur_.expect_symbol("(");
    if (cur_.accept_symbol(")")) return out;
    do out.push_back(typed_name());
    while (cur_.accept_symbol(","));
    cur_.expect_symbol(")");
    return out;
  }

  std::optional<Selection> selection(bool angle) {
    std::string close;
    if (angle && cur_.peek().is_symbol("<")) close = ">";
    else if (cur_.peek().is_symbol("[")) close = "]";
    else return std::nullopt;
    cur_.next();
    bool saved = gt_closes_;
    gt_closes_ = close == ">";
    Selection sel;
    do sel.conditions.push_back(expression());
    while (cur_.accept_symbol(","));
    gt_closes_ = saved;
    cur_.expect_symbol(close);
    return sel;
  }

  // -- expressions ----------------------------------------------------------

  ExprPtr or_expr() {
    auto lhs = and_expr();
    while (cur_.accept_keyword("OR")) lhs = make_expr(expr::Binary{BinaryOp::Or, lhs, and_expr()});
    return lhs;
  }

  ExprPtr and_expr() {
    auto lhs = not_expr();
    while (cur_.accept_keyword("AND")) lhs = make_expr(expr::Binary{BinaryOp::And, lhs, not_expr()});
    return lhs;
  }

  ExprPtr not_expr() {
    if (cur_.accept_keyword("NOT")) return make_expr(expr::Unary{UnaryOp::Not, not_expr()});
    return cmp_expr();
  }

  ExprPtr cmp_expr() {
    auto lhs = add_expr();
    static const std::pair<const char*, BinaryOp> ops[] = {{"=", BinaryOp::Eq},  {"<>", BinaryOp::Ne}, {"!=", BinaryOp::Ne},
                                                           {"<=", BinaryOp::Le}, {">=", BinaryOp::Ge}, {"<", BinaryOp::Lt},
                                                           {">", BinaryOp::Gt}};
    for (const auto& [sym, op] : ops) {
      if (gt_closes_ && std::string_view(sym) == ">") continue;
      if (cur_.accept_symbol(sym)) return make_expr(expr::Binary{op, lhs, add_expr()});
    }
    if (cur_.accept_keyword("LIKE")) return make_expr(expr::Binary{BinaryOp::Like, lhs, add_expr()});
    if (cur_.accept_keyword("IS")) {
      bool negated = cur_.accept_keyword("NOT");
      cur_.expect_keyword("NULL");
      return make_expr(expr::IsNull{lhs, negated});
    }
    return lhs;
  }

  ExprPtr add_expr() {
    auto lhs = mul_expr();
    for (;;) {
      if (cur_.accept_symbol("+")) lhs = make_expr(expr::Binary{BinaryOp::Add, lhs, mul_expr()});
      else if (cur_.accept_symbol("-")) lhs = make_expr(expr::Binary{BinaryOp::Sub, lhs, mul_expr()});
      else return lhs;
    }
  }

  ExprPtr mul_expr() {
    auto lhs = atom();
    for (;;) {
      if (cur_.accept_symbol("*")) lhs = make_expr(expr::Binary{BinaryOp::Mul, lhs, atom()});
      else if (cur_.accept_symbol("/")) lhs = make_expr(expr::Binary{BinaryOp::Div, lhs, atom()});
      else return lhs;
    }
  }

  ExprPtr literal(Value v) { return make_expr(expr::Literal{std::move(v)}); }

  ExprPtr atom() {
    const Token& t = cur_.peek();
    if (t.is_symbol("(")) {
      cur_.next();
      bool saved = gt_closes_;
      gt_closes_ = false;
      ExprPtr e;
      if (cur_.peek().is_keyword("SELECT")) e = make_expr(expr::SubSelect{std::make_shared<const Select>(select())});
      else e = expression();
      gt_closes_ = saved;
      cur_.expect_symbol(")");
      return e;
    }
    if (t.is_symbol("-")) {
      cur_.next();
      const Token& n = cur_.peek();
      if (!n.space_before && (n.kind == TokenKind::Integer || n.kind == TokenKind::Float)) {
        std::string text = "-" + cur_.next().text;
        if (n.kind == TokenKind::Integer) return literal(Value::integer(std::stoll(text)));
        return literal(Value::real(std::stod(text)));
      }
      return make_expr(expr::Unary{UnaryOp::Neg, atom()});
    }
    if (t.kind == TokenKind::Integer) {
      try {
        return literal(Value::integer(std::stoll(cur_.next().text)));
      } catch (const std::out_of_range&) {
        cur_.error_at(t, "integer literal out of range;");
      }
    }
    if (t.kind == TokenKind::Float) return literal(Value::real(std::stod(cur_.next().text)));
    if (t.kind == TokenKind::String) return literal(Value::string(cur_.next().text));
    if (t.is_keyword("NULL")) return cur_.next(), literal(Value::null());
    if (t.is_keyword("TRUE")) return cur_.next(), literal(Value::boolean(true));
    if (t.is_keyword("FALSE")) return cur_.next(), literal(Value::boolean(false));
    if (t.is_keyword("DATE") && cur_.peek(1).kind == TokenKind::String) {
      cur_.next();
      const Token& s = cur_.next();
      auto d = parse_date(s.text);
      if (!d) cur_.error_at(s, "malformed date literal;");
      return literal(Value::date(*d));
    }
    if (t.is_keyword("SELECT")) return make_expr(expr::SubSelect{std::make_shared<const Select>(select())});
    if (t.is_keyword("NEW")) return make_expr(expr::New{std::make_shared<const NewObject>(new_object())});
    if (t.is_keyword("FIRST")) {
      cur_.next();
      cur_.expect_keyword("OF");
      return make_expr(expr::FirstOf{path(true)});
    }
    if ((t.is_keyword("SUM") || t.is_keyword("COUNT")) && cur_.peek(1).is_symbol("(")) {
      expr::Aggregate agg{t.is_keyword("SUM") ? AggKind::Sum : AggKind::Count, {}};
      cur_.next();
      cur_.next();
      bool saved = gt_closes_;
      gt_closes_ = false;
      if (agg.kind == AggKind::Count && cur_.accept_symbol("*")) {
      } else {
        do agg.args.push_back(expression());
        while (cur_.accept_symbol(","));
      }
      gt_closes_ = saved;
      cur_.expect_symbol(")");
      return make_expr(std::move(agg));
    }
    if (t.kind == TokenKind::Alias || t.kind == TokenKind::QuotedIdent || t.is_symbol(".") ||
        (t.kind == TokenKind::Ident && !is_keyword_token(t)))
      return make_expr(expr::PathRef{path(false)});
    cur_.error("expected expression");
  }

  // -- statements -----------------------------------------------------------

  StmtList block_or_statement() {
    if (cur_.accept_keyword("BEGIN")) return statements_until("END");
    if (cur_.accept_symbol("{")) return statements_until("}");
    StmtList one;
    one.push_back(statement());
    return one;
  }

  std::vector<ExprPtr> call_args() {
    std::vector<ExprPtr> args;
    cur_.expect_symbol("(");
    if (cur_.accept_symbol(")")) return args;
    do args.push_back(expression());
    while (cur_.accept_symbol(","));
    cur_.expect_symbol(")");
    return args;
  }

  Stmt statement() {
    const Token& t = cur_.peek();
    if (cur_.accept_keyword("DECLARE")) {
      stmt::Declare d;
      d.name = name("local name");
      cur_.accept_symbol(":");
      d.type = type_name();
      cur_.accept_symbol(";");
      return d;
    }
    if (cur_.accept_keyword("IF")) {
      stmt::If s;
      s.condition = expression();
      cur_.expect_keyword("THEN");
      s.then_body = block_or_statement();
      cur_.accept_symbol(";");
      if (cur_.accept_keyword("ELSE")) s.else_body = block_or_statement();
      return s;
    }
    if (cur_.accept_keyword("WHILE")) {
      stmt::While s;
      s.condition = expression();
      cur_.accept_keyword("DO");
      s.body = block_or_statement();
      return s;
    }
    if (cur_.accept_keyword("RETURN")) {
      stmt::Return r;
      if (!cur_.peek().is_symbol(";") && !cur_.peek().is_symbol("}") && !cur_.peek().is_keyword("END")) r.value = expression();
      cur_.accept_symbol(";");
      return r;
    }
    if (t.is_keyword("BEGIN") || t.is_symbol("{")) {
      // a nested block is flattened into a one-branch IF TRUE
      stmt::If s;
      s.condition = literal(Value::boolean(true));
      s.then_body = block_or_statement();
      return s;
    }
    if (cur_.accept_keyword("EXEC")) {
      stmt::Call c;
      Path p = path(true);
      if (p.segments.empty() && cur_.at_end()) cur_.error("expected .method(...)");
      if (p.segments.empty()) cur_.error_at(t, "EXEC needs group.method(...);");
      c.method = p.segments.back().name;
      if (p.segments.back().selection) cur_.error_at(t, "method name cannot carry a selection;");
      p.segments.pop_back();
      c.group = std::move(p);
      c.args = call_args();
      cur_.accept_symbol(";");
      return c;
    }
    if (t.kind == TokenKind::Ident && !is_keyword_token(t) && cur_.peek(1).is_symbol("(")) {
      stmt::Call c;
      c.method = cur_.next().text;
      c.args = call_args();
      cur_.accept_symbol(";");
      return c;
    }
    stmt::Assign a = assignment();
    cur_.accept_symbol(";");
    return a;
  }

  stmt::Assign assignment() {
    stmt::Assign a;
    a.target = path(false);
    if (a.target.head_selection || a.target.has_selection()) cur_.error("assignment target cannot carry a selection");
    if (!cur_.accept_symbol(":=") && !cur_.accept_symbol("=")) cur_.error("expected ':='");
    a.value = expression();
    return a;
  }

  // -- commands -------------------------------------------------------------

  Command prs_command() { return PrsCommand{prs::parse_command(cur_)}; }

  ComponentDecl component() {
    ComponentDecl c;
    c.name = name("component name");
    if (cur_.peek().is_symbol("(")) {
      c.kind = ComponentKind::Method;
      c.params = typed_list();
      return c;
    }
    cur_.accept_symbol(":");
    if (cur_.peek().is_keyword("SET") && cur_.peek(1).is_keyword("OF")) {
      cur_.next();
      cur_.next();
      c.kind = ComponentKind::Complex;
      c.attributes = typed_list();
      while (cur_.accept_keyword("KEY")) c.keys.push_back(member_list());
      return c;
    }
    c.type = type_name();
    return c;
  }

  Command class_create() {
    cur_.expect_keyword("CLASS");
    ClassCreate c;
    c.name = name("class name");
    if (cur_.accept_keyword("EXTEND")) {
      do c.parents.push_back(name("parent class name"));
      while (cur_.accept_symbol(","));
    }
    cur_.expect_symbol("(");
    if (!cur_.accept_symbol(")")) {
      do c.components.push_back(component());
      while (cur_.accept_symbol(",") || cur_.accept_symbol(";"));
      cur_.expect_symbol(")");
    }
    for (;;) {
      if (cur_.accept_keyword("KEY")) {
        c.keys.push_back(member_list());
      } else if (cur_.accept_keyword("REFERENCE")) {
        RefConstraint r;
        if (!cur_.peek().is_symbol("(")) r.component = name("component name");
        r.attrs = member_list();
        cur_.expect_keyword("ON");
        r.target_class = name("class name");
        r.target_attrs = member_list();
        c.references.push_back(std::move(r));
      } else {
        break;
      }
    }
    end();
    return c;
  }

  Command realize() {
    cur_.expect_keyword("ALTER");
    Realize r;
    r.class_name = name("class name");
    cur_.expect_keyword("REALIZE");
    do r.members.push_back(name("member name"));
    while (cur_.accept_symbol(","));
    if (cur_.peek().is_symbol("(")) r.params = typed_list();
    cur_.expect_keyword("AS");
    if (cur_.accept_keyword("STORED")) {
      r.body = StoredBody{};
      end();
    } else if (cur_.accept_symbol("{")) {
      r.body = ProcedureBody{statements_until("}")};
      cur_.accept_symbol(";");
    } else if (cur_.accept_keyword("BEGIN")) {
      r.body = ProcedureBody{statements_until("END")};
      cur_.accept_symbol(";");
    } else {
      r.body = CalculatedBody{expression()};
      end();
    }
    return r;
  }

  NewObject new_object() {
    cur_.expect_keyword("NEW");
    NewObject n;
    n.class_name = name("class name");
    if (cur_.accept_keyword("WITH")) {
      cur_.expect_keyword("SET");
      do n.assignments.push_back(assignment());
      while (cur_.accept_symbol(","));
    }
    return n;
  }

  Command method_exec() {
    const Token& start = cur_.expect_keyword("EXEC");
    MethodExec m;
    m.group = path(true);
    if (m.group.segments.empty() && cur_.at_end()) cur_.error("expected .method(...)");
    if (m.group.segments.empty()) cur_.error_at(start, "EXEC needs group.method(...);");
    if (m.group.segments.back().selection) cur_.error_at(start, "method name cannot carry a selection;");
    m.method = m.group.segments.back().name;
    m.group.segments.pop_back();
    m.args = call_args();
    end();
    return m;
  }

  Select select() {
    cur_.expect_keyword("SELECT");
    Select s;
    bool saved = gt_closes_;
    gt_closes_ = false;
    for (;;) {
      SelectItem item;
      item.value = expression();
      if (cur_.accept_keyword("AS")) item.alias = name("column name");
      s.items.push_back(std::move(item));
      if (cur_.accept_symbol(",")) continue;
      if (cur_.peek().kind == TokenKind::Alias) continue; // tolerate a missing comma
      break;
    }
    if (cur_.accept_keyword("FROM")) {
      do {
        FromItem f;
        f.path = path(true);
        if (cur_.peek().kind == TokenKind::Alias) f.alias = cur_.next().text;
        s.from.push_back(std::move(f));
      } while (cur_.accept_symbol(","));
    }
    if (cur_.accept_keyword("WHERE")) s.where = expression();
    if (cur_.accept_keyword("GROUP")) {
      cur_.expect_keyword("BY");
      do s.group_by.push_back(expression());
      while (cur_.accept_symbol(","));
    }
    gt_closes_ = saved;
    return s;
  }

  Command insert() {
    cur_.expect_keyword("INSERT");
    cur_.expect_keyword("INTO");
    Insert ins;
    ins.target = path(true);
    ins.attributes = member_list();
    cur_.expect_keyword("VALUES");
    do {
      const Token& row_start = cur_.peek();
      auto row = call_args();
      if (row.size() != ins.attributes.size()) cur_.error_at(row_start, "row width differs from attribute list;");
      ins.rows.push_back(std::move(row));
    } while (cur_.accept_symbol(","));
    end();
    return ins;
  }

  Command update() {
    cur_.expect_keyword("UPDATE");
    Update u;
    u.target = path(true);
    cur_.expect_keyword("SET");
    bool paren = cur_.accept_symbol("(");
    do u.assignments.push_back(assignment());
    while (cur_.accept_symbol(","));
    if (paren) cur_.expect_symbol(")");
    end();
    return u;
  }

  Command remove() {
    cur_.expect_keyword("DELETE");
    cur_.expect_keyword("FROM");
    Delete d{path(true)};
    end();
    return d;
  }

  TokenCursor cur_;
  bool gt_closes_ = false;
};

} // namespace

std::vector<ParsedCommand> parse_script(std::string_view text) {
  Parser p(text);
  auto& cur = p.cursor();
  std::vector<ParsedCommand> out;
  while (!cur.at_end()) {
    if (cur.accept_symbol(";")) continue;
    const Token& start = cur.peek();
    std::size_t begin = start.offset;
    int line = start.line;
    std::size_t last = cur.position();
    Command c = p.command();
    std::size_t finish = cur.position() > last ? cur.previous().end : begin;
    std::string src(text.substr(begin, finish - begin));
    out.push_back({std::move(c), line, std::move(src)});
  }
  return out;
}

Command parse_command(std::string_view text) {
  auto cmds = parse_script(text);
  if (cmds.size() != 1)
    fail(cmds.empty() ? ErrorCode::UnterminatedCommand : ErrorCode::SyntaxError,
         "expected exactly one command, found " + std::to_string(cmds.size()));
  return std::move(cmds[0].command);
}

Path parse_path(std::string_view text) {
  Parser p(text);
  Path path = p.path(true);
  if (!p.cursor().at_end()) p.cursor().error("unexpected trailing input;");
  return path;
}

ExprPtr parse_expression(std::string_view text) {
  Parser p(text);
  auto e = p.expression();
  if (!p.cursor().at_end()) p.cursor().error("unexpected trailing input;");
  return e;
}

} // namespace rxo::oo
