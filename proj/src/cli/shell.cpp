#include "rxo/cli/shell.hpp"

#include "rxo/error.hpp"
#include "rxo/oo/parser.hpp"
#include "rxo/prs/syntax.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace rxo::cli {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string rstrip(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

} // namespace

std::string format_relation(const Relation& rel, OutputMode mode) {
  auto header = rel.schema().names();
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : rel.tuples()) {
    std::vector<std::string> row;
    for (const auto& v : t) row.push_back(v.is_null() ? (mode == OutputMode::Tabs ? "\\N" : "") : v.to_display());
    rows.push_back(std::move(row));
  }
  std::string out;
  if (mode == OutputMode::Tabs) {
    out += join(header, "\t") + "\n";
    for (const auto& r : rows) out += join(r, "\t") + "\n";
    return out;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += "  ";
      s += cells[i] + std::string(width[i] - cells[i].size(), ' ');
    }
    return rstrip(s) + "\n";
  };
  out += line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  out += line(rule);
  for (const auto& r : rows) out += line(r);
  return out;
}

Shell::Shell(ShellOptions opts, std::ostream& out, std::ostream& err)
    : opts_(std::move(opts)), out_(out), err_(err) {
  if (opts_.db && std::filesystem::exists(*opts_.db) && !std::filesystem::is_empty(*opts_.db))
    session_ = oo::Session::load(*opts_.db);
}

bool Shell::run(std::istream& in, const std::string& origin, bool prompt) {
  origin_ = origin;
  pending_.clear();
  line_ = 0;
  commands_ = 0;
  interactive_ = prompt;
  std::string line;
  for (;;) {
    if (prompt) out_ << (pending_.empty() ? "rxo> " : "...> ") << std::flush;
    if (!std::getline(in, line)) break;
    if (!feed(line)) return false;
  }
  if (prompt) out_ << "\n";
  bool ok = flush_incomplete();
  interactive_ = false;
  return ok;
}

bool Shell::run_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  return run(in, origin);
}

void Shell::persist() {
  if (opts_.db) session_.save(*opts_.db);
}

bool Shell::feed(const std::string& line) {
  ++line_;
  if (pending_.empty()) {
    auto t = trim(line);
    if (!t.empty() && t[0] == '\\') {
      try {
        meta(t);
      } catch (const std::exception& e) {
        report(line_, e.what(), false);
      }
      return !halted();
    }
    pending_line_ = line_;
  }
  pending_ += line + "\n";
  try {
    auto cmds = oo::parse_script(pending_);
    (void)cmds;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnterminatedCommand) return true;
  }
  auto text = std::move(pending_);
  pending_.clear();
  execute(text, pending_line_);
  return !halted();
}

bool Shell::flush_incomplete() {
  if (trim(pending_).empty()) {
    pending_.clear();
    return !halted();
  }
  auto text = std::move(pending_);
  pending_.clear();
  execute(text, pending_line_);
  return !halted();
}

void Shell::execute(const std::string& text, int first_line) {
  std::vector<oo::ParsedCommand> cmds;
  try {
    cmds = oo::parse_script(text);
  } catch (const std::exception& e) {
    ++commands_;
    report(first_line, e.what());
    return;
  }
  for (const auto& c : cmds) {
    ++commands_;
    int line = first_line + c.line - 1;
    if (opts_.echo) out_ << trim(c.source) << "\n";
    try {
      for (const auto& rel : session_.execute(c.command)) out_ << format_relation(rel, opts_.mode) << "\n";
    } catch (const std::exception& e) {
      report(line, e.what());
      if (halted()) return;
    }
  }
}

void Shell::report(int line, const std::string& message, bool command) {
  ++errors_;
  err_ << "error: " << origin_ << ":" << line << ": ";
  if (command) err_ << "command " << commands_ << ": ";
  err_ << message << "\n";
}

void Shell::meta(const std::string& line) {
  std::istringstream in(line);
  std::string cmd, arg;
  in >> cmd;
  std::getline(in, arg);
  arg = trim(arg);
  const auto& db = session_.database();
  if (cmd == "\\quit" || cmd == "\\q") {
    quit_ = true;
  } else if (cmd == "\\classes") {
    for (const auto& c : session_.catalog().class_names()) out_ << c << "\n";
  } else if (cmd == "\\relvars") {
    for (const auto& [name, def] : db.relvars)
      out_ << name << (def.kind == prs::RelvarKind::Real ? "  REAL" : "  VIRTUAL") << "\n";
  } else if (cmd == "\\schema") {
    if (arg.empty()) fail(ErrorCode::SyntaxError, "\\schema needs a relvar or transaction name");
    if (const auto* def = db.find(arg)) {
      out_ << def->schema.to_string().substr(1, def->schema.to_string().size() - 2) << "\n";
      for (const auto& k : def->keys) out_ << "KEY (" << join(k, ", ") << ")\n";
      for (const auto& fk : def->fkeys)
        out_ << "FKEY (" << join(fk.attrs, ", ") << ") ON " << fk.target << " (" << join(fk.target_attrs, ", ")
             << ")\n";
    } else if (auto it = db.transactions.find(arg); it != db.transactions.end()) {
      std::vector<std::string> params;
      for (const auto& p : it->second.params) params.push_back(p.name + " " + prs::to_text(p.schema));
      out_ << "TRANS " << arg << " (" << join(params, ", ") << ")\n";
    } else {
      fail(ErrorCode::UnknownRelvar, "no relvar or transaction named " + arg);
    }
  } else if (cmd == "\\echo") {
    if (arg == "on") opts_.echo = true;
    else if (arg == "off") opts_.echo = false;
    else fail(ErrorCode::SyntaxError, "\\echo expects on or off");
  } else if (cmd == "\\save") {
    if (arg.empty() && !opts_.db) fail(ErrorCode::IoError, "in-memory session: \\save needs a path");
    session_.save(arg.empty() ? *opts_.db : std::filesystem::path(arg));
  } else if (cmd == "\\load") {
    if (arg.empty()) fail(ErrorCode::IoError, "\\load needs a path");
    session_ = oo::Session::load(arg);
  } else {
    fail(ErrorCode::SyntaxError, "unknown meta-command " + cmd);
  }
}

} // namespace rxo::cli
