#include "rxo/prs/persistence.hpp"

#include "rxo/error.hpp"
#include "rxo/prs/syntax.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace rxo::prs {

namespace {

constexpr const char* kCatalogFile = "catalog.txt";
constexpr const char* kMagic = "RXO-DATABASE 1";
constexpr const char* kTupleSuffix = ".tuples";

std::string file_name_for(const std::string& relvar) {
  std::string out;
  for (unsigned char c : relvar) {
    if (std::isalnum(c) || c == '_' || c == '.' || c == '\'' || c == '-') {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  return out + kTupleSuffix;
}

std::string escape_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '\t': out += "\\t"; break;
    case '\n': out += "\\n"; break;
    case '\r': out += "\\r"; break;
    case '\\': out += "\\\\"; break;
    default: out += c;
    }
  }
  return out;
}

std::string encode(const Value& v) {
  if (v.is_null()) return "\\N";
  switch (v.domain()) {
  case Domain::Integer: return std::to_string(v.as_integer());
  case Domain::Float: {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v.as_real());
    return buf;
  }
  case Domain::String: return escape_field(v.as_string());
  case Domain::DateTime: return format_date(v.as_date());
  case Domain::Boolean: return v.as_bool() ? "TRUE" : "FALSE";
  case Domain::Oid: return std::to_string(v.as_oid().id);
  default: return escape_field(v.to_display());
  }
}

[[noreturn]] void format_error(const fs::path& file, std::size_t line, const std::string& msg) {
  fail(ErrorCode::FormatError, file.filename().string() + " line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == '\t') out.emplace_back();
    else out.back() += c;
  }
  return out;
}

bool unescape_field(const std::string& s, std::string& out) {
  out.clear();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (++i == s.size()) return false;
    switch (s[i]) {
    case 't': out += '\t'; break;
    case 'n': out += '\n'; break;
    case 'r': out += '\r'; break;
    case '\\': out += '\\'; break;
    default: return false;
    }
  }
  return true;
}

bool decode(const std::string& field, Domain d, Value& out) {
  if (field == "\\N") {
    out = Value::null();
    return true;
  }
  try {
    std::size_t used = 0;
    switch (d) {
    case Domain::Integer:
      out = Value::integer(std::stoll(field, &used));
      return used == field.size();
    case Domain::Float:
      out = Value::real(std::stod(field, &used));
      return used == field.size();
    case Domain::DateTime:
      if (auto date = parse_date(field)) {
        out = Value::date(*date);
        return true;
      }
      return false;
    case Domain::Boolean:
      if (field != "TRUE" && field != "FALSE") return false;
      out = Value::boolean(field == "TRUE");
      return true;
    case Domain::Oid:
      if (field.empty() || field[0] == '-') return false;
      out = Value::oid(Oid{std::stoull(field, &used)});
      return used == field.size();
    default: {
      std::string s;
      if (!unescape_field(field, s)) return false;
      out = Value::string(std::move(s));
      return true;
    }
    }
  } catch (const std::exception&) {
    return false;
  }
}

void write_file(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoError, "cannot replace " + path.string() + ": " + ec.message());
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

Relation load_tuples(const fs::path& file, const RelVarDef& def) {
  if (!fs::exists(file)) format_error(file, 0, "missing tuple file for " + def.name);
  auto lines = read_lines(file);
  if (lines.empty()) format_error(file, 1, "missing header");
  auto header = split_tabs(lines[0]);
  std::vector<std::string> expected;
  for (const auto& a : def.schema.attributes()) expected.push_back(a.name + ":" + std::string(to_string(a.domain)));
  if (def.schema.arity() == 0) expected.push_back("");
  if (header != expected) format_error(file, 1, "header does not match schema of " + def.name);
  Relation rel(def.schema, {});
  for (std::size_t n = 1; n < lines.size(); ++n) {
    auto fields = def.schema.arity() == 0 && lines[n].empty() ? std::vector<std::string>{} : split_tabs(lines[n]);
    if (fields.size() != def.schema.arity())
      format_error(file, n + 1, "expected " + std::to_string(def.schema.arity()) + " fields");
    Tuple t;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      Value v;
      if (!decode(fields[i], def.schema[i].domain, v))
        format_error(file, n + 1, "bad " + std::string(to_string(def.schema[i].domain)) + " value '" + fields[i] + "'");
      t.push_back(std::move(v));
    }
    rel.insert_unchecked(std::move(t));
  }
  return rel;
}

} // namespace

void save_database(const Database& db, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  std::ostringstream cat;
  cat << kMagic << "\n";
  cat << "NEXT_OID " << db.next_oid << "\n";
  for (const auto& [name, def] : db.relvars) cat << "RELVAR " << to_text(def) << "\n";
  for (const auto& [name, def] : db.transactions) cat << "TRANS " << to_text(def) << "\n";
  std::vector<std::string> payload;
  {
    std::istringstream in(db.catalog_payload);
    std::string line;
    while (std::getline(in, line)) payload.push_back(line);
  }
  bool trailing_newline = !db.catalog_payload.empty() && db.catalog_payload.back() == '\n';
  cat << "PAYLOAD " << payload.size() << (trailing_newline ? " NL" : "") << "\n";
  for (const auto& l : payload) cat << l << "\n";
  cat << "END\n";

  std::set<std::string> written;
  for (const auto& [name, def] : db.relvars) {
    if (def.kind != RelvarKind::Real) continue;
    std::ostringstream out;
    const auto& attrs = def.schema.attributes();
    for (std::size_t i = 0; i < attrs.size(); ++i)
      out << (i ? "\t" : "") << attrs[i].name << ":" << to_string(attrs[i].domain);
    out << "\n";
    for (const auto& t : db.stored_value(name).tuples()) {
      for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "\t" : "") << encode(t[i]);
      out << "\n";
    }
    std::string file = file_name_for(name);
    write_file(dir / file, out.str());
    written.insert(file);
  }
  write_file(dir / kCatalogFile, cat.str());

  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    std::string file = entry.path().filename().string();
    if (file.size() > 7 && file.compare(file.size() - 7, 7, kTupleSuffix) == 0 && !written.count(file))
      fs::remove(entry.path(), ec);
  }
}

Database load_database(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::IoError, "not a database directory: " + dir.string());
  fs::path catalog = dir / kCatalogFile;
  if (!fs::exists(catalog)) fail(ErrorCode::FormatError, "no " + std::string(kCatalogFile) + " in " + dir.string());
  auto lines = read_lines(catalog);
  if (lines.empty() || lines[0] != kMagic) format_error(catalog, 1, "missing header '" + std::string(kMagic) + "'");

  Database db;
  bool ended = false;
  for (std::size_t n = 1; n < lines.size() && !ended; ++n) {
    const std::string& line = lines[n];
    auto space = line.find(' ');
    std::string tag = line.substr(0, space);
    std::string rest = space == std::string::npos ? "" : line.substr(space + 1);
    try {
      if (tag == "NEXT_OID") {
        std::size_t used = 0;
        db.next_oid = std::stoull(rest, &used);
        if (used != rest.size() || db.next_oid == 0) format_error(catalog, n + 1, "bad OID counter");
      } else if (tag == "RELVAR" || tag == "TRANS") {
        auto cmds = parse_commands(rest);
        if (cmds.size() != 1) format_error(catalog, n + 1, "expected one definition");
        if (tag == "RELVAR") {
          auto c = std::get_if<cmd::Create>(&cmds[0].node);
          if (!c) format_error(catalog, n + 1, "expected CREATE");
          if (!db.relvars.emplace(c->def.name, c->def).second) format_error(catalog, n + 1, "duplicate relvar " + c->def.name);
        } else {
          auto t = std::get_if<cmd::Trans>(&cmds[0].node);
          if (!t) format_error(catalog, n + 1, "expected TRANS");
          if (!db.transactions.emplace(t->def.name, t->def).second)
            format_error(catalog, n + 1, "duplicate transaction " + t->def.name);
        }
      } else if (tag == "PAYLOAD") {
        std::istringstream in(rest);
        std::size_t count = 0;
        std::string flag;
        if (!(in >> count)) format_error(catalog, n + 1, "bad payload size");
        in >> flag;
        if (n + count >= lines.size()) format_error(catalog, n + 1, "truncated payload");
        std::string payload;
        for (std::size_t k = 0; k < count; ++k) payload += lines[n + 1 + k] + (k + 1 < count || flag == "NL" ? "\n" : "");
        db.catalog_payload = std::move(payload);
        n += count;
      } else if (tag == "END") {
        ended = true;
      } else {
        format_error(catalog, n + 1, "unknown record '" + tag + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::FormatError) throw;
      format_error(catalog, n + 1, e.what());
    } catch (const std::exception&) {
      format_error(catalog, n + 1, "malformed record");
    }
  }
  if (!ended) format_error(catalog, lines.size(), "missing END record");

  for (const auto& [name, def] : db.relvars) {
    if (def.kind != RelvarKind::Real) continue;
    db.stored[name] = std::make_shared<const Relation>(load_tuples(dir / file_name_for(name), def));
  }
  return db;
}

} // namespace rxo::prs
