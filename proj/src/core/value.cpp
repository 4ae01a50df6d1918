#include "rxo/core/value.hpp"

#include "rxo/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace rxo {

bool error_code_from_name(std::string_view name, ErrorCode& out) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::UsageError); ++i) {
    auto c = static_cast<ErrorCode>(i);
    if (to_string(c) == name) {
      out = c;
      return true;
    }
  }
  return false;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::UnknownRelvar: return "UnknownRelvar";
  case ErrorCode::UnknownAttribute: return "UnknownAttribute";
  case ErrorCode::SchemaMismatch: return "SchemaMismatch";
  case ErrorCode::TypeError: return "TypeError";
  case ErrorCode::DivisionByZero: return "DivisionByZero";
  case ErrorCode::DuplicateName: return "DuplicateName";
  case ErrorCode::CyclicDefinition: return "CyclicDefinition";
  case ErrorCode::VirtualTargetNotUpdatable: return "VirtualTargetNotUpdatable";
  case ErrorCode::KeyViolation: return "KeyViolation";
  case ErrorCode::ForeignKeyViolation: return "ForeignKeyViolation";
  case ErrorCode::UnknownTransaction: return "UnknownTransaction";
  case ErrorCode::ArgumentMismatch: return "ArgumentMismatch";
  case ErrorCode::AssertionFailed: return "AssertionFailed";
  case ErrorCode::IoError: return "IoError";
  case ErrorCode::FormatError: return "FormatError";
  case ErrorCode::SyntaxError: return "SyntaxError";
  case ErrorCode::UnterminatedCommand: return "UnterminatedCommand";
  case ErrorCode::DuplicateClass: return "DuplicateClass";
  case ErrorCode::UnknownParent: return "UnknownParent";
  case ErrorCode::MemberConflict: return "MemberConflict";
  case ErrorCode::UnknownReferencedClass: return "UnknownReferencedClass";
  case ErrorCode::UnknownName: return "UnknownName";
  case ErrorCode::IllegalContinuation: return "IllegalContinuation";
  case ErrorCode::NonScalarInCondition: return "NonScalarInCondition";
  case ErrorCode::UnknownMember: return "UnknownMember";
  case ErrorCode::KindMismatch: return "KindMismatch";
  case ErrorCode::AmbiguousImplementation: return "AmbiguousImplementation";
  case ErrorCode::NotUpdatableCalculated: return "NotUpdatableCalculated";
  case ErrorCode::NonTerminalProjection: return "NonTerminalProjection";
  case ErrorCode::CyclicBinding: return "CyclicBinding";
  case ErrorCode::LoopLimitExceeded: return "LoopLimitExceeded";
  case ErrorCode::NotFullyImplemented: return "NotFullyImplemented";
  case ErrorCode::FirstOfCardinality: return "FirstOfCardinality";
  case ErrorCode::UnknownMethod: return "UnknownMethod";
  case ErrorCode::Unsupported: return "Unsupported";
  case ErrorCode::UsageError: return "UsageError";
  }
  return "Error";
}

std::string_view to_string(Domain d) {
  switch (d) {
  case Domain::Any: return "ANY";
  case Domain::Integer: return "INTEGER";
  case Domain::Float: return "FLOAT";
  case Domain::String: return "STRING";
  case Domain::DateTime: return "DATETIME";
  case Domain::Boolean: return "BOOLEAN";
  case Domain::Oid: return "dOID";
  }
  return "?";
}

std::optional<Domain> domain_from_name(std::string_view name) {
  std::string upper(name);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "INTEGER" || upper == "INT") return Domain::Integer;
  if (upper == "FLOAT" || upper == "REAL") return Domain::Float;
  if (upper == "STRING") return Domain::String;
  if (upper == "DATETIME" || upper == "DATE") return Domain::DateTime;
  if (upper == "BOOLEAN") return Domain::Boolean;
  if (upper == "DOID") return Domain::Oid;
  if (upper == "ANY") return Domain::Any;
  return std::nullopt;
}

bool is_numeric(Domain d) { return d == Domain::Integer || d == Domain::Float; }

namespace {

// Howard Hinnant's civil calendar algorithms.
std::int32_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int32_t>(era * 146097 + static_cast<std::int64_t>(doe) - 719468);
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

} // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10) return std::nullopt;
  const char sep = text[4];
  if ((sep != '-' && sep != '.') || text[7] != sep) return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len) -> std::optional<unsigned> {
    unsigned v = 0;
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
    if (ec != std::errc() || p != text.data() + pos + len) return std::nullopt;
    return v;
  };
  auto y = num(0, 4), m = num(5, 2), d = num(8, 2);
  if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1) return std::nullopt;
  static constexpr std::array<unsigned, 12> month_len{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  unsigned limit = month_len[*m - 1] + ((*m == 2 && is_leap(*y)) ? 1 : 0);
  if (*d > limit) return std::nullopt;
  return Date{days_from_civil(*y, *m, *d)};
}

std::string format_date(Date date) {
  std::int64_t y;
  unsigned m, d;
  civil_from_days(date.days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
  return buf;
}

Domain Value::domain() const {
  switch (payload_.index()) {
  case 1: return Domain::Integer;
  case 2: return Domain::Float;
  case 3: return Domain::String;
  case 4: return Domain::DateTime;
  case 5: return Domain::Boolean;
  case 6: return Domain::Oid;
  default: return Domain::Any;
  }
}

double Value::as_number() const {
  if (auto* i = std::get_if<std::int64_t>(&payload_)) return static_cast<double>(*i);
  return std::get<double>(payload_);
}

bool operator==(const Value& a, const Value& b) {
  if (a.payload_.index() != b.payload_.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) return true;
        else return x == std::get<T>(b.payload_);
      },
      a.payload_);
}

bool operator<(const Value& a, const Value& b) {
  if (a.payload_.index() != b.payload_.index()) return a.payload_.index() < b.payload_.index();
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) return false;
        else return x < std::get<T>(b.payload_);
      },
      a.payload_);
}

namespace {
std::string format_double(double v, bool exact = false) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (exact && std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
} // namespace

std::string Value::to_display() const {
  switch (payload_.index()) {
  case 0: return "";
  case 1: return std::to_string(as_integer());
  case 2: return format_double(as_real());
  case 3: return as_string();
  case 4: return format_date(as_date());
  case 5: return as_bool() ? "TRUE" : "FALSE";
  case 6: return "@" + std::to_string(as_oid().id);
  }
  return "";
}

std::string Value::to_literal() const {
  switch (payload_.index()) {
  case 0: return "NULL";
  case 2: {
    std::string s = format_double(as_real(), true);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  }
  case 3: {
    std::string out = "\"";
    for (char c : as_string()) {
      switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
      }
    }
    return out + "\"";
  }
  case 4: return "DATE '" + format_date(as_date()) + "'";
  default: return to_display();
  }
}

std::optional<Value> coerce(const Value& v, Domain target) {
  if (v.is_null() || target == Domain::Any || v.domain() == target) return v;
  if (v.domain() == Domain::Integer && target == Domain::Float) return Value::real(static_cast<double>(v.as_integer()));
  if (v.domain() == Domain::String && target == Domain::DateTime) {
    if (auto d = parse_date(v.as_string())) return Value::date(*d);
  }
  return std::nullopt;
}

} // namespace rxo
