#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace rxo {

/// Scalar domain tags. `Any` is the domain of an untyped NULL literal and
/// unifies with every other domain.
enum class Domain : std::uint8_t { Any, Integer, Float, String, DateTime, Boolean, Oid };

std::string_view to_string(Domain d);
std::optional<Domain> domain_from_name(std::string_view name);
bool is_numeric(Domain d);

/// Calendar day, stored as days since 1970-01-01.
struct Date {
  std::int32_t days = 0;
  auto operator<=>(const Date&) const = default;
};

/// Parses `YYYY-MM-DD` or `YYYY.MM.DD`; returns nullopt on malformed or impossible dates.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

/// Opaque object identifier. Only the machine's OID allocator produces these.
struct Oid {
  std::uint64_t id = 0;
  auto operator<=>(const Oid&) const = default;
};

class Value {
public:
  using Payload = std::variant<std::monostate, std::int64_t, double, std::string, Date, bool, Oid>;

  Value() = default;
  static Value null() { return Value(); }
  static Value integer(std::int64_t v) { return Value(Payload(v)); }
  static Value real(double v) { return Value(Payload(v)); }
  static Value string(std::string v) { return Value(Payload(std::move(v))); }
  static Value date(Date v) { return Value(Payload(v)); }
  static Value boolean(bool v) { return Value(Payload(v)); }
  static Value oid(Oid v) { return Value(Payload(v)); }

  bool is_null() const { return payload_.index() == 0; }
  /// Domain of a non-NULL value; `Any` for NULL.
  Domain domain() const;

  std::int64_t as_integer() const { return std::get<std::int64_t>(payload_); }
  double as_real() const { return std::get<double>(payload_); }
  const std::string& as_string() const { return std::get<std::string>(payload_); }
  Date as_date() const { return std::get<Date>(payload_); }
  bool as_bool() const { return std::get<bool>(payload_); }
  Oid as_oid() const { return std::get<Oid>(payload_); }
  /// Numeric value widened to double (INTEGER or FLOAT only).
  double as_number() const;

  const Payload& payload() const { return payload_; }

  /// Total order used for set semantics: NULL sorts first and equals NULL.
  friend bool operator==(const Value& a, const Value& b);
  friend bool operator<(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

  /// Display form: NULL is empty, OIDs print as `@n`.
  std::string to_display() const;
  /// Literal form accepted back by the parsers (strings quoted, NULL spelled NULL).
  std::string to_literal() const;

private:
  explicit Value(Payload p) : payload_(std::move(p)) {}
  Payload payload_;
};

/// Converts `v` into domain `target` where a lossless or widening conversion
/// exists (INTEGER to FLOAT, NULL to anything). Returns nullopt otherwise.
std::optional<Value> coerce(const Value& v, Domain target);

} // namespace rxo
