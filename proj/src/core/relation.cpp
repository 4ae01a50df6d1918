#include "rxo/core/relation.hpp"

#include "rxo/error.hpp"

#include <sstream>

namespace rxo {

Schema::Schema(std::initializer_list<Attribute> attrs) {
  for (const auto& a : attrs) add(a);
}

Schema::Schema(std::vector<Attribute> attrs) {
  for (auto& a : attrs) add(std::move(a));
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attrs_.size(); ++i)
    if (attrs_[i].name == name) return i;
  return std::nullopt;
}

std::size_t Schema::require(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  fail(ErrorCode::UnknownAttribute, "attribute '" + std::string(name) + "' not in " + to_string());
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(attrs_.size());
  for (const auto& a : attrs_) out.push_back(a.name);
  return out;
}

void Schema::add(Attribute a) {
  if (contains(a.name)) fail(ErrorCode::SchemaMismatch, "duplicate attribute '" + a.name + "'");
  attrs_.push_back(std::move(a));
}

std::string Schema::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < attrs_.size(); ++i) {
    if (i) os << ", ";
    os << attrs_[i].name << ':' << rxo::to_string(attrs_[i].domain);
  }
  os << ')';
  return os.str();
}

Relation::Relation(Schema schema, std::initializer_list<Tuple> tuples) : schema_(std::move(schema)) {
  for (const auto& t : tuples) insert(t);
}

void Relation::insert(Tuple t) {
  if (t.size() != schema_.arity())
    fail(ErrorCode::SchemaMismatch, "tuple arity " + std::to_string(t.size()) + " vs schema " + schema_.to_string());
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto c = coerce(t[i], schema_[i].domain);
    if (!c)
      fail(ErrorCode::TypeError, "value " + t[i].to_literal() + " not in domain " +
                                     std::string(rxo::to_string(schema_[i].domain)) + " of " + schema_[i].name);
    t[i] = std::move(*c);
  }
  tuples_.insert(std::move(t));
}

std::optional<Domain> unify(Domain a, Domain b) {
  if (a == b) return a;
  if (a == Domain::Any) return b;
  if (b == Domain::Any) return a;
  if (is_numeric(a) && is_numeric(b)) return Domain::Float;
  return std::nullopt;
}

Relation conform(const Relation& rel, const Schema& target) {
  const Schema& src = rel.schema();
  if (src.arity() != target.arity())
    fail(ErrorCode::SchemaMismatch, "schema " + src.to_string() + " does not match " + target.to_string());
  std::vector<std::size_t> map(target.arity());
  bool identity = true;
  for (std::size_t i = 0; i < target.arity(); ++i) {
    auto j = src.index_of(target[i].name);
    if (!j) fail(ErrorCode::SchemaMismatch, "schema " + src.to_string() + " does not match " + target.to_string());
    map[i] = *j;
    if (*j != i || src[*j].domain != target[i].domain) identity = false;
  }
  if (identity) return rel;
  Relation out(target);
  for (const auto& t : rel.tuples()) {
    Tuple nt(target.arity());
    for (std::size_t i = 0; i < target.arity(); ++i) {
      auto c = coerce(t[map[i]], target[i].domain);
      if (!c)
        fail(ErrorCode::SchemaMismatch, "attribute " + target[i].name + ": cannot convert " +
                                            t[map[i]].to_literal() + " to " +
                                            std::string(to_string(target[i].domain)));
      nt[i] = std::move(*c);
    }
    out.insert_unchecked(std::move(nt));
  }
  return out;
}

} // namespace rxo
