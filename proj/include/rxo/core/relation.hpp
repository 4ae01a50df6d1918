#pragma once

#include "rxo/core/value.hpp"

#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rxo {

struct Attribute {
  std::string name;
  Domain domain = Domain::Any;
  bool operator==(const Attribute&) const = default;
};

/// Ordered list of uniquely named attributes.
class Schema {
public:
  Schema() = default;
  Schema(std::initializer_list<Attribute> attrs);
  explicit Schema(std::vector<Attribute> attrs);

  std::size_t arity() const { return attrs_.size(); }
  const std::vector<Attribute>& attributes() const { return attrs_; }
  const Attribute& operator[](std::size_t i) const { return attrs_[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Like index_of but throws UnknownAttribute.
  std::size_t require(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }
  std::vector<std::string> names() const;

  void add(Attribute a);

  bool operator==(const Schema&) const = default;
  std::string to_string() const;

private:
  std::vector<Attribute> attrs_;
};

using Tuple = std::vector<Value>;

/// Duplicate-free set of tuples over a schema. Tuples are kept in the
/// total order of Value, which makes iteration deterministic.
class Relation {
public:
  Relation() = default;
  explicit Relation(Schema schema) : schema_(std::move(schema)) {}
  Relation(Schema schema, std::initializer_list<Tuple> tuples);

  const Schema& schema() const { return schema_; }
  const std::set<Tuple>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }

  /// Inserts after checking arity and domains; INTEGER widens into FLOAT columns.
  void insert(Tuple t);
  /// Inserts without domain checks; the caller guarantees conformance.
  void insert_unchecked(Tuple t) { tuples_.insert(std::move(t)); }
  bool contains(const Tuple& t) const { return tuples_.count(t) > 0; }

  bool operator==(const Relation&) const = default;

private:
  Schema schema_;
  std::set<Tuple> tuples_;
};

/// Domain unification for union-compatible columns. Returns nullopt when incompatible.
std::optional<Domain> unify(Domain a, Domain b);

/// Reorders and coerces `rel` into `target` (matched by attribute name).
/// Throws SchemaMismatch when names differ or domains cannot be converted.
Relation conform(const Relation& rel, const Schema& target);

} // namespace rxo
