#pragma once

#include "rxo/core/scalar_expr.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rxo {

class AlgebraExpr;
using AlgebraPtr = std::shared_ptr<const AlgebraExpr>;

enum class SetOpKind { Union, Difference, Intersect };
enum class AggFunc { Sum, Count };

struct ProjectItem {
  ScalarPtr expr;
  std::string name;
};

struct AggregateSpec {
  AggFunc func = AggFunc::Count;
  ScalarPtr expr; // null means COUNT(*)
  std::string name;
};

namespace algebra {
struct RelvarRef {
  std::string name;
};
struct Literal {
  Relation value;
};
struct Product {
  AlgebraPtr lhs, rhs;
};
struct SetOp {
  SetOpKind kind;
  AlgebraPtr lhs, rhs;
};
/// Equi-join on (left attr, right attr) pairs. Right-side criteria attributes
/// are dropped from the output; every other name must be distinct.
struct Join {
  AlgebraPtr lhs, rhs;
  std::vector<std::pair<std::string, std::string>> on;
  bool left_outer = false;
};
struct Project {
  AlgebraPtr input;
  std::vector<ProjectItem> items;
};
struct Select {
  AlgebraPtr input;
  ScalarPtr condition;
};
struct Rename {
  AlgebraPtr input;
  std::vector<std::pair<std::string, std::string>> renames;
};
struct GroupAggregate {
  AlgebraPtr input;
  std::vector<std::string> group_by;
  std::vector<AggregateSpec> aggregates;
};
using Node = std::variant<RelvarRef, Literal, Product, SetOp, Join, Project, Select, Rename, GroupAggregate>;
} // namespace algebra

class AlgebraExpr {
public:
  explicit AlgebraExpr(algebra::Node node) : node_(std::move(node)) {}
  const algebra::Node& node() const { return node_; }

private:
  algebra::Node node_;
};

// Builders.
AlgebraPtr relvar(std::string name);
AlgebraPtr literal(Relation r);
AlgebraPtr product(AlgebraPtr l, AlgebraPtr r);
AlgebraPtr union_of(AlgebraPtr l, AlgebraPtr r);
AlgebraPtr difference(AlgebraPtr l, AlgebraPtr r);
AlgebraPtr intersect(AlgebraPtr l, AlgebraPtr r);
AlgebraPtr join(AlgebraPtr l, AlgebraPtr r, std::vector<std::pair<std::string, std::string>> on);
AlgebraPtr left_join(AlgebraPtr l, AlgebraPtr r, std::vector<std::pair<std::string, std::string>> on);
AlgebraPtr project(AlgebraPtr in, std::vector<ProjectItem> items);
/// Plain projection onto named attributes.
AlgebraPtr project(AlgebraPtr in, const std::vector<std::string>& names);
AlgebraPtr select(AlgebraPtr in, ScalarPtr cond);
AlgebraPtr rename(AlgebraPtr in, std::vector<std::pair<std::string, std::string>> renames);
AlgebraPtr group_aggregate(AlgebraPtr in, std::vector<std::string> group_by, std::vector<AggregateSpec> aggs);

/// Name resolution for relvar references during evaluation.
class RelationEnv {
public:
  virtual ~RelationEnv() = default;
  /// Throws UnknownRelvar when the name is unbound.
  virtual std::shared_ptr<const Relation> lookup(const std::string& name) const = 0;
  virtual Schema schema_of(const std::string& name) const = 0;
};

/// Environment over an explicit name-to-relation map.
class MapEnv : public RelationEnv {
public:
  MapEnv() = default;
  explicit MapEnv(std::map<std::string, Relation> rels);
  void bind(const std::string& name, Relation r);
  std::shared_ptr<const Relation> lookup(const std::string& name) const override;
  Schema schema_of(const std::string& name) const override;

private:
  std::map<std::string, std::shared_ptr<const Relation>> rels_;
};

Relation eval_algebra(const AlgebraExpr& e, const RelationEnv& env);

/// Output schema without evaluating tuples.
Schema infer_schema(const AlgebraExpr& e, const std::function<Schema(const std::string&)>& schema_of);

/// Standalone grouped aggregation (also used by eval_algebra).
Relation group_aggregate(const Relation& rel, const std::vector<std::string>& group_by,
                         const std::vector<AggregateSpec>& aggs);

std::set<std::string> referenced_relvars(const AlgebraExpr& e);

} // namespace rxo
