#pragma once

#include "rxo/core/algebra.hpp"
#include "rxo/oo/ast.hpp"

#include <map>
#include <string>
#include <vector>

namespace rxo::oo {

/// One member of a class specification.
struct MemberSpec {
  std::string name;
  ComponentKind kind = ComponentKind::Scalar;
  std::string type;                           // Scalar: domain or class name
  std::vector<TypedName> attributes;          // Complex
  std::vector<std::vector<std::string>> keys; // Complex
  std::vector<TypedName> params;              // Method
  std::string declared_in;                    // root class of the member

  bool same_declaration(const MemberSpec& other) const;
};

struct ClassDef {
  std::string name;
  std::vector<std::string> parents;
  std::vector<MemberSpec> own;
  std::vector<std::vector<std::string>> keys;
  std::vector<RefConstraint> references;
};

struct Implementation {
  std::string owner;
  std::string member;
  ImplBody body;
  std::vector<TypedName> params; // methods only

  bool stored() const { return std::holds_alternative<StoredBody>(body); }
};

enum class StepKind { ClassHead, Scalar, Reference, Complex, ComplexAttribute, ComplexReference };

struct ResolvedStep {
  std::string name;
  StepKind kind = StepKind::ClassHead;
  std::string owner; // class whose specification holds the member (the head class for ClassHead)
  std::string type;  // domain name, or class name for heads and references
};

struct ResolvedPath {
  Path path;
  std::vector<ResolvedStep> steps; // steps[0] describes the head

  const ResolvedStep& last() const { return steps.back(); }
  /// Scalar-domain value that cannot be continued.
  bool terminal() const;
  /// Scalar-valued (plain scalars and references).
  bool scalar_valued() const;
  /// Class of the objects named by a non-terminal path ending at a class or reference.
  std::string object_class() const;
};

/// Name environment for path resolution.
struct ResolveScope {
  std::string class_context; // bare member names resolve as this.member
  std::map<std::string, ResolvedPath> aliases;
  std::map<std::string, std::string> variables; // locals and parameters: name -> type
};

/// Name path plus the scalar post-paths read through it.
struct OViewSignature {
  ResolvedPath name_path;
  std::vector<std::string> attribute_post_paths;
};

std::string real_relvar(const std::string& cls);
std::string real_relvar(const std::string& cls, const std::string& component);
std::string class_relvar(const std::string& cls);
std::string class_relvar(const std::string& cls, const std::string& component);
/// Per-member binding relvar of the declaring class (complex bindings are the class relation itself).
std::string binding_relvar(const std::string& root, const std::string& member);
std::string method_transaction(const std::string& root, const std::string& method);
std::string implementation_transaction(const std::string& owner, const std::string& method);

/// Persistent symbol table: classes, inheritance, implementations.
class Catalog {
public:
  const ClassDef& define_class(const ClassCreate& ast);
  /// Records (or replaces) the implementation of `member` in `cls`.
  const Implementation& register_implementation(const std::string& cls, const std::string& member, ImplBody body,
                                                std::optional<std::vector<TypedName>> params = std::nullopt);

  bool has_class(const std::string& name) const { return classes_.count(name) > 0; }
  const ClassDef& class_def(const std::string& name) const;
  /// Class names in definition order.
  const std::vector<std::string>& class_names() const { return order_; }

  /// Ancestors without `cls`, nearest parents first, each listed once.
  std::vector<std::string> ancestors(const std::string& cls) const;
  /// Strict descendants in definition order.
  std::vector<std::string> descendants(const std::string& cls) const;
  bool is_ancestor_or_self(const std::string& anc, const std::string& cls) const;

  /// Own members plus everything inherited, parents first.
  std::vector<MemberSpec> effective_members(const std::string& cls) const;
  std::optional<MemberSpec> find_member(const std::string& cls, const std::string& name) const;

  const Implementation* implementation(const std::string& owner, const std::string& member) const;
  /// Implementations of a member across the declaring class and its descendants, root first.
  std::vector<const Implementation*> implementations_of(const std::string& root, const std::string& member) const;
  /// The implementation bound to objects created as `cls`; null when none.
  /// Throws AmbiguousImplementation when two unrelated ancestors both implement it.
  const Implementation* effective_implementation(const std::string& cls, const std::string& member) const;
  /// True when NEW may create objects of `cls`; otherwise `missing` names the first gap.
  bool fully_implemented(const std::string& cls, std::string* missing = nullptr) const;

  /// OID set of the objects bound to `impl`.
  AlgebraPtr scope_of(const Implementation& impl) const;

  ResolvedPath resolve_path(const Path& path, const ResolveScope& scope) const;
  /// Resolves `segments` as a continuation of `base`.
  ResolvedPath resolve_continuation(const ResolvedPath& base, const std::vector<Segment>& segments) const;

  std::string serialize() const;
  static Catalog deserialize(const std::string& payload);

private:
  void resolve_segments(ResolvedPath& rp, const std::vector<Segment>& segments, const ResolveScope& scope) const;
  ResolvedStep member_step(const std::string& cls, const std::string& name) const;
  void check_selection(const Selection& sel, const ResolvedPath& base, const ResolveScope& scope) const;
  void check_condition(const Expr& e, const ResolvedPath& base, const ResolveScope& scope) const;

  std::map<std::string, ClassDef> classes_;
  std::vector<std::string> order_;
  std::map<std::pair<std::string, std::string>, Implementation> impls_;
  std::vector<std::string> history_; // canonical source of every accepted definition
};

} // namespace rxo::oo
