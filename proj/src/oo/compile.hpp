#pragma once
// Path, expression and query compilation shared by the translator. Internal.

#include "rxo/oo/catalog.hpp"
#include "rxo/prs/database.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rxo::oo::detail {

/// Fresh names plus commands that must run before the compiled expression.
struct Emitter {
  std::vector<prs::Command> pre;
  int counter = 0;
  std::string fresh(const std::string& stem) { return "__" + stem + std::to_string(++counter); }
};

/// Something in a row that paths can continue from.
struct Anchor {
  enum class Kind { Object, ComplexRow, Plain };
  Kind kind = Kind::Object;
  std::string column;  // Object: column holding the OID
  std::string cls;     // Object: class of the objects; ComplexRow: root class of the component
  std::string complex; // ComplexRow: component name
  std::string prefix;  // prefix of derived column names
  std::map<std::string, std::string> types; // ComplexRow and Plain: attribute -> type
};

struct Variable {
  std::string column;
  std::string type;
};

/// Relation under construction with its column names.
struct Rows {
  AlgebraPtr rel;
  std::vector<std::string> columns;
  std::set<std::string> joined; // prefixes of complex components already joined
  bool has(const std::string& c) const;
  void add(const std::string& c) { columns.push_back(c); }
};

struct Scope {
  std::string cls;                  // class context
  std::optional<Anchor> self;       // `this`: an Object anchor on column OID
  std::map<std::string, Variable> variables;
  std::map<std::string, Anchor> aliases;
  std::vector<std::string> implicit; // aliases invented for unaliased FROM items
  std::optional<Anchor> selection;   // base of post-paths inside a selection
};

struct SelectResult {
  AlgebraPtr rel;                 // [OID when compiled in context] + one column per item
  std::vector<std::string> names; // item column names
  std::vector<bool> counts;       // item is a bare COUNT
};

Domain domain_of_type(const Catalog& cat, const std::string& type);

class Compiler {
public:
  using NewHook = std::function<std::string(const NewObject&)>; // returns the local holding new_oid

  Compiler(const Catalog& cat, const prs::Database& db, Emitter& em, NewHook on_new = {})
      : cat_(cat), db_(db), em_(em), on_new_(std::move(on_new)) {}

  /// Column holding the value of a scalar-valued path; extends `rows` as needed.
  std::string column(const Path& p, const Scope& s, Rows& rows);
  ScalarPtr scalar(const Expr& e, const Scope& s, Rows& rows);
  /// OID set named by a context-free group reference.
  AlgebraPtr group(const Path& p);
  /// Queries compiled in context keep the context's OID column and group by it.
  SelectResult select(const Select& q, const Scope* ctx, const Rows* ctx_rows);
  /// (OID, name) relation with the value of `e` for every row of `rows`.
  AlgebraPtr value(const Expr& e, const Scope& s, Rows rows, const std::string& name);
  /// Rows of `rel` (with an OID column) that satisfy every condition, seen as objects of `cls`.
  AlgebraPtr restrict_objects(AlgebraPtr rel, const std::string& cls, const Selection& sel);
  /// Rows of a complex component relation (columns prefix.attr) satisfying `sel`.
  AlgebraPtr restrict_rows(AlgebraPtr rel, const Anchor& row_anchor, std::vector<std::string> columns,
                           const Selection& sel);

  /// Output column name for a select item without AS.
  static std::string item_name(const Expr& e);

private:
  /// Anchor a path starts from plus the member names still to walk; sets `direct`
  /// instead when the head is a variable without continuation.
  Anchor base_of(const Path& p, const Scope& s, std::vector<std::string>& segs, std::string& direct) const;
  std::string walk(Anchor a, const std::vector<std::string>& segs, Rows& rows, std::string* last_type = nullptr);
  bool anchor_has(const Anchor& a, const std::string& name) const;
  Anchor complex_anchor(const std::string& root, const std::string& component, const std::string& prefix) const;
  void ensure_scalar(Rows& rows, const std::string& obj_col, const MemberSpec& spec, const std::string& col);
  void ensure_complex(Rows& rows, const std::string& obj_col, const MemberSpec& spec, const std::string& prefix,
                      bool outer = true);
  ScalarPtr scalar_impl(const Expr& e, const Scope& s, Rows& rows, std::vector<AggregateSpec>* aggs);
  void add_from(const FromItem& f, const std::string& alias, Scope& s, Rows& rows, bool& have);

  const Catalog& cat_;
  const prs::Database& db_;
  Emitter& em_;
  NewHook on_new_;
};

} // namespace rxo::oo::detail
