#pragma once

#include "rxo/oo/ast.hpp"

#include <string>

namespace rxo::oo {

// Canonical source text; parsing it yields an identical tree.
std::string to_source(const Path& p);
std::string to_source(const Expr& e);
std::string to_source(const Stmt& s);
std::string to_source(const Select& s);
std::string to_source(const Command& c);

} // namespace rxo::oo
