#pragma once

#include "rxo/prs/commands.hpp"
#include "rxo/prs/lexer.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rxo::prs {

// Canonical text. Every printed form parses back to an identical tree.
std::string to_text(const AlgebraExpr& e);
std::string to_text(const Schema& s);
std::string to_text(const Command& c);
std::string to_text(const RelVarDef& def);
std::string to_text(const TransactionDef& def);

ScalarPtr parse_scalar(std::string_view text);
AlgebraPtr parse_algebra(std::string_view text);
/// Parses `;`-terminated commands. A missing final `;` raises UnterminatedCommand.
std::vector<Command> parse_commands(std::string_view text);

// Cursor-level entry points for embedding in other parsers.
ScalarPtr parse_scalar(TokenCursor& cur);
AlgebraPtr parse_algebra(TokenCursor& cur);
Command parse_command(TokenCursor& cur);
Schema parse_schema(TokenCursor& cur);

} // namespace rxo::prs
