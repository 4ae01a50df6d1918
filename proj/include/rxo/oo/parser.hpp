#pragma once

#include "rxo/oo/ast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rxo::oo {

struct ParsedCommand {
  Command command;
  int line = 1;       // where the command starts
  std::string source; // the command's source text
};

/// Parses a script of `;`-terminated commands. Throws SyntaxError or
/// UnterminatedCommand with line and column.
std::vector<ParsedCommand> parse_script(std::string_view text);

/// Parses exactly one command.
Command parse_command(std::string_view text);

Path parse_path(std::string_view text);
ExprPtr parse_expression(std::string_view text);

} // namespace rxo::oo
