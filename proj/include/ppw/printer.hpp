#pragma once

#include <string>

#include "ppw/ast.hpp"

namespace ppw {

/// Surface syntax for a whole document; parse_program() of the output
/// yields a structurally equal Program.
std::string pretty_print(const Program& program);

std::string to_string(const Literal& lit);
std::string to_string(const Distribution& d);
std::string to_string(const Clause& c);
std::string to_string(const Formula& f);
std::string to_string(const ProgramExpr& p);

}  // namespace ppw
