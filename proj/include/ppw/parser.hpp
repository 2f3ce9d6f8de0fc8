#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "ppw/ast.hpp"

namespace ppw {

/// Either a value or the diagnostics explaining why there is none.
template <typename T>
using Parsed = std::variant<T, std::vector<Diagnostic>>;

template <typename T>
bool ok(const Parsed<T>& p) {
  return p.index() == 0;
}

/// Parses a `.dcl` document. Sections are introduced by `#clauses`
/// (the default), `#actions` and `#control`.
Parsed<Program> parse_program(std::string_view text);

/// Parses a standalone formula, e.g. a query given on the command line.
Parsed<Formula> parse_formula(std::string_view text);

Parsed<Term> parse_term(std::string_view text);

}  // namespace ppw
