#pragma once

#include <vector>

#include "ppw/ast.hpp"

namespace ppw {

/// Static checks over a parsed document. Returns errors and warnings;
/// an empty list means the program is well formed.
std::vector<Diagnostic> validate(const Program& program);

bool has_errors(const std::vector<Diagnostic>& diags);

}  // namespace ppw
