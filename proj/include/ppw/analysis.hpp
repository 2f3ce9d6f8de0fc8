#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "ppw/ast.hpp"

namespace ppw {

/// Shape of the last argument of a time-indexed atom.
struct TimeArg {
  enum class Kind { Absent, Var, Const, Other };

  Kind kind = Kind::Absent;
  Symbol var;               // Var: the time variable
  std::int64_t offset = 0;  // Var: V + offset; Const: the literal time
};

TimeArg time_arg(const Term& atom);

struct Stratum {
  std::vector<std::size_t> clauses;  // indices into the clause list, source order
  bool recursive = false;            // needs iteration to a fixpoint
};

/// Static facts about a clause list: which predicates are time-indexed and
/// the evaluation order within a time layer.
struct ProgramAnalysis {
  std::set<PredKey> dynamic;
  std::vector<Stratum> static_strata;
  std::vector<Stratum> dynamic_strata;
  std::vector<Diagnostic> diagnostics;

  bool is_dynamic(const PredKey& k) const { return dynamic.count(k) != 0; }
};

/// A predicate is time-indexed when it is poss/2 or reward/2, when one of
/// its clauses advances time (`p(..., T+1) <- q(..., T)`), or when it
/// shares a time variable with a time-indexed atom. Time is always the
/// final argument.
ProgramAnalysis analyze(const std::vector<Clause>& clauses);

/// Every callable term that names a predicate or random variable inside a
/// clause: head, body atoms, and the inner terms of `~=(...)`.
struct Occurrence {
  const Term* atom = nullptr;
  bool in_head = false;
  bool negated = false;
  bool evaluated = false;  // inside ~=(...)
};

std::vector<Occurrence> occurrences(const Clause& c);

}  // namespace ppw
