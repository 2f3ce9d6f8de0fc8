#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "ppw/ast.hpp"
#include "ppw/rng.hpp"
#include "ppw/world.hpp"

namespace ppw {

struct QueryResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  double effective_sample_size = 0.0;
};

struct QueryOptions {
  std::size_t samples = 10000;
  int horizon = 0;
  Seed seed;
  unsigned threads = 1;
  std::vector<Symbol> domain;  // range of quantifiers in the query
};

/// Likelihood-weighted estimate of P(query at time horizon | evidence).
/// Throws Error(ImpossibleEvidence) when every weight is zero.
QueryResult estimate_query(std::shared_ptr<const Model> model, const Formula& query, const Evidence& evidence,
                           const QueryOptions& options);
QueryResult estimate_query(const Program& program, const Formula& query, const Evidence& evidence,
                           QueryOptions options);

/// Exact probability by enumerating every joint outcome of the program's
/// random choices. Throws Error(Enumeration) for continuous or Poisson
/// distributions and when a single world needs more than `max_choices`.
double exact_query(std::shared_ptr<const Model> model, const Formula& query, const Evidence& evidence, int horizon = 0,
                   const std::vector<Symbol>& domain = {}, std::size_t max_choices = 24);
double exact_query(const Program& program, const Formula& query, const Evidence& evidence, int horizon = 0);

}  // namespace ppw
