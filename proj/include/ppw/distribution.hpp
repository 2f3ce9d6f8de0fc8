#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ppw/ast.hpp"
#include "ppw/rng.hpp"

namespace ppw {

/// A distribution whose parameters have been evaluated.
struct GroundDistribution {
  Distribution::Family family = Distribution::Family::Delta;
  double a = 0.0;  // gaussian mean, poisson rate, uniform lo
  double b = 0.0;  // gaussian variance, uniform hi
  Term point;      // delta value
  std::vector<Term> values;      // discrete support
  std::vector<double> weights;   // discrete weights, parallel to values

  bool is_continuous() const {
    return family == Distribution::Family::Gaussian || family == Distribution::Family::Uniform;
  }
  bool has_finite_support() const {
    return family == Distribution::Family::Discrete || family == Distribution::Family::Delta;
  }
};

/// Checks parameter constraints (positive variance and rate, lo < hi,
/// non-negative discrete weights summing to one). Throws Error(Model).
void check(const GroundDistribution& d);

template <typename Gen>
Term sample(const GroundDistribution& d, Gen& rng) {
  using F = Distribution::Family;
  switch (d.family) {
    case F::Gaussian:
      return Term::real(std::normal_distribution<double>(d.a, std::sqrt(d.b))(rng));
    case F::Poisson:
      return Term::integer(std::poisson_distribution<std::int64_t>(d.a)(rng));
    case F::Uniform:
      return Term::real(std::uniform_real_distribution<double>(d.a, d.b)(rng));
    case F::Discrete: {
      double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < d.values.size(); ++i) {
        acc += d.weights[i];
        if (u < acc) return d.values[i];
      }
      for (std::size_t i = d.values.size(); i-- > 0;) {
        if (d.weights[i] > 0.0) return d.values[i];
      }
      return d.values.back();
    }
    case F::Delta:
      return d.point;
  }
  return d.point;
}

/// Density for continuous families, probability mass otherwise.
double density(const GroundDistribution& d, const Term& value);

double gaussian_pdf(double x, double mean, double variance);

}  // namespace ppw
