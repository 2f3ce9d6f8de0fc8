#include "ppw/distribution.hpp"

#include <cmath>
#include <numbers>

#include "ppw/error.hpp"

namespace ppw {

void check(const GroundDistribution& d) {
  using F = Distribution::Family;
  switch (d.family) {
    case F::Gaussian:
      if (!(d.b > 0.0) || !std::isfinite(d.a) || !std::isfinite(d.b)) {
        throw Error(ErrorKind::Model, "gaussian variance must be positive, got " + format_real(d.b));
      }
      return;
    case F::Poisson:
      if (!(d.a > 0.0) || !std::isfinite(d.a)) {
        throw Error(ErrorKind::Model, "poisson rate must be positive, got " + format_real(d.a));
      }
      return;
    case F::Uniform:
      if (!(d.a < d.b)) throw Error(ErrorKind::Model, "uniform bounds must satisfy lo < hi");
      return;
    case F::Discrete: {
      if (d.values.empty()) throw Error(ErrorKind::Model, "discrete distribution with no outcomes");
      double total = 0.0;
      for (double w : d.weights) {
        if (!(w >= 0.0)) throw Error(ErrorKind::Model, "discrete weight must be non-negative");
        total += w;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorKind::Model, "discrete weights sum to " + format_real(total));
      }
      return;
    }
    case F::Delta:
      return;
  }
}

double gaussian_pdf(double x, double mean, double variance) {
  double z = x - mean;
  return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double density(const GroundDistribution& d, const Term& value) {
  using F = Distribution::Family;
  switch (d.family) {
    case F::Gaussian:
      if (!value.is_number()) return 0.0;
      return gaussian_pdf(value.number(), d.a, d.b);
    case F::Poisson: {
      if (!value.is_number()) return 0.0;
      double k = value.number();
      if (k < 0.0 || k != std::floor(k)) return 0.0;
      return std::exp(k * std::log(d.a) - d.a - std::lgamma(k + 1.0));
    }
    case F::Uniform: {
      if (!value.is_number()) return 0.0;
      double x = value.number();
      return (x >= d.a && x <= d.b) ? 1.0 / (d.b - d.a) : 0.0;
    }
    case F::Discrete: {
      double p = 0.0;
      for (std::size_t i = 0; i < d.values.size(); ++i) {
        if (same_value(d.values[i], value)) p += d.weights[i];
      }
      return p;
    }
    case F::Delta:
      return same_value(d.point, value) ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace ppw
