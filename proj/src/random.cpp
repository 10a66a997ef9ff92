#include "maxnorm/random.hpp"

#include <cmath>
#include <numbers>

namespace maxnorm {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

double Rng::laplace_unit() {
  // u in (-1/2, 1/2); x = -b * sgn(u) * ln(1 - 2|u|), b = 1/sqrt(2).
  double u = uniform() - 0.5;
  while (u == -0.5) u = uniform() - 0.5;
  const double b = std::numbers::sqrt2 / 2.0;
  const double mag = -b * std::log1p(-2.0 * std::abs(u));
  return u < 0 ? -mag : mag;
}

}  // namespace maxnorm
