#include "ssbayes/rng.hpp"

#include <cmath>

#include "ssbayes/errors.hpp"

namespace ssbayes {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngState::RngState(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t RngState::next_u64() { return engine_(); }

double RngState::uniform() {
  // 53 random bits into [1/2^53, 1 - 1/2^53]; avoids exact 0 for log().
  const std::uint64_t bits = engine_() >> 11;
  double u = (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  return u;
}

double RngState::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double v1, v2, s;
  do {
    v1 = 2.0 * uniform() - 1.0;
    v2 = 2.0 * uniform() - 1.0;
    s = v1 * v1 + v2 * v2;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v2 * factor;
  has_cached_normal_ = true;
  return v1 * factor;
}

double RngState::gamma(double shape) {
  if (!(shape > 0.0)) {
    throw InvalidParameter("gamma shape must be > 0");
  }
  if (shape < 1.0) {
    // Boost: G(a) = G(a+1) * U^(1/a). Underflows to 0 for tiny shapes,
    // which is the correct limit.
    const double g = gamma(shape + 1.0);
    const double u = uniform();
    return g * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngState::chi_square(double dof) {
  if (!(dof > 0.0)) {
    throw InvalidParameter("chi-square dof must be > 0");
  }
  return 2.0 * gamma(0.5 * dof);
}

RngState RngState::substream(std::uint64_t index) const {
  return RngState(splitmix64(seed_ + index));
}

}  // namespace ssbayes
