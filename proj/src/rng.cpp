#include "isac/rng.hpp"

#include <algorithm>
#include <numbers>

namespace isac {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(seed + stream * 0x9e3779b97f4a7c15ULL)) {}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  do {
    u = uniform();
  } while (u <= 0.0);
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  spare_ = r * std::sin(2.0 * std::numbers::pi * v);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * v);
}

Index Rng::categorical(std::span<const double> cdf) {
  const double u = uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto idx = static_cast<Index>(it - cdf.begin());
  return std::min<Index>(idx, static_cast<Index>(cdf.size()) - 1);
}

Pmf Rng::simplex(Index n) {
  Pmf p(n);
  for (Index i = 0; i < n; ++i) p[i] = exponential();
  return p / p.sum();
}

}  // namespace isac
