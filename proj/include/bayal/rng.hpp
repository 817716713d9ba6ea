#ifndef BAYAL_RNG_HPP_
#define BAYAL_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "bayal/types.hpp"

namespace bayal {

namespace detail {

// splitmix64 finalizer; used to decorrelate nearby seeds and to derive
// independent named streams from one run seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Stream tags for deriving independent sub-seeds from one run seed.
/// Keeping these fixed makes warm starts and prior pools identical across
/// methods that share a seed.
enum class Stream : std::uint64_t {
  kPool = 1,
  kWarmStart = 2,
  kPrior = 3,
  kMap = 4,
  kReplication = 5,
};

inline Seed derive_seed(Seed seed, Stream stream) {
  return detail::splitmix64(seed ^ detail::splitmix64(static_cast<Seed>(stream)));
}

inline Seed derive_seed(Seed seed, Seed salt) {
  return detail::splitmix64(seed ^ detail::splitmix64(salt));
}

/// Seeded random source. All samplers are written out explicitly (rather
/// than using std::*_distribution) so that a given seed reproduces the same
/// stream on every platform; mt19937_64 output is standard-specified.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(detail::splitmix64(seed)) {}

  /// Uniform on the open interval (0,1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (cosine branch).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Exponential with the given mean.
  double exponential(double mean) { return -mean * std::log(uniform01()); }

  /// Gamma(shape, 1) via Marsaglia-Tsang squeeze.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::domain_error("gamma: shape must be positive");
    if (shape < 1.0) {
      const double u = uniform01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Dirichlet draw via normalized gammas.
  VectorXd dirichlet(const VectorXd& alpha) {
    VectorXd g(alpha.size());
    for (Index j = 0; j < alpha.size(); ++j) g[j] = gamma(alpha[j]);
    const double s = g.sum();
    if (!(s > 0.0)) throw std::runtime_error("dirichlet: degenerate draw");
    return g / s;
  }

  /// k distinct indices drawn uniformly from {0,...,n-1} (partial
  /// Fisher-Yates); returned in draw order.
  std::vector<Index> sample_without_replacement(Index n, Index k) {
    if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) {
      const Index j = i + static_cast<Index>(uniform01() * static_cast<double>(n - i));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
      out.push_back(idx[static_cast<std::size_t>(i)]);
    }
    return out;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bayal

#endif  // BAYAL_RNG_HPP_
