#pragma once

#include <filesystem>
#include <map>
#include <random>
#include <utility>

#include "hiw/cache.hpp"
#include "hiw/forms.hpp"

#ifndef HIW_TEST_CACHE
#define HIW_TEST_CACHE "test-cache"
#endif

namespace hiw::testing {

/// Default-truncation forms document, built once per process and cached on disk across test binaries.
inline const FormsDocument& shipped(int k, int N, int character = 0) {
  static std::map<std::tuple<int, int, int>, FormsDocument> memo;
  const auto key = std::make_tuple(k, N, character);
  auto it = memo.find(key);
  if (it == memo.end())
    it = memo.emplace(key, load_or_build_forms(make_space_params(k, N, character), {}, HIW_TEST_CACHE)).first;
  return it->second;
}

struct Gamma0Element {
  std::int64_t a, b, c, d;
};

/// Random element of Gamma_0(level) with c > 0.
inline Gamma0Element random_gamma0(std::mt19937_64& rng, std::int64_t level, int c_mult_max = 3, int d_max = 40) {
  std::uniform_int_distribution<int> cm(1, c_mult_max), dd(-d_max, d_max);
  for (;;) {
    const std::int64_t c = level * cm(rng), d = dd(rng);
    if (d == 0 || gcd64(d, c) != 1) continue;
    const std::int64_t a = mod_inverse(d, c);  // a d = 1 (mod c)
    const std::int64_t b = (a * d - 1) / c;
    return {a, b, c, d};
  }
}

/// A point whose image under gamma stays well inside the upper half-plane.
inline cplx good_point(const Gamma0Element& g, double shift = 0.15) {
  return cplx((-static_cast<double>(g.d) + shift) / g.c, 0.9 / g.c);
}

inline cplx apply(const Gamma0Element& g, cplx z) {
  return (static_cast<double>(g.a) * z + static_cast<double>(g.b)) / (static_cast<double>(g.c) * z + static_cast<double>(g.d));
}

}  // namespace hiw::testing
