#pragma once

// Brute-force reference computations used as independent oracles.  They
// deliberately avoid the library's enumeration helpers: everything here is
// plain nested loops over raw tables.

#include <functional>
#include <vector>

#include "s4sem/presheaf.hpp"

namespace oracle {

inline long long power(long long b, long long e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

/// Calls f with every function {0..n-1} → {0..m-1}.
inline void each_function(int n, int m, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> v(n, 0);
  if (n > 0 && m == 0) return;
  for (;;) {
    f(v);
    int k = n - 1;
    while (k >= 0 && v[k] == m - 1) v[k--] = 0;
    if (k < 0) return;
    ++v[k];
  }
}

/// Natural transformations P → Q counted by trying every tuple of component
/// functions.
inline long long count_natural(const s4sem::Presheaf& p, const s4sem::Presheaf& q) {
  const auto& c = *p.base;
  const int no = c.num_objects();
  long long count = 0;
  std::vector<std::vector<int>> comps(no);
  std::function<void(int)> rec = [&](int o) {
    if (o == no) {
      for (int f = 0; f < c.num_morphisms(); ++f)
        for (int x = 0; x < p.size(c.dst(f)); ++x)
          if (comps[c.src(f)][p.act(f, x)] != q.act(f, comps[c.dst(f)][x])) return;
      ++count;
      return;
    }
    each_function(p.size(o), q.size(o), [&](const std::vector<int>& fn) {
      comps[o] = fn;
      rec(o + 1);
    });
  };
  rec(0);
  return count;
}

/// Subsets of arrows into `target` closed under precomposition.
inline int count_sieves(const s4sem::FinCat& c, int target) {
  std::vector<int> into;
  for (int f = 0; f < c.num_morphisms(); ++f)
    if (c.dst(f) == target) into.push_back(f);
  int count = 0;
  for (int mask = 0; mask < (1 << into.size()); ++mask) {
    std::vector<bool> in(c.num_morphisms(), false);
    for (std::size_t k = 0; k < into.size(); ++k)
      if (mask >> k & 1) in[into[k]] = true;
    bool closed = true;
    for (int f : into)
      if (in[f])
        for (int g = 0; g < c.num_morphisms(); ++g)
          if (c.dst(g) == c.src(f) && !in[c.compose(f, g)]) closed = false;
    if (closed) ++count;
  }
  return count;
}

/// Presheaves on the walking arrow with |P(0)|, |P(1)| ≤ k: a choice of sizes
/// and a function P(1) → P(0).
inline long long count_presheaves_on_arrow(int k) {
  long long n = 0;
  for (int a = 0; a <= k; ++a)
    for (int b = 0; b <= k; ++b) n += power(a, b);
  return n;
}

}  // namespace oracle
