#pragma once
// Independent reference implementations used to check the library.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "erasure3d/percolation.hpp"

namespace oracle {

/// Maximum number of bond-disjoint left-to-right crossings of rows
/// [r0, r0 + h) of a section lattice, by exhaustive enumeration of minimal
/// crossings (start on the left boundary, never return to it, stop on first
/// reaching the right boundary) and an exact set-packing search.
/// Supports at most 64 bonds inside the rectangle.
inline int brute_force_crossings(const erasure3d::SectionLattice& lat, int r0, int h) {
  const int A = lat.along();
  // Vertex (a, b) -> list of (neighbour vertex, bond bit).
  using V = std::pair<int, int>;
  std::map<V, std::vector<std::pair<V, int>>> adj;
  int bit = 0;
  for (int i = 0; i < A; ++i)
    for (int j = r0; j < r0 + h; ++j, ++bit) {
      if (!lat.open(i, j)) continue;
      V u, v;
      if ((i + j) % 2 == 0) {
        u = {i, j};
        v = {i + 1, j + 1};
      } else {
        u = {i + 1, j};
        v = {i, j + 1};
      }
      adj[u].push_back({v, bit});
      adj[v].push_back({u, bit});
    }
  std::vector<std::uint64_t> paths;
  std::map<V, bool> on_path;
  std::function<void(V, std::uint64_t)> dfs = [&](V at, std::uint64_t mask) {
    if (at.first == A) {
      paths.push_back(mask);
      return;
    }
    for (const auto& [next, b] : adj[at]) {
      if (next.first == 0 || on_path[next]) continue;
      on_path[next] = true;
      dfs(next, mask | (std::uint64_t{1} << b));
      on_path[next] = false;
    }
  };
  for (auto& [v, nb] : adj) {
    if (v.first != 0) continue;
    on_path[v] = true;
    dfs(v, 0);
    on_path[v] = false;
  }
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  // Drop non-minimal duplicates: a path containing another path's bonds is
  // never needed in a maximum packing.
  std::vector<std::uint64_t> minimal;
  for (auto p : paths) {
    bool dominated = false;
    for (auto q : paths)
      if (q != p && (q & p) == q) {
        dominated = true;
        break;
      }
    if (!dominated) minimal.push_back(p);
  }
  int best = 0;
  std::function<void(std::size_t, std::uint64_t, int)> pack = [&](std::size_t from,
                                                                   std::uint64_t used, int count) {
    best = std::max(best, count);
    // Every crossing uses a bond of the first column.
    std::uint64_t col0 = 0;
    for (int j = 0; j < h; ++j) col0 |= std::uint64_t{1} << j;
    const int remaining = std::popcount(col0 & ~used);
    if (count + remaining <= best) return;
    for (std::size_t k = from; k < minimal.size(); ++k)
      if ((minimal[k] & used) == 0) pack(k + 1, used | minimal[k], count + 1);
  };
  pack(0, 0, 0);
  return best;
}

/// Greatest root of x^3 + 23x^2 + 29x - 1 by bisection on [0, 1].
inline double bisect_cubic_root() {
  auto f = [](double x) { return ((x + 23.0) * x + 29.0) * x - 1.0; };
  double lo = 0.0, hi = 1.0;  // f(0) < 0 < f(1); the other roots are negative
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// zeta(3) to double precision (Apery's constant).
inline constexpr double kZeta3 = 1.2020569031595942;

/// sum_{i>=1} f(i) for f(i) = a / i^s, s > 1: partial sum to N plus
/// midpoint-style integral tail.
inline double power_sum(double s, int N = 200000) {
  double sum = 0.0;
  for (int i = N; i >= 1; --i) sum += std::pow(static_cast<double>(i), -s);
  return sum + std::pow(N + 0.5, 1.0 - s) / (s - 1.0);
}

}  // namespace oracle
