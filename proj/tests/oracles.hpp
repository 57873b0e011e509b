#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written with different algorithms and data
// structures than the code under test: plain subset scans, fixpoint loops,
// dense sampling, big-integer determinants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "vorpoly/core.hpp"
#include "vorpoly/delaunay.hpp"

namespace oracles {

using vorpoly::Box2;
using vorpoly::IVec2;
using vorpoly::Vec2;

// ---------------------------------------------------------------- poisson pmf

inline double poisson_pmf(int k, double mean) {
  double p = std::exp(-mean);
  for (int i = 1; i <= k; ++i) p *= mean / i;
  return p;
}

// P(N >= k) by direct summation of the pmf from k upward
inline double poisson_tail_geq(int k, double mean) {
  double total = 0, term = poisson_pmf(k, mean);
  for (int i = k;; ++i) {
    total += term;
    if (term < 1e-30 * (total + 1e-300) && i > mean + 10) break;
    term *= mean / (i + 1);
    if (i > k + 4000) break;
  }
  return total;
}

// ------------------------------------------------- lattice animals, two ways

// connectivity by repeated relaxation (no explicit stack/queue)
inline bool connected_fixpoint(const std::vector<IVec2>& cells) {
  if (cells.empty()) return false;
  std::vector<int> label((int)cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) label[i] = (int)i;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < cells.size(); ++i)
      for (std::size_t j = 0; j < cells.size(); ++j) {
        int d = std::abs(cells[i][0] - cells[j][0]) + std::abs(cells[i][1] - cells[j][1]);
        if (d == 1 && label[i] != label[j]) {
          int m = std::min(label[i], label[j]);
          label[i] = label[j] = m;
          changed = true;
        }
      }
  }
  for (int l : label)
    if (l != label[0]) return false;
  return true;
}

// all size-s connected sets containing the origin, by scanning subsets of the
// [-r, r]^2 disc (slow; fine for s <= 4)
inline std::uint64_t animals_containing_origin_subsets(int s) {
  int r = s - 1;
  std::vector<IVec2> universe;
  for (int x = -r; x <= r; ++x)
    for (int y = -r; y <= r; ++y)
      if (std::abs(x) + std::abs(y) <= r) universe.push_back(IVec2{x, y});
  // origin must be member; choose s-1 from the rest
  std::vector<IVec2> rest;
  for (const IVec2& z : universe)
    if (!(z[0] == 0 && z[1] == 0)) rest.push_back(z);
  std::uint64_t count = 0;
  int m = (int)rest.size();
  std::vector<int> idx(s - 1);
  std::function<void(int, int)> rec = [&](int start, int k) {
    if (k == s - 1) {
      std::vector<IVec2> cells{IVec2{0, 0}};
      for (int i = 0; i < s - 1; ++i) cells.push_back(rest[idx[i]]);
      if (connected_fixpoint(cells)) ++count;
      return;
    }
    for (int i = start; i < m; ++i) {
      idx[k] = i;
      rec(i + 1, k + 1);
    }
  };
  if (s == 1) return 1;
  rec(0, 0);
  return count;
}

// grow-and-deduplicate enumeration in canonical form (feasible to s = 8)
inline std::vector<std::uint64_t> animals_by_size_growth(int max_size) {
  std::vector<std::uint64_t> counts(max_size + 1, 0);
  std::set<std::vector<IVec2>> level;
  level.insert({IVec2{0, 0}});
  counts[1] = 1;
  for (int s = 2; s <= max_size; ++s) {
    std::set<std::vector<IVec2>> next;
    for (const auto& a : level) {
      for (const IVec2& z : a)
        for (const IVec2& d : {IVec2{1, 0}, IVec2{-1, 0}, IVec2{0, 1}, IVec2{0, -1}}) {
          IVec2 w{z[0] + d[0], z[1] + d[1]};
          if (std::find(a.begin(), a.end(), w) != a.end()) continue;
          std::vector<IVec2> b = a;
          b.push_back(w);
          std::sort(b.begin(), b.end(), [](const IVec2& p, const IVec2& q) {
            return p[0] != q[0] ? p[0] < q[0] : p[1] < q[1];
          });
          next.insert(std::move(b));
        }
    }
    counts[s] = next.size();
    level.swap(next);
  }
  return counts;
}

// ------------------------------------------------------- geometry references

// brute-force nearest generator
inline int nearest_scan(const std::vector<Vec2>& pts, const Vec2& x) {
  int best = -1;
  double bd = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = (pts[i][0] - x[0]) * (pts[i][0] - x[0]) + (pts[i][1] - x[1]) * (pts[i][1] - x[1]);
    bool better = best < 0 || d < bd ||
                  (d == bd && (pts[i][0] < pts[best][0] ||
                               (pts[i][0] == pts[best][0] && pts[i][1] < pts[best][1])));
    if (better) {
      best = (int)i;
      bd = d;
    }
  }
  return best;
}

// exact integer orientation for integer-valued coordinates
inline int orient2d_int(long ax, long ay, long bx, long by, long cx, long cy) {
  __int128 det = (__int128)(bx - ax) * (cy - ay) - (__int128)(by - ay) * (cx - ax);
  return det > 0 ? 1 : det < 0 ? -1 : 0;
}

// exact integer incircle for small integer coordinates (|coord| < 2^20)
inline int incircle_int(long ax, long ay, long bx, long by, long cx, long cy, long dx,
                        long dy) {
  __int128 adx = ax - dx, ady = ay - dy;
  __int128 bdx = bx - dx, bdy = by - dy;
  __int128 cdx = cx - dx, cdy = cy - dy;
  __int128 ad = adx * adx + ady * ady;
  __int128 bd = bdx * bdx + bdy * bdy;
  __int128 cd = cdx * cdx + cdy * cdy;
  __int128 det = adx * (bdy * cd - cdy * bd) - ady * (bdx * cd - cdx * bd) +
                 ad * (bdx * cdy - cdx * bdy);
  return det > 0 ? 1 : det < 0 ? -1 : 0;
}

// point strictly inside a convex polygon (all cross products positive)
inline bool strictly_inside_convex(const std::vector<Vec2>& poly, const Vec2& p,
                                   double eps = 1e-9) {
  std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    double cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    if (cr <= eps) return false;
  }
  return true;
}

// the sequence of nearest generators sampled densely along [x, y]
inline std::vector<int> segment_sequence_dense(const std::vector<Vec2>& pts, const Vec2& x,
                                               const Vec2& y, int steps) {
  std::vector<int> seq;
  for (int i = 0; i <= steps; ++i) {
    double t = (double)i / steps;
    Vec2 p{x[0] + t * (y[0] - x[0]), x[1] + t * (y[1] - x[1])};
    int v = nearest_scan(pts, p);
    if (seq.empty() || seq.back() != v) seq.push_back(v);
  }
  return seq;
}

inline bool is_subsequence(const std::vector<int>& sub, const std::vector<int>& seq) {
  std::size_t i = 0;
  for (int v : seq)
    if (i < sub.size() && sub[i] == v) ++i;
  return i == sub.size();
}

// ----------------------------------------------------- site-field flood fill

// closed clusters meeting any seed, by fixpoint relaxation over an explicit
// finite region (independent of the library's BFS)
template <class OpenFn>
std::set<std::vector<IVec2>> closed_clusters_fixpoint(OpenFn&& open,
                                                      const std::vector<IVec2>& seeds,
                                                      int radius) {
  std::map<IVec2, int> label;
  std::vector<IVec2> closed;
  for (int x = -radius; x <= radius; ++x)
    for (int y = -radius; y <= radius; ++y) {
      IVec2 z{x, y};
      if (!open(z)) {
        label[z] = (int)closed.size();
        closed.push_back(z);
      }
    }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const IVec2& z : closed)
      for (const IVec2& d : {IVec2{1, 0}, IVec2{-1, 0}, IVec2{0, 1}, IVec2{0, -1}}) {
        IVec2 w{z[0] + d[0], z[1] + d[1]};
        auto it = label.find(w);
        if (it == label.end()) continue;
        int a = label[z], b = it->second;
        if (a != b) {
          int m = std::min(a, b);
          for (auto& [k, l] : label)
            if (l == a || l == b) l = m;
          changed = true;
        }
      }
  }
  std::set<int> wanted;
  for (const IVec2& s : seeds) {
    auto it = label.find(s);
    if (it != label.end()) wanted.insert(it->second);
  }
  std::set<std::vector<IVec2>> out;
  for (int w : wanted) {
    std::vector<IVec2> cl;
    for (auto& [z, l] : label)
      if (l == w) cl.push_back(z);
    std::sort(cl.begin(), cl.end(), [](const IVec2& p, const IVec2& q) {
      return p[0] != q[0] ? p[0] < q[0] : p[1] < q[1];
    });
    out.insert(cl);
  }
  return out;
}

}  // namespace oracles
