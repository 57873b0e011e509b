#pragma once

// Voronoi polyominoes: connected unions of Voronoi tiles. This module
// computes box-covering statistics (how many lattice boxes a polyomino of a
// given tile count must meet, and how many tiles are needed to cover a box
// animal), plus the self-avoiding tile walk along a straight segment.
// Tile sets are identified with their generator sets; connectivity is
// Delaunay adjacency, which almost surely coincides with shared-edge
// adjacency of the tiles.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "connected_enum.hpp"
#include "core.hpp"
#include "delaunay.hpp"
#include "lattice.hpp"
#include "voronoi.hpp"

namespace vorpoly {

namespace detail {
inline double circumradius(const Vec2& a, const Vec2& b, const Vec2& c) {
  double la = std::hypot(b[0] - c[0], b[1] - c[1]);
  double lb = std::hypot(a[0] - c[0], a[1] - c[1]);
  double lc = std::hypot(a[0] - b[0], a[1] - b[1]);
  double k = 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
  if (k == 0) return std::numeric_limits<double>::infinity();
  return la * lb * lc / (4.0 * k);
}

inline void merge_sorted(const std::vector<IVec2>& a, const std::vector<IVec2>& b,
                         std::vector<IVec2>& out) {
  out.clear();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j >= b.size() || (i < a.size() && lex_less<2>(a[i], b[j]))) {
      if (out.empty() || out.back() != a[i]) out.push_back(a[i]);
      ++i;
    } else {
      if (out.empty() || out.back() != b[j]) out.push_back(b[j]);
      if (i < a.size() && a[i] == b[j]) ++i;
      ++j;
    }
  }
}
}  // namespace detail

// Per-realization cache of cell polygons and the lattice boxes (side `side`)
// each cell meets. Statistics touching a window-boundary cell cannot be
// evaluated faithfully, so using one raises censored_error.
class CellBoxCache {
 public:
  CellBoxCache(const Triangulation& tr, double side) : tr_(&tr), side_(side) {
    have_.assign(tr.n_real(), 0);
    boxes_.resize(tr.n_real());
    touches_.assign(tr.n_real(), 0);
  }

  double side() const { return side_; }
  const Triangulation& triangulation() const { return *tr_; }

  const std::vector<IVec2>& boxes(int v) {
    ensure(v);
    if (touches_[v])
      throw censored_error("cell touches window boundary; statistic truncated");
    return boxes_[v];
  }

  bool cell_touches_boundary(int v) {
    ensure(v);
    return touches_[v];
  }

 private:
  const Triangulation* tr_;
  double side_;
  std::vector<char> have_;
  std::vector<std::vector<IVec2>> boxes_;
  std::vector<char> touches_;
  std::vector<int> scratch_;

  void ensure(int v) {
    if (have_[v]) return;
    VoronoiCell cell = voronoi_cell(*tr_, v, scratch_);
    touches_[v] = cell.touches_boundary ? 1 : 0;
    boxes_[v] = boxes_hit_by_cell(cell.poly, side_);
    have_[v] = 1;
  }
};

struct CoverStat {
  int value = 0;
  std::vector<int> witness;  // generator ids achieving it
};

namespace detail {
template <class Better, class Bound>
CoverStat extremal_boxes(CellBoxCache& cache, const std::vector<int>& roots, int r,
                         Better&& better, Bound&& may_improve) {
  const Triangulation& tr = cache.triangulation();
  CoverStat best;
  best.value = -1;
  std::vector<std::vector<IVec2>> unions;  // parallel to member depth
  std::vector<int> nb;
  for (int root : roots) {
    for_each_connected_superset<int, std::hash<int>>(
        root, r,
        [&](int v, std::vector<int>& out) { tr.neighbors(v, out); },
        [&](const std::vector<int>& members) {
          std::size_t k = members.size();
          unions.resize(k - 1);
          const std::vector<IVec2>& mine = cache.boxes(members.back());
          if (k == 1) {
            unions.push_back(mine);
          } else {
            std::vector<IVec2> merged;
            detail::merge_sorted(unions.back(), mine, merged);
            unions.push_back(std::move(merged));
          }
          int count = (int)unions.back().size();
          if ((int)k == r) {
            if (best.value < 0 || better(count, best.value)) {
              best.value = count;
              best.witness = members;
            }
            return false;
          }
          return best.value < 0 || may_improve(count, (int)k, best.value);
        });
    unions.clear();
  }
  std::sort(best.witness.begin(), best.witness.end());
  return best;
}
}  // namespace detail

// Minimum number of side-`side` boxes met by a connected set of exactly r
// tiles containing all-of/any-of `roots` (pass one root for the
// origin-containing family). Exhaustive with monotone pruning; r <= 8.
inline CoverStat min_boxes_over_polyominoes(CellBoxCache& cache, const std::vector<int>& roots,
                                            int r) {
  if (r > 8) throw precondition_error("min_boxes_over_polyominoes: r exceeds guard 8");
  return detail::extremal_boxes(
      cache, roots, r, [](int a, int b) { return a < b; },
      [](int count, int /*k*/, int best) { return count < best; });
}

// Maximum over the same family; max_boxes_per_cell must upper-bound the box
// count of every cell reachable within r-1 hops of a root (used to prune:
// a partial union of size k can gain at most (r-k) * that many boxes).
inline CoverStat max_boxes_over_polyominoes(CellBoxCache& cache, const std::vector<int>& roots,
                                            int r, int max_boxes_per_cell) {
  if (r > 8) throw precondition_error("max_boxes_over_polyominoes: r exceeds guard 8");
  return detail::extremal_boxes(
      cache, roots, r, [](int a, int b) { return a > b; },
      [r, max_boxes_per_cell](int count, int k, int best) {
        return count + (r - k) * max_boxes_per_cell > best;
      });
}

// Per-size minima in one sweep: entry[k] (1 <= k <= r_max) is the minimum
// box count over connected sets of exactly k tiles containing a root, or
// INT_MAX if none. Minima are non-decreasing in k (a set of k+1 tiles
// contains a connected k-subset through the root with a smaller union), so a
// branch whose union already exceeds entry[r_max] strictly can never improve
// any size and is pruned; every prefix of a future minimizer survives the
// strict test, keeping the profile exact.
inline std::vector<int> min_boxes_profile(CellBoxCache& cache, const std::vector<int>& roots,
                                          int r_max) {
  if (r_max > 8) throw precondition_error("min_boxes_profile: r exceeds guard 8");
  std::vector<int> best(r_max + 1, std::numeric_limits<int>::max());
  const Triangulation& tr = cache.triangulation();
  std::vector<std::vector<IVec2>> unions;
  for (int root : roots) {
    for_each_connected_superset<int, std::hash<int>>(
        root, r_max,
        [&](int v, std::vector<int>& out) { tr.neighbors(v, out); },
        [&](const std::vector<int>& members) {
          std::size_t k = members.size();
          unions.resize(k - 1);
          const std::vector<IVec2>& mine = cache.boxes(members.back());
          if (k == 1) {
            unions.push_back(mine);
          } else {
            std::vector<IVec2> merged;
            detail::merge_sorted(unions.back(), mine, merged);
            unions.push_back(std::move(merged));
          }
          int count = (int)unions.back().size();
          best[k] = std::min(best[k], count);
          if ((int)k == r_max) return false;
          return count <= best[r_max];
        });
    unions.clear();
  }
  return best;
}

// Per-size maxima in one sweep; max_boxes_per_cell bounds every reachable
// cell's own box count, so a branch of size k with union `count` can reach at
// most count + (k'-k) * max_boxes_per_cell boxes at size k' and is pruned
// when that fails to beat the current record at every remaining size.
inline std::vector<int> max_boxes_profile(CellBoxCache& cache, const std::vector<int>& roots,
                                          int r_max, int max_boxes_per_cell) {
  if (r_max > 8) throw precondition_error("max_boxes_profile: r exceeds guard 8");
  std::vector<int> best(r_max + 1, 0);
  const Triangulation& tr = cache.triangulation();
  std::vector<std::vector<IVec2>> unions;
  for (int root : roots) {
    for_each_connected_superset<int, std::hash<int>>(
        root, r_max,
        [&](int v, std::vector<int>& out) { tr.neighbors(v, out); },
        [&](const std::vector<int>& members) {
          std::size_t k = members.size();
          unions.resize(k - 1);
          const std::vector<IVec2>& mine = cache.boxes(members.back());
          if (k == 1) {
            unions.push_back(mine);
          } else {
            std::vector<IVec2> merged;
            detail::merge_sorted(unions.back(), mine, merged);
            unions.push_back(std::move(merged));
          }
          int count = (int)unions.back().size();
          best[k] = std::max(best[k], count);
          if ((int)k == r_max) return false;
          for (int kp = (int)k + 1; kp <= r_max; ++kp)
            if (count + (kp - (int)k) * max_boxes_per_cell > best[kp]) return true;
          return false;
        });
    unions.clear();
  }
  return best;
}

// Per-size minima of the box count over self-avoiding Delaunay paths through
// `root` (root anywhere on the path, not only an endpoint). A path through
// the root splits into two vertex-disjoint arms; the first arm is grown
// first and frozen once the second starts, so each path is enumerated once.
// Same strict monotone pruning as min_boxes_profile.
inline std::vector<int> min_boxes_saw_profile(CellBoxCache& cache, int root, int r_max) {
  if (r_max > 8) throw precondition_error("min_boxes_saw_profile: r exceeds guard 8");
  const Triangulation& tr = cache.triangulation();
  std::vector<int> best(r_max + 1, std::numeric_limits<int>::max());
  std::vector<std::vector<IVec2>> stack;
  std::vector<char> used(tr.n_real(), 0);
  stack.push_back(cache.boxes(root));
  used[root] = 1;
  best[1] = std::min(best[1], (int)stack.back().size());
  // arm1_first: generator id of the first cell on arm 1 (-1 while arm 1 is
  // empty); arm 2 may only start with a larger id, so each two-armed path is
  // enumerated under exactly one arm labeling.
  auto dfs = [&](auto&& self, int tip1, int tip2, bool arm1_frozen,
                 int arm1_first) -> void {
    if ((int)stack.size() >= r_max) return;
    std::vector<int> nb;
    auto grow = [&](int tip, bool freeze) {
      tr.neighbors(tip, nb);
      std::vector<int> order(nb);  // nb is reused across recursion; copy
      for (int u : order) {
        if (u < 0 || (std::size_t)u >= used.size() || used[u]) continue;
        if (freeze && tip == root && u < arm1_first) continue;
        std::vector<IVec2> merged;
        detail::merge_sorted(stack.back(), cache.boxes(u), merged);
        int count = (int)merged.size();
        if (count > best[r_max] && best[r_max] != std::numeric_limits<int>::max()) continue;
        used[u] = 1;
        stack.push_back(std::move(merged));
        best[stack.size()] = std::min(best[stack.size()], count);
        if (freeze)
          self(self, tip1, u, true, arm1_first);
        else
          self(self, u, tip2, false, arm1_first < 0 ? u : arm1_first);
        stack.pop_back();
        used[u] = 0;
      }
    };
    if (!arm1_frozen) grow(tip1, false);
    // second arm; skipped while the first is empty (tip1 == root) to avoid
    // enumerating the same single-arm path twice
    if (arm1_frozen || tip1 != root) grow(tip2, true);
  };
  dfs(dfs, root, root, false, -1);
  return best;
}

// largest per-cell box count among cells within `hops` Delaunay hops of the
// roots (safe pruning constant for max_boxes_over_polyominoes)
inline int max_boxes_per_cell_near(CellBoxCache& cache, const std::vector<int>& roots,
                                   int hops) {
  const Triangulation& tr = cache.triangulation();
  std::unordered_set<int> seen(roots.begin(), roots.end());
  std::vector<int> frontier(roots.begin(), roots.end()), next, nb;
  int best = 0;
  for (int v : frontier) best = std::max(best, (int)cache.boxes(v).size());
  for (int h = 0; h < hops; ++h) {
    next.clear();
    for (int v : frontier) {
      tr.neighbors(v, nb);
      for (int u : nb)
        if (seen.insert(u).second) {
          next.push_back(u);
          best = std::max(best, (int)cache.boxes(u).size());
        }
    }
    frontier = next;
  }
  return best;
}

// Generators whose cells could meet a region near the origin: every cell lies
// inside the union of circumdisks of its Delaunay triangles, so a cell can
// reach a region only if its generator is within its largest incident
// circumradius. Frame-incident (window border) cells are always candidates.
inline std::vector<int> candidate_cells_near(const Triangulation& tr, const Box2& region) {
  std::vector<double> maxrad(tr.n_real(), 0.0);
  std::vector<char> border(tr.n_real(), 0);
  for (std::size_t t = 0; t < tr.tri_slots(); ++t) {
    if (!tr.tri_alive((int)t)) continue;
    const Triangulation::Tri& T = tr.tri((int)t);
    bool frame = tr.is_frame(T.v[0]) || tr.is_frame(T.v[1]) || tr.is_frame(T.v[2]);
    if (frame) {
      for (int k = 0; k < 3; ++k)
        if (!tr.is_frame(T.v[k])) border[T.v[k]] = 1;
      continue;
    }
    double rr = detail::circumradius(tr.point(T.v[0]), tr.point(T.v[1]), tr.point(T.v[2]));
    for (int k = 0; k < 3; ++k)
      maxrad[T.v[k]] = std::max(maxrad[T.v[k]], rr);
  }
  std::vector<int> out;
  for (std::size_t v = 0; v < tr.n_real(); ++v) {
    double dist = region.dist(tr.point(v));
    if (border[v] || dist <= maxrad[v] + 1e-9) out.push_back((int)v);
  }
  return out;
}

// Generator set of the inverse cover P(A): all tiles meeting the half-open
// box union of the animal (side from the cache). Scans the circumradius-
// pruned candidate set, so no tile is missed.
inline std::vector<int> tiles_meeting_animal(CellBoxCache& cache, const Animal<2>& a) {
  const Triangulation& tr = cache.triangulation();
  double side = cache.side();
  Box2 region = lattice_box<2>(a[0], side);
  for (const IVec2& z : a) {
    Box2 b = lattice_box<2>(z, side);
    for (int i = 0; i < 2; ++i) {
      region.lo[i] = std::min(region.lo[i], b.lo[i]);
      region.hi[i] = std::max(region.hi[i], b.hi[i]);
    }
  }
  std::unordered_set<IVec2, ivec_hash> want(a.begin(), a.end());
  std::vector<int> out;
  for (int v : candidate_cells_near(tr, region)) {
    if (cache.cell_touches_boundary(v)) {
      // a boundary cell could still meet the region; if it can, the
      // realization is truncated
      std::vector<int> scratch;
      VoronoiCell cell = voronoi_cell(tr, v, scratch);
      for (const IVec2& z : boxes_hit_by_cell(cell.poly, side))
        if (want.count(z))
          throw censored_error("inverse cover reaches a window-boundary cell");
      continue;
    }
    for (const IVec2& z : cache.boxes(v))
      if (want.count(z)) {
        out.push_back(v);
        break;
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// connectivity validation for an inverse cover (true almost surely)
inline bool tiles_connected(const Triangulation& tr, const std::vector<int>& tiles) {
  if (tiles.empty()) return true;
  std::unordered_set<int> in(tiles.begin(), tiles.end());
  std::vector<int> stack{tiles[0]}, nb;
  std::unordered_set<int> seen{tiles[0]};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    tr.neighbors(v, nb);
    for (int u : nb)
      if (in.count(u) && seen.insert(u).second) stack.push_back(u);
  }
  return seen.size() == tiles.size();
}

// Self-avoiding walk of generators along the segment [x, y]: the sequence of
// tiles the segment crosses, consecutive tiles adjacent, each visited once
// (cells are convex). Exact vertex hits are resolved by deterministically
// nudging the segment sideways by 1e-9 (warning on clog); if that fails the
// replicate is censored.
inline std::vector<int> segment_path(const Triangulation& tr, Vec2 x, Vec2 y) {
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt > 0) {
      double nx = -(y[1] - x[1]), ny = y[0] - x[0];
      double nn = std::hypot(nx, ny);
      double off = 1e-9 * attempt * std::max(1.0, std::hypot(y[0] - x[0], y[1] - x[1])) / nn;
      x[0] += nx * off;
      x[1] += ny * off;
      y[0] += nx * off;
      y[1] += ny * off;
      std::clog << "vorpoly: segment_path nudged segment to avoid a vertex hit\n";
    }
    std::vector<int> path;
    int cur = tr.nearest(x);
    path.push_back(cur);
    double t = 0;
    std::vector<int> nb;
    bool degenerate = false;
    const Vec2 dxy{y[0] - x[0], y[1] - x[1]};
    int guard = 0;
    while (true) {
      if (++guard > (int)tr.n_real() + 8)
        throw std::logic_error("segment_path: walk did not terminate");
      const Vec2& g = tr.point(cur);
      tr.neighbors(cur, nb);
      double tbest = std::numeric_limits<double>::infinity();
      int qbest = -1;
      bool tie = false;
      for (int q : nb) {
        const Vec2& h = tr.point(q);
        // d^2(p(t),g) - d^2(p(t),h) crosses 0 upward at t_q
        double B = 2.0 * (dxy[0] * (h[0] - g[0]) + dxy[1] * (h[1] - g[1]));
        if (B <= 0) continue;
        double A = 2.0 * (x[0] * (h[0] - g[0]) + x[1] * (h[1] - g[1])) -
                   (h[0] * h[0] + h[1] * h[1] - g[0] * g[0] - g[1] * g[1]);
        double tq = -A / B;
        if (tq < t - 1e-15) continue;
        double tol = 1e-12 * std::max(1.0, std::abs(tq));
        if (tq < tbest - tol) {
          tbest = tq;
          qbest = q;
          tie = false;
        } else if (tq <= tbest + tol) {
          tie = true;
          if (lex_less<2>(tr.point(q), tr.point(qbest))) qbest = q;
        }
      }
      if (qbest == -1 || tbest > 1.0) break;  // stays in cur until the end
      if (tie) {
        degenerate = true;
        break;
      }
      cur = qbest;
      t = tbest;
      path.push_back(cur);
    }
    if (!degenerate) {
      int vy = tr.nearest(y);
      if (path.back() != vy)
        throw censored_error("segment_path: ambiguous endpoint tile");
      return path;
    }
  }
  throw censored_error("segment_path: persistent degenerate vertex crossing");
}

// sanity invariant for any tile set: the tile count never exceeds the total
// point count of the boxes its union meets
inline bool cover_sandwich_holds(CellBoxCache& cache, const std::vector<int>& tiles,
                                 const std::unordered_map<IVec2, int, ivec_hash>& box_counts) {
  std::vector<IVec2> un, merged;
  for (int v : tiles) {
    detail::merge_sorted(un, cache.boxes(v), merged);
    un.swap(merged);
  }
  long total = 0;
  for (const IVec2& z : un) {
    auto it = box_counts.find(z);
    if (it != box_counts.end()) total += it->second;
  }
  return (long)tiles.size() <= total;
}

}  // namespace vorpoly
