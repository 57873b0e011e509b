#pragma once

// Block renormalization. Blocks are the boxes L*z + [-L/2, L/2)^d. A block
// is "full" when each of its (4*ceil(sqrt(d))+1)^d equal sub-boxes holds at
// least one point; full blocks around a region pin the tessellation down:
// every cell meeting the region's box union stays inside its L/2-
// neighborhood. The block indicator field (all blocks in the L-infinity
// 1-ball full) is 3-dependent with marginal probability -> 1 as L grows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "core.hpp"
#include "lattice.hpp"
#include "ppp.hpp"
#include "stats.hpp"
#include "voronoi.hpp"

namespace vorpoly {

inline int block_subdivisions(int d) {
  return 4 * (int)std::ceil(std::sqrt((double)d)) + 1;  // 9 for d = 2 and 3
}

// B_z^{s,L} = L z + [-sL, sL]^d (stored half-open along each axis)
template <int D>
inline Box<D> scaled_block(const IVec<D>& z, double s, double L) {
  Box<D> b;
  for (int i = 0; i < D; ++i) {
    b.lo[i] = L * z[i] - s * L;
    b.hi[i] = L * z[i] + s * L;
  }
  return b;
}

// Occupancy of the sub-box grid (side L/m) for one realization; answers
// full-block and block-field queries.
template <int D>
struct BlockOccupancy {
  double L = 1;
  int m = block_subdivisions(D);
  std::unordered_set<IVec<D>, ivec_hash> occupied;  // global sub-box indices
  mutable std::unordered_map<IVec<D>, char, ivec_hash> full_memo;

  static BlockOccupancy build(const std::vector<Vec<D>>& pts, double L) {
    BlockOccupancy o;
    o.L = L;
    double sub = L / o.m;
    for (const Vec<D>& p : pts) {
      IVec<D> g;
      for (int i = 0; i < D; ++i)
        g[i] = (int)std::floor((p[i] + L / 2) / sub);
      o.occupied.insert(g);
    }
    return o;
  }

  bool full_block(const IVec<D>& z) const {
    auto it = full_memo.find(z);
    if (it != full_memo.end()) return it->second;
    bool ok = true;
    int total = 1;
    for (int i = 0; i < D; ++i) total *= m;
    for (int code = 0; code < total && ok; ++code) {
      int c = code;
      IVec<D> g;
      for (int i = 0; i < D; ++i) {
        g[i] = m * z[i] + c % m;
        c /= m;
      }
      if (!occupied.count(g)) ok = false;
    }
    full_memo.emplace(z, (char)ok);
    return ok;
  }

  // X_z: every block within L-infinity distance 1 is full
  bool block_field_open(const IVec<D>& z) const {
    int total = 1;
    for (int i = 0; i < D; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
      int c = code;
      IVec<D> u;
      for (int i = 0; i < D; ++i) {
        u[i] = z[i] + c % 3 - 1;
        c /= 3;
      }
      if (!full_block(u)) return false;
    }
    return true;
  }
};

// adapter so cluster machinery can run on the block field
template <int D>
struct BlockFieldView {
  const BlockOccupancy<D>* occ;
  bool open(const IVec<D>& z) const { return occ->block_field_open(z); }
};

// exact for a homogeneous process: sub-box counts are independent Poisson
inline double full_block_probability(double lambda, double L, int d) {
  int m = block_subdivisions(d);
  double vol = 1;
  for (int i = 0; i < d; ++i) vol *= L / m;
  double p_sub = -std::expm1(-lambda * vol);  // 1 - e^{-lambda vol}
  double total = 1;
  for (int i = 0; i < d; ++i) total *= m;
  return std::pow(p_sub, total);
}

// union bound for any intensity with density >= 1/c_mu
inline double not_full_block_bound(double c_mu, double L, int d) {
  int m = block_subdivisions(d);
  double vol = 1, total = 1;
  for (int i = 0; i < d; ++i) {
    vol *= L / m;
    total *= m;
  }
  return total * std::exp(-vol / c_mu);
}

// marginal failure bound for the block field (3^d blocks must be full)
inline double block_field_failure_bound(double c_mu, double L, int d) {
  double t = 1;
  for (int i = 0; i < d; ++i) t *= 3;
  return t * not_full_block_bound(c_mu, L, d);
}

// Draw the point process conditioned on every listed block being full: each
// required sub-box gets a zero-truncated Poisson count with uniform points,
// the complement gets an ordinary thinned Poisson. Over disjoint regions
// this is exactly the conditional law.
template <int D>
PointSet<D> sample_given_full_blocks(const Box<D>& window, double lambda,
                                     std::uint64_t seed, std::uint64_t replicate,
                                     double L, std::vector<IVec<D>> full_blocks) {
  const int m = block_subdivisions(D);
  std::sort(full_blocks.begin(), full_blocks.end(),
            [](const IVec<D>& a, const IVec<D>& b) { return lex_less<D>(a, b); });
  full_blocks.erase(std::unique(full_blocks.begin(), full_blocks.end()), full_blocks.end());
  std::vector<Box<D>> blocks;
  for (const IVec<D>& z : full_blocks) {
    Box<D> b = scaled_block<D>(z, 0.5, L);
    for (int i = 0; i < D; ++i)
      if (b.lo[i] < window.lo[i] || b.hi[i] > window.hi[i])
        throw precondition_error("sample_given_full_blocks: block outside window");
    blocks.push_back(b);
  }

  PointSet<D> ps;
  ps.window = window;
  ps.seed = seed;
  ps.replicate = replicate;
  Rng rng = Rng::keyed({seed, replicate, stream_tag::points, (std::uint64_t)D, 901});
  double sub = L / m;
  double sub_vol = 1;
  for (int i = 0; i < D; ++i) sub_vol *= sub;
  int per_block = 1;
  for (int i = 0; i < D; ++i) per_block *= m;

  for (const Box<D>& b : blocks) {
    for (int code = 0; code < per_block; ++code) {
      int c = code;
      Box<D> sb;
      for (int i = 0; i < D; ++i) {
        sb.lo[i] = b.lo[i] + (c % m) * sub;
        sb.hi[i] = sb.lo[i] + sub;
        c /= m;
      }
      std::uint64_t n = rng.poisson_geq1(lambda * sub_vol);
      for (std::uint64_t k = 0; k < n; ++k) {
        Vec<D> p;
        for (int i = 0; i < D; ++i) p[i] = rng.uniform(sb.lo[i], sb.hi[i]);
        ps.pts.push_back(p);
      }
    }
  }
  // ordinary Poisson outside the conditioned blocks
  std::uint64_t n = rng.poisson(lambda * window.volume());
  for (std::uint64_t k = 0; k < n; ++k) {
    Vec<D> p;
    for (int i = 0; i < D; ++i) p[i] = rng.uniform(window.lo[i], window.hi[i]);
    bool inside = false;
    for (const Box<D>& b : blocks)
      if (b.contains_half_open(p)) {
        inside = true;
        break;
      }
    if (!inside) ps.pts.push_back(p);
  }
  return ps;
}

template <int D>
inline BoxUnion<D> box_union_of(const Animal<D>& a, double L) {
  return BoxUnion<D>::from_animal(a, L);
}

struct ConfinementReport {
  bool ok = true;
  std::size_t cells_meeting = 0;
  std::size_t cells_total = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // L/2 - max dist
};

// Checks on one realization that every Voronoi cell meeting the box union
// B(A) (side-L boxes over A) lies inside its L/2-neighborhood. The distance
// to B(A) is 1-Lipschitz, so a grid certificate with spacing h proves the
// bound up to h/sqrt(2); the grid refines until the verdict is clear.
inline ConfinementReport verify_confinement(const Triangulation& tr,
                                            const Animal<2>& a, double L,
                                            double tol = 5e-3) {
  ConfinementReport rep;
  BoxUnion<2> bu = BoxUnion<2>::from_animal(a, L);
  // closed boxes for the meet test
  std::vector<Box2> closed_boxes = bu.boxes;
  std::vector<int> scratch;
  for (std::size_t v = 0; v < tr.n_real(); ++v) {
    VoronoiCell cell = voronoi_cell(tr, (int)v, scratch);
    ++rep.cells_total;
    bool meets = false;
    Polygon clip;
    for (const Box2& b : closed_boxes) {
      clip = cell.poly;
      clip_halfplane(clip, {1, 0}, b.hi[0]);
      clip_halfplane(clip, {-1, 0}, -b.lo[0]);
      clip_halfplane(clip, {0, 1}, b.hi[1]);
      clip_halfplane(clip, {0, -1}, -b.lo[1]);
      if (!clip.empty()) {
        meets = true;
        break;
      }
    }
    if (!meets) continue;
    ++rep.cells_meeting;
    // max of dist(., B(A)) over the cell via Lipschitz grid certificate
    Box2 bb = polygon_bbox(cell.poly);
    double h = std::max(1e-6, std::max(bb.hi[0] - bb.lo[0], bb.hi[1] - bb.lo[1]) / 8);
    bool decided = false;
    for (int depth = 0; depth < 10 && !decided; ++depth, h *= 0.5) {
      double pad = h;
      double max_grid = 0;
      double max_inside = 0;
      for (double x = bb.lo[0] - pad; x <= bb.hi[0] + pad; x += h)
        for (double y = bb.lo[1] - pad; y <= bb.hi[1] + pad; y += h) {
          double f = bu.dist({x, y});
          max_grid = std::max(max_grid, f);
          // inside test: all edges non-negative orientation (convex CCW)
          bool inside = true;
          for (std::size_t i = 0; i < cell.poly.size() && inside; ++i) {
            const Vec2& p0 = cell.poly[i];
            const Vec2& p1 = cell.poly[(i + 1) % cell.poly.size()];
            if ((p1[0] - p0[0]) * (y - p0[1]) - (p1[1] - p0[1]) * (x - p0[0]) < 0)
              inside = false;
          }
          if (inside) max_inside = std::max(max_inside, f);
        }
      double certified = max_grid + h * 0.7071067811865476;
      if (certified <= L / 2 + tol) {
        rep.worst_margin = std::min(rep.worst_margin, L / 2 - certified);
        decided = true;
      } else if (max_inside > L / 2 + tol) {
        rep.ok = false;
        rep.worst_margin = std::min(rep.worst_margin, L / 2 - max_inside);
        decided = true;
      }
    }
    if (!decided) rep.ok = false;  // razor-edge case; report as failure
  }
  return rep;
}

}  // namespace vorpoly
