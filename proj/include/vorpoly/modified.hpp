#pragma once

// Density-regularized rebuild of a planar point set. The plane is tiled by
// boxes of side n^delta, each split into 36 sub-boxes; the rebuild makes
// every sub-box hold between 1 and ceil(n^{2 delta}) points: empty sub-boxes
// gain one uniform point, overfull ones keep a uniform subset of the cap
// size, all others are untouched. Every random choice is keyed by the
// sub-box's global index, so the result is independent of evaluation order,
// and n = 0 stands for "no rebuild" (the identity).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "core.hpp"
#include "ppp.hpp"
#include "rng.hpp"

namespace vorpoly {

struct ModifiedLayout {
  double tile_side = 0;  // n^delta
  double sub_side = 0;   // n^delta / 6
  std::uint64_t cap = 0;  // ceil(n^{2 delta})

  static ModifiedLayout make(std::uint64_t n, double delta) {
    ModifiedLayout l;
    l.tile_side = std::pow((double)n, delta);
    l.sub_side = l.tile_side / 6.0;
    l.cap = (std::uint64_t)std::ceil(std::pow((double)n, 2.0 * delta) - 1e-9);
    return l;
  }

  // global sub-box index of a point (sub-grid anchored at the origin)
  IVec2 sub_index(const Vec2& p) const {
    return {(int)std::floor(p[0] / sub_side), (int)std::floor(p[1] / sub_side)};
  }
  Box2 sub_box(const IVec2& g) const {
    return {{g[0] * sub_side, g[1] * sub_side}, {(g[0] + 1) * sub_side, (g[1] + 1) * sub_side}};
  }
};

inline bool aligned_to(double x, double step, double tol = 1e-9) {
  double r = x / step;
  return std::abs(r - std::round(r)) < tol;
}

inline PointSet<2> build_modified(const PointSet<2>& ps, std::uint64_t n, double delta) {
  if (n == 0) return ps;  // infinity: identity
  ModifiedLayout l = ModifiedLayout::make(n, delta);
  for (int i = 0; i < 2; ++i)
    if (!aligned_to(ps.window.lo[i], l.sub_side) || !aligned_to(ps.window.hi[i], l.sub_side))
      throw precondition_error("build_modified: window not aligned to the sub-box grid");

  // bucket original points by sub-box
  std::unordered_map<IVec2, std::vector<Vec2>, ivec_hash> bucket;
  for (const Vec2& p : ps.pts) bucket[l.sub_index(p)].push_back(p);

  PointSet<2> out;
  out.window = ps.window;
  out.seed = ps.seed;
  out.replicate = ps.replicate;
  out.modified = true;
  out.modified_n = n;
  out.modified_delta = delta;

  int gx0 = (int)std::llround(ps.window.lo[0] / l.sub_side);
  int gx1 = (int)std::llround(ps.window.hi[0] / l.sub_side);
  int gy0 = (int)std::llround(ps.window.lo[1] / l.sub_side);
  int gy1 = (int)std::llround(ps.window.hi[1] / l.sub_side);
  for (int gx = gx0; gx < gx1; ++gx)
    for (int gy = gy0; gy < gy1; ++gy) {
      IVec2 g{gx, gy};
      auto it = bucket.find(g);
      std::vector<Vec2> pts = it == bucket.end() ? std::vector<Vec2>{} : it->second;
      std::sort(pts.begin(), pts.end(),
                [](const Vec2& a, const Vec2& b) { return lex_less<2>(a, b); });
      Rng rng = Rng::keyed({ps.seed, ps.replicate, stream_tag::modified, n,
                            (std::uint64_t)(std::int64_t)gx, (std::uint64_t)(std::int64_t)gy});
      if (pts.empty()) {
        Box2 sb = l.sub_box(g);
        Vec2 p{rng.uniform(sb.lo[0], sb.hi[0]), rng.uniform(sb.lo[1], sb.hi[1])};
        out.pts.push_back(p);
      } else if (pts.size() > l.cap) {
        // uniform subset of size cap: partial Fisher-Yates over lex order
        std::vector<std::uint32_t> idx(pts.size());
        for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::uint64_t i = 0; i < l.cap; ++i) {
          std::uint64_t j = i + rng.below(idx.size() - i);
          std::swap(idx[i], idx[j]);
        }
        idx.resize(l.cap);
        std::sort(idx.begin(), idx.end());
        for (std::uint32_t i : idx) out.pts.push_back(pts[i]);
      } else {
        for (const Vec2& p : pts) out.pts.push_back(p);
      }
    }
  return out;
}

struct ModifiedCheck {
  bool ok = true;
  std::string message;
  std::uint64_t sub_boxes = 0;
  std::uint64_t filled = 0;    // were empty, gained one point
  std::uint64_t thinned = 0;   // were over cap
};

inline ModifiedCheck verify_modified_invariants(const PointSet<2>& orig,
                                                const PointSet<2>& mod, std::uint64_t n,
                                                double delta) {
  ModifiedCheck chk;
  auto fail = [&](const std::string& m) {
    chk.ok = false;
    if (chk.message.empty()) chk.message = m;
  };
  ModifiedLayout l = ModifiedLayout::make(n, delta);
  std::unordered_map<IVec2, std::vector<Vec2>, ivec_hash> ob, mb;
  for (const Vec2& p : orig.pts) ob[l.sub_index(p)].push_back(p);
  for (const Vec2& p : mod.pts) mb[l.sub_index(p)].push_back(p);

  int gx0 = (int)std::llround(orig.window.lo[0] / l.sub_side);
  int gx1 = (int)std::llround(orig.window.hi[0] / l.sub_side);
  int gy0 = (int)std::llround(orig.window.lo[1] / l.sub_side);
  int gy1 = (int)std::llround(orig.window.hi[1] / l.sub_side);
  auto sorted = [](std::vector<Vec2> v) {
    std::sort(v.begin(), v.end(),
              [](const Vec2& a, const Vec2& b) { return lex_less<2>(a, b); });
    return v;
  };
  for (int gx = gx0; gx < gx1; ++gx)
    for (int gy = gy0; gy < gy1; ++gy) {
      IVec2 g{gx, gy};
      ++chk.sub_boxes;
      std::vector<Vec2> o = sorted(ob.count(g) ? ob[g] : std::vector<Vec2>{});
      std::vector<Vec2> m = sorted(mb.count(g) ? mb[g] : std::vector<Vec2>{});
      if (m.empty()) fail("modified sub-box left empty");
      if (m.size() > l.cap) fail("modified sub-box above cap");
      if (o.empty()) {
        ++chk.filled;
        if (m.size() != 1) fail("empty sub-box should gain exactly one point");
        else {
          Box2 sb = l.sub_box(g);
          if (!sb.contains_half_open(m[0])) fail("added point outside its sub-box");
        }
      } else if (o.size() > l.cap) {
        ++chk.thinned;
        if (m.size() != l.cap) fail("overfull sub-box not thinned to cap");
        // subset check over sorted lists
        std::size_t i = 0;
        for (const Vec2& p : m) {
          while (i < o.size() && o[i] != p) ++i;
          if (i >= o.size()) {
            fail("thinned sub-box contains a non-original point");
            break;
          }
          ++i;
        }
      } else {
        if (o != m) fail("in-range sub-box was altered");
      }
    }
  return chk;
}

// fraction of sub-boxes the rebuild alters (empty or overfull in the
// original); its mean under a homogeneous process has the closed form
// P(Poisson(lambda sub_area) = 0) + P(> cap)
inline double altered_subbox_fraction(const PointSet<2>& orig, std::uint64_t n, double delta) {
  ModifiedLayout l = ModifiedLayout::make(n, delta);
  std::unordered_map<IVec2, std::uint64_t, ivec_hash> counts;
  for (const Vec2& p : orig.pts) ++counts[l.sub_index(p)];
  int gx0 = (int)std::llround(orig.window.lo[0] / l.sub_side);
  int gx1 = (int)std::llround(orig.window.hi[0] / l.sub_side);
  int gy0 = (int)std::llround(orig.window.lo[1] / l.sub_side);
  int gy1 = (int)std::llround(orig.window.hi[1] / l.sub_side);
  std::uint64_t altered = 0, total = 0;
  for (int gx = gx0; gx < gx1; ++gx)
    for (int gy = gy0; gy < gy1; ++gy) {
      ++total;
      auto it = counts.find(IVec2{gx, gy});
      std::uint64_t c = it == counts.end() ? 0 : it->second;
      if (c == 0 || c > l.cap) ++altered;
    }
  return total ? (double)altered / (double)total : 0.0;
}

}  // namespace vorpoly
