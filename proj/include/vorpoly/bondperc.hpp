#pragma once

// Bernoulli bond percolation on the Delaunay graph: edge rewards keyed by
// the edge's endpoint coordinates (order-invariant), minimal reward over
// self-avoiding paths, and "good boxes" — blocks whose L-infinity 2-
// neighborhood is full and whose annulus admits no zero-reward crossing.
// Good boxes yield disjoint path pieces each worth at least one unit of
// reward, which is the mechanism the path-reward tail bound rests on.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "blocks.hpp"
#include "core.hpp"
#include "delaunay.hpp"
#include "polyomino.hpp"
#include "rng.hpp"
#include "voronoi.hpp"

namespace vorpoly {

// iid Bernoulli(p) reward on undirected edges, a pure function of the two
// endpoint coordinates
struct EdgeField {
  std::uint64_t base = 0;
  double p = 1.0;

  int tau(const Vec2& a, const Vec2& b) const {
    const Vec2& lo = lex_less<2>(a, b) ? a : b;
    const Vec2& hi = lex_less<2>(a, b) ? b : a;
    std::uint64_t h = base, w;
    std::memcpy(&w, &lo[0], 8);
    h = key_chain(h, w);
    std::memcpy(&w, &lo[1], 8);
    h = key_chain(h, w);
    std::memcpy(&w, &hi[0], 8);
    h = key_chain(h, w);
    std::memcpy(&w, &hi[1], 8);
    h = key_chain(h, w);
    double u = (double)(mix64(h) >> 11) * 0x1.0p-53;
    return u < p ? 1 : 0;
  }
};

inline EdgeField make_edge_field(std::uint64_t seed, std::uint64_t replicate, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw precondition_error("make_edge_field: p outside [0,1]");
  EdgeField f;
  f.base = hash_key({seed, replicate, stream_tag::edges});
  f.p = p;
  return f;
}

namespace detail {

struct PolyCache {
  const Triangulation* tr;
  std::vector<char> have;
  std::vector<Polygon> poly;
  std::vector<char> touches;
  std::vector<int> scratch;

  explicit PolyCache(const Triangulation& t) : tr(&t) {
    have.assign(t.n_real(), 0);
    poly.resize(t.n_real());
    touches.assign(t.n_real(), 0);
  }
  const Polygon& of(int v) {
    if (!have[v]) {
      VoronoiCell c = voronoi_cell(*tr, v, scratch);
      poly[v] = std::move(c.poly);
      touches[v] = c.touches_boundary ? 1 : 0;
      have[v] = 1;
    }
    return poly[v];
  }
};

inline bool polygon_meets_closed_box(const Polygon& poly, const Box2& b) {
  Polygon clip = poly;
  clip_halfplane(clip, {1, 0}, b.hi[0]);
  clip_halfplane(clip, {-1, 0}, -b.lo[0]);
  clip_halfplane(clip, {0, 1}, b.hi[1]);
  clip_halfplane(clip, {0, -1}, -b.lo[1]);
  return !clip.empty();
}

inline bool polygon_inside_open_box(const Polygon& poly, const Box2& b) {
  for (const Vec2& z : poly)
    if (!(z[0] > b.lo[0] && z[0] < b.hi[0] && z[1] > b.lo[1] && z[1] < b.hi[1]))
      return false;
  return true;
}

inline bool polygon_meets_box_boundary(const Polygon& poly, const Box2& b) {
  return polygon_meets_closed_box(poly, b) && !polygon_inside_open_box(poly, b);
}

}  // namespace detail

// Evaluates the good-box field Z on one realization. A block z is good when
//  (1) every block within L-infinity distance 2 is full, and
//  (2) every self-avoiding path from a cell meeting the boundary of
//      B_z^{1/2,L} to a cell meeting the boundary of B_z^{3/2,L}, with
//      intermediate generators in the annulus, carries total reward >= 1.
// (2) is decided by flooding the zero-reward subgraph.
class GoodBoxField {
 public:
  GoodBoxField(const Triangulation& tr, const BlockOccupancy<2>& occ, const EdgeField& tau,
               double L)
      : tr_(&tr), occ_(&occ), tau_(&tau), L_(L), cache_(tr) {}

  bool open(const IVec2& z) const { return const_cast<GoodBoxField*>(this)->eval(z); }

 private:
  const Triangulation* tr_;
  const BlockOccupancy<2>* occ_;
  const EdgeField* tau_;
  double L_;
  detail::PolyCache cache_;
  std::unordered_map<IVec2, char, ivec_hash> memo_;

  bool eval(const IVec2& z) {
    auto it = memo_.find(z);
    if (it != memo_.end()) return it->second;
    bool good = full_neighborhood(z) && !zero_reward_crossing(z);
    memo_.emplace(z, (char)good);
    return good;
  }

  bool full_neighborhood(const IVec2& z) {
    for (int dx = -2; dx <= 2; ++dx)
      for (int dy = -2; dy <= 2; ++dy)
        if (!occ_->full_block({z[0] + dx, z[1] + dy})) return false;
    return true;
  }

  bool zero_reward_crossing(const IVec2& z) {
    const Box2 inner = scaled_block<2>(z, 0.5, L_);
    const Box2 outer = scaled_block<2>(z, 1.5, L_);
    const Box2& w = tr_->window();
    for (int i = 0; i < 2; ++i)
      if (outer.lo[i] < w.lo[i] + L_ / 2 || outer.hi[i] > w.hi[i] - L_ / 2)
        throw precondition_error("good box annulus too close to the window edge");
    auto in_annulus = [&](const Vec2& p) {
      return outer.contains_closed(p) && !inner.contains_closed(p);
    };
    // seeds: cells meeting the inner boundary
    std::vector<int> stack, nb;
    std::unordered_set<int> seen;
    Box2 region = outer;
    for (int v : candidate_cells_near(*tr_, region)) {
      const Polygon& poly = cache_.of(v);
      if (detail::polygon_meets_box_boundary(poly, inner)) {
        if (seen.insert(v).second) stack.push_back(v);
      }
    }
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (detail::polygon_meets_box_boundary(cache_.of(v), outer)) return true;
      tr_->neighbors(v, nb);
      for (int u : nb) {
        if (tau_->tau(tr_->point(v), tr_->point(u)) != 0) continue;
        // u may serve as the crossing endpoint regardless of its position
        if (detail::polygon_meets_box_boundary(cache_.of(u), outer)) return true;
        if (!in_annulus(tr_->point(u))) continue;  // expansion needs annulus
        if (seen.insert(u).second) stack.push_back(u);
      }
    }
    return false;
  }
};

struct PathRewardProfile {
  // per size k (vertex count), the minimal total reward over self-avoiding
  // paths of exactly k vertices from the root; monotone in k
  std::vector<int> min_reward;
};

// Exhaustive DFS over self-avoiding paths from root with monotone pruning;
// r is capped at 10 vertices.
inline PathRewardProfile min_path_reward(const Triangulation& tr, const EdgeField& tau,
                                         int root, int r) {
  if (r > 10) throw precondition_error("min_path_reward: r exceeds guard 10");
  PathRewardProfile prof;
  prof.min_reward.assign(r + 1, std::numeric_limits<int>::max());
  prof.min_reward[1] = 0;  // single-vertex path, no edges
  std::vector<int> path{root};
  std::vector<char> on_path(tr.n_real(), 0);
  on_path[root] = 1;
  std::vector<std::vector<int>> nbstack(r + 1);
  struct Frame {
    int v;
    int sum;
    std::size_t next;
  };
  std::vector<Frame> frames;
  frames.push_back({root, 0, 0});
  tr.neighbors(root, nbstack[1]);
  while (!frames.empty()) {
    Frame& f = frames.back();
    int depth = (int)frames.size();  // vertices so far
    if (depth == r || f.next >= nbstack[depth].size()) {
      on_path[f.v] = 0;
      frames.pop_back();
      continue;
    }
    int u = nbstack[depth][f.next++];
    if (on_path[u]) continue;
    int sum = f.sum + tau.tau(tr.point(f.v), tr.point(u));
    int nd = depth + 1;
    if (sum < prof.min_reward[nd]) prof.min_reward[nd] = sum;
    if (sum >= prof.min_reward[r] && prof.min_reward[r] != std::numeric_limits<int>::max())
      continue;  // cannot improve any deeper level
    if (nd < r) {
      on_path[u] = 1;
      frames.push_back({u, sum, 0});
      tr.neighbors(u, nbstack[nd]);
    }
  }
  return prof;
}

struct PiecesReport {
  int sum_tau = 0;             // total reward along the path
  std::size_t boxes = 0;       // #A_L(gamma)
  int z_good = 0;              // good boxes among them
  int z_cross = 0;             // good boxes whose annulus the path crosses
  double rhs_raw = 0;          // z_good / 4^d
  double rhs_cross = 0;        // z_cross / 4^d
  bool raw_applicable = false; // every good box is crossed
  bool ok = true;              // sum_tau >= rhs_cross
};

// Empirical check of the disjoint-pieces mechanism along a concrete path:
// each good box whose annulus the path fully crosses (some cell of the path
// meets the closed inner box and some path generator leaves the closed outer
// box) contributes a disjoint piece of reward >= 1 after 4-separation, so
// sum tau >= (#crossed good boxes) / 4^d.
inline PiecesReport verify_disjoint_pieces(const Triangulation& tr, GoodBoxField& zfield,
                                           const EdgeField& tau, const std::vector<int>& path,
                                           double L) {
  PiecesReport rep;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    rep.sum_tau += tau.tau(tr.point(path[i]), tr.point(path[i + 1]));
  CellBoxCache cache(tr, L);
  std::vector<IVec2> un, merged;
  for (int v : path) {
    detail::merge_sorted(un, cache.boxes(v), merged);
    un.swap(merged);
  }
  rep.boxes = un.size();
  detail::PolyCache pc(tr);
  rep.raw_applicable = true;
  for (const IVec2& z : un) {
    if (!zfield.open(z)) continue;
    ++rep.z_good;
    Box2 inner = scaled_block<2>(z, 0.5, L);
    Box2 outer = scaled_block<2>(z, 1.5, L);
    bool meets_inner = false, exits_outer = false;
    for (int v : path) {
      if (!meets_inner && detail::polygon_meets_closed_box(pc.of(v), inner))
        meets_inner = true;
      const Vec2& g = tr.point(v);
      if (!exits_outer && !outer.contains_closed(g)) exits_outer = true;
      if (meets_inner && exits_outer) break;
    }
    if (meets_inner && exits_outer)
      ++rep.z_cross;
    else
      rep.raw_applicable = false;
  }
  rep.rhs_raw = rep.z_good / 16.0;    // 4^d, d = 2
  rep.rhs_cross = rep.z_cross / 16.0;
  rep.ok = rep.sum_tau >= rep.rhs_cross;
  return rep;
}

}  // namespace vorpoly
