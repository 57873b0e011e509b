#pragma once

// Voronoi cells restricted to the sampling window, derived from the Delaunay
// triangulation by half-plane clipping. Within the window the intersection of
// the window with the bisector half-planes of the Delaunay neighbors equals
// the true Voronoi cell: every bounding bisector belongs to a Voronoi
// neighbor, and Voronoi neighbors with positive-length shared edges are
// always Delaunay neighbors.

#include <algorithm>
#include <cmath>
#include <vector>

#include "core.hpp"
#include "delaunay.hpp"

namespace vorpoly {

using Polygon = std::vector<Vec2>;

// keep the side n . z <= c  (convex clip; window-edge coordinates of kept or
// newly created vertices are preserved exactly when the edge is axis-aligned,
// because interpolating between two equal coordinates is exact)
inline void clip_halfplane(Polygon& poly, const Vec2& n, double c) {
  if (poly.empty()) return;
  Polygon out;
  out.reserve(poly.size() + 2);
  auto side = [&](const Vec2& z) { return n[0] * z[0] + n[1] * z[1] - c; };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    double sa = side(a), sb = side(b);
    if (sa <= 0) out.push_back(a);
    if ((sa < 0 && sb > 0) || (sa > 0 && sb < 0)) {
      double t = sa / (sa - sb);
      out.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    }
  }
  poly = std::move(out);
}

inline double polygon_area(const Polygon& p) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % p.size()];
    s += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * s;
}

inline Box2 polygon_bbox(const Polygon& p) {
  Box2 b{{p[0][0], p[0][1]}, {p[0][0], p[0][1]}};
  for (const Vec2& z : p) {
    b.lo[0] = std::min(b.lo[0], z[0]);
    b.lo[1] = std::min(b.lo[1], z[1]);
    b.hi[0] = std::max(b.hi[0], z[0]);
    b.hi[1] = std::max(b.hi[1], z[1]);
  }
  return b;
}

struct VoronoiCell {
  int gen = -1;           // vertex id in the triangulation
  Polygon poly;           // CCW, possibly clipped by the window
  bool touches_boundary = false;
  double area = 0;
};

inline bool touches_window_boundary(const Polygon& poly, const Box2& w) {
  for (const Vec2& z : poly)
    if (z[0] == w.lo[0] || z[0] == w.hi[0] || z[1] == w.lo[1] || z[1] == w.hi[1])
      return true;
  return false;
}

inline VoronoiCell voronoi_cell(const Triangulation& tr, int v,
                                std::vector<int>& scratch) {
  const Box2& w = tr.window();
  VoronoiCell cell;
  cell.gen = v;
  cell.poly = {{w.lo[0], w.lo[1]}, {w.hi[0], w.lo[1]}, {w.hi[0], w.hi[1]}, {w.lo[0], w.hi[1]}};
  const Vec2& g = tr.point(v);
  tr.neighbors(v, scratch);
  for (int q : scratch) {
    const Vec2& h = tr.point(q);
    // keep d(z,g) <= d(z,h):  (h-g).z <= (h-g).(g+h)/2
    Vec2 n{h[0] - g[0], h[1] - g[1]};
    double c = 0.5 * (n[0] * (g[0] + h[0]) + n[1] * (g[1] + h[1]));
    clip_halfplane(cell.poly, n, c);
    if (cell.poly.empty()) break;
  }
  if (cell.poly.empty()) throw std::logic_error("voronoi_cell: empty cell");
  cell.touches_boundary = touches_window_boundary(cell.poly, w);
  cell.area = polygon_area(cell.poly);
  return cell;
}

inline std::vector<VoronoiCell> voronoi_cells(const Triangulation& tr) {
  std::vector<VoronoiCell> cells;
  cells.reserve(tr.n_real());
  std::vector<int> scratch;
  for (std::size_t v = 0; v < tr.n_real(); ++v)
    cells.push_back(voronoi_cell(tr, (int)v, scratch));
  return cells;
}

// Lattice boxes (side s, centered on s*Z^2, half-open) meeting the closed
// cell. A touch confined to a box's high faces belongs to the next box over,
// so hits additionally require extending below hi - eps in both coordinates.
inline std::vector<IVec2> boxes_hit_by_cell(const Polygon& poly, double side) {
  std::vector<IVec2> out;
  if (poly.empty()) return out;
  Box2 bb = polygon_bbox(poly);
  double eps = 1e-9 * side;
  int zx0 = (int)std::floor(bb.lo[0] / side + 0.5) - 1;
  int zx1 = (int)std::floor(bb.hi[0] / side + 0.5) + 1;
  int zy0 = (int)std::floor(bb.lo[1] / side + 0.5) - 1;
  int zy1 = (int)std::floor(bb.hi[1] / side + 0.5) + 1;
  Polygon clip;
  for (int zx = zx0; zx <= zx1; ++zx)
    for (int zy = zy0; zy <= zy1; ++zy) {
      Box2 box = lattice_box<2>({zx, zy}, side);
      clip = poly;
      clip_halfplane(clip, {1, 0}, box.hi[0]);
      clip_halfplane(clip, {-1, 0}, -box.lo[0]);
      clip_halfplane(clip, {0, 1}, box.hi[1]);
      clip_halfplane(clip, {0, -1}, -box.lo[1]);
      if (clip.empty()) continue;
      double mx = clip[0][0], my = clip[0][1];
      for (const Vec2& z : clip) {
        mx = std::min(mx, z[0]);
        my = std::min(my, z[1]);
      }
      if (mx < box.hi[0] - eps && my < box.hi[1] - eps) out.push_back({zx, zy});
    }
  std::sort(out.begin(), out.end(),
            [](const IVec2& a, const IVec2& b) { return lex_less<2>(a, b); });
  return out;
}

struct DualityReport {
  bool ok = true;
  std::size_t delaunay_edges_checked = 0;
  std::size_t cell_edges_checked = 0;
  std::string message;
};

// Cross-validates the triangulation against independently clipped cells:
//  (a) every Delaunay edge whose two cells stay clear of the window boundary
//      yields a shared cell edge on the bisector — positive-length in general
//      position, degenerating to a single shared vertex exactly when four
//      generators are cocircular and the tie-broken diagonal carries a
//      zero-length dual edge;
//  (b) every positive-length cell edge away from the window boundary lies on
//      the bisector with a generator that is a Delaunay neighbor.
inline DualityReport check_duality(const Triangulation& tr,
                                   const std::vector<VoronoiCell>& cells,
                                   double min_len = 1e-7) {
  DualityReport rep;
  const Box2& w = tr.window();
  auto fail = [&](const std::string& m) {
    rep.ok = false;
    if (rep.message.empty()) rep.message = m;
  };

  // (a) Delaunay edge -> shared cell segment
  std::vector<int> nb;
  for (auto [u, v] : tr.real_edges()) {
    if (cells[u].touches_boundary || cells[v].touches_boundary) continue;
    ++rep.delaunay_edges_checked;
    const Vec2& g = tr.point(u);
    const Vec2& h = tr.point(v);
    Vec2 n{h[0] - g[0], h[1] - g[1]};
    double c = 0.5 * (n[0] * (g[0] + h[0]) + n[1] * (g[1] + h[1]));
    double nn = std::hypot(n[0], n[1]);
    // cell_u's edge on this bisector: vertices within tol of the line
    int on_line = 0;
    bool point_contact = false;
    for (const Vec2& z : cells[u].poly) {
      double d = std::abs(n[0] * z[0] + n[1] * z[1] - c) / nn;
      if (d >= 1e-6) continue;
      ++on_line;
      // a vertex shared with the other cell marks the degenerate
      // (zero-length) dual edge of a cocircular quadruple
      for (const Vec2& y : cells[v].poly)
        if (std::hypot(y[0] - z[0], y[1] - z[1]) < 1e-6) point_contact = true;
    }
    if (on_line < 2 && !point_contact)
      fail("delaunay edge without matching cell edge between interior cells");
  }

  // (b) cell edge -> Delaunay edge
  for (const VoronoiCell& cell : cells) {
    if (cell.touches_boundary) continue;
    const Vec2& g = tr.point(cell.gen);
    tr.neighbors(cell.gen, nb);
    for (std::size_t i = 0; i < cell.poly.size(); ++i) {
      const Vec2& a = cell.poly[i];
      const Vec2& b = cell.poly[(i + 1) % cell.poly.size()];
      double len = std::hypot(b[0] - a[0], b[1] - a[1]);
      if (len <= min_len) continue;
      if (a[0] == w.lo[0] || a[0] == w.hi[0] || a[1] == w.lo[1] || a[1] == w.hi[1])
        continue;
      ++rep.cell_edges_checked;
      // probe just beyond the edge midpoint: its nearest generator is the
      // neighbor across the edge
      Vec2 m{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
      Vec2 out_n{b[1] - a[1], a[0] - b[0]};  // outward for CCW polygon
      double on = std::hypot(out_n[0], out_n[1]);
      double delta = 1e-7 * std::max(1.0, std::hypot(m[0] - g[0], m[1] - g[1]));
      Vec2 probe{m[0] + delta * out_n[0] / on, m[1] + delta * out_n[1] / on};
      int q = tr.nearest(probe);
      if (q == cell.gen) {
        fail("cell edge probe still nearest to own generator");
        continue;
      }
      if (std::find(nb.begin(), nb.end(), q) == nb.end())
        fail("cell edge neighbor is not a delaunay neighbor");
    }
  }
  return rep;
}

}  // namespace vorpoly
