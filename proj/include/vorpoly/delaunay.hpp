#pragma once

// Incremental 2-D Delaunay triangulation (Bowyer-Watson) with exact filtered
// predicates. Three far-away frame vertices enclose the window so every real
// vertex stays interior; the frame is placed far enough (>10x window
// diameter) that any empty circle centred inside the window cannot reach it,
// so real-real adjacency inside the window is unaffected by the frame.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <vector>

#include "core.hpp"
#include "ppp.hpp"
#include "predicates.hpp"

namespace vorpoly {

class Triangulation {
 public:
  struct Tri {
    std::array<int, 3> v;   // CCW
    std::array<int, 3> nb;  // nb[k] across edge opposite v[k], -1 outside
  };

  static Triangulation build(const std::vector<Vec2>& points, const Box2& window) {
    Triangulation tr;
    tr.window_ = window;
    tr.n_real_ = points.size();
    tr.pts_ = points;
    double cx = 0.5 * (window.lo[0] + window.hi[0]);
    double cy = 0.5 * (window.lo[1] + window.hi[1]);
    double hd = 0.5 * std::hypot(window.hi[0] - window.lo[0],
                                 window.hi[1] - window.lo[1]);
    double R = 18.0 * std::max(hd, 1.0);
    tr.pts_.push_back({cx - R, cy - R});
    tr.pts_.push_back({cx + R, cy - R});
    tr.pts_.push_back({cx, cy + R});
    int f0 = (int)tr.n_real_, f1 = f0 + 1, f2 = f0 + 2;

    tr.vert_tri_.assign(tr.pts_.size(), -1);
    tr.tris_.push_back({{f0, f1, f2}, {-1, -1, -1}});
    tr.alive_.push_back(1);
    tr.vert_tri_[f0] = tr.vert_tri_[f1] = tr.vert_tri_[f2] = 0;

    for (std::size_t i = 0; i < tr.n_real_; ++i) {
      const Vec2& p = tr.pts_[i];
      if (!(p[0] >= window.lo[0] && p[0] < window.hi[0] && p[1] >= window.lo[1] &&
            p[1] < window.hi[1]))
        throw precondition_error("Triangulation: point outside window");
    }

    // spatial (Morton) insertion order keeps locate walks short
    std::vector<std::uint64_t> key(tr.n_real_);
    std::vector<int> order(tr.n_real_);
    double sx = (window.hi[0] - window.lo[0]);
    double sy = (window.hi[1] - window.lo[1]);
    for (std::size_t i = 0; i < tr.n_real_; ++i) {
      auto q = [&](double t) { return (std::uint32_t)std::min(2097151.0, std::max(0.0, t * 2097152.0)); };
      std::uint32_t ix = q((tr.pts_[i][0] - window.lo[0]) / sx);
      std::uint32_t iy = q((tr.pts_[i][1] - window.lo[1]) / sy);
      std::uint64_t m = 0;
      for (int b = 0; b < 21; ++b) {
        m |= (std::uint64_t)((ix >> b) & 1) << (2 * b);
        m |= (std::uint64_t)((iy >> b) & 1) << (2 * b + 1);
      }
      key[i] = m;
      order[i] = (int)i;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (key[a] != key[b]) return key[a] < key[b];
      if (tr.pts_[a] != tr.pts_[b]) return lex_less<2>(tr.pts_[a], tr.pts_[b]);
      return a < b;
    });
    for (int vi : order) tr.insert_(vi);
    return tr;
  }

  std::size_t n_real() const { return n_real_; }
  bool is_frame(int v) const { return v >= (int)n_real_; }
  const Vec2& point(int v) const { return pts_[v]; }
  const Box2& window() const { return window_; }
  std::uint64_t duplicate_skips() const { return dup_skips_; }

  std::vector<int> real_triangles() const {
    std::vector<int> out;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!alive_[t]) continue;
      const Tri& T = tris_[t];
      if (!is_frame(T.v[0]) && !is_frame(T.v[1]) && !is_frame(T.v[2]))
        out.push_back((int)t);
    }
    return out;
  }

  const Tri& tri(int t) const { return tris_[t]; }
  bool tri_alive(int t) const { return alive_[t]; }
  std::size_t tri_slots() const { return tris_.size(); }

  // undirected edges between real vertices, each as (u < v), sorted
  std::vector<std::pair<int, int>> real_edges() const {
    std::vector<std::pair<int, int>> es;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!alive_[t]) continue;
      const Tri& T = tris_[t];
      for (int k = 0; k < 3; ++k) {
        int u = T.v[k], v = T.v[(k + 1) % 3];
        if (is_frame(u) || is_frame(v)) continue;
        es.emplace_back(std::min(u, v), std::max(u, v));
      }
    }
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
    return es;
  }

  // real Delaunay neighbors of a real vertex, ascending
  void neighbors(int v, std::vector<int>& out) const {
    out.clear();
    int t0 = vert_tri_[v];
    if (t0 < 0) return;
    int t = t0;
    int guard = 0;
    do {
      const Tri& T = tris_[t];
      int i = (T.v[0] == v) ? 0 : (T.v[1] == v ? 1 : 2);
      int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
      if (!is_frame(a)) out.push_back(a);
      if (!is_frame(b)) out.push_back(b);
      t = T.nb[(i + 1) % 3];
      if (++guard > (int)tris_.size()) throw std::logic_error("broken fan");
    } while (t != t0 && t != -1);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    neighbors(v, out);
    return out;
  }

  // triangle whose closed region contains p (visibility walk, exact signs)
  int locate(const Vec2& p) const {
    int t = hint_;
    if (t < 0 || !alive_[t]) {
      t = -1;
      for (std::size_t i = 0; i < tris_.size(); ++i)
        if (alive_[i]) { t = (int)i; break; }
    }
    int guard = 0;
    const int limit = 4 * (int)tris_.size() + 16;
    while (true) {
      const Tri& T = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        int a = T.v[(k + 1) % 3], b = T.v[(k + 2) % 3];
        if (orient2d(pts_[a], pts_[b], p) < 0) {
          next = T.nb[k];
          break;
        }
      }
      if (next == -1) {
        hint_ = t;
        return t;
      }
      t = next;
      if (++guard > limit) return locate_scan_(p);
    }
  }

  // nearest real generator; exact-equal distances resolved to the
  // lexicographically smallest coordinates
  int nearest(const Vec2& x) const {
    if (n_real_ == 0) throw precondition_error("nearest: empty triangulation");
    int t = locate(x);
    int cur = -1;
    for (int k = 0; k < 3; ++k)
      if (!is_frame(tris_[t].v[k])) { cur = tris_[t].v[k]; break; }
    if (cur < 0) cur = 0;
    auto better = [&](int u, int v) {
      double du = dist2<2>(x, pts_[u]), dv = dist2<2>(x, pts_[v]);
      if (du != dv) return du < dv;
      return lex_less<2>(pts_[u], pts_[v]);
    };
    std::vector<int> nb;
    int guard = 0;
    for (;;) {
      neighbors(cur, nb);
      int best = cur;
      for (int u : nb)
        if (better(u, best)) best = u;
      if (best == cur) break;
      cur = best;
      if (++guard > (int)n_real_ + 8) throw std::logic_error("nearest: no descent");
    }
    // gather the full equal-distance set (connected around x) for the lex rule
    double dcur = dist2<2>(x, pts_[cur]);
    std::vector<int> stack{cur}, seen{cur};
    int ans = cur;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      neighbors(v, nb);
      for (int u : nb) {
        if (dist2<2>(x, pts_[u]) != dcur) continue;
        if (std::find(seen.begin(), seen.end(), u) != seen.end()) continue;
        seen.push_back(u);
        stack.push_back(u);
        if (lex_less<2>(pts_[u], pts_[ans])) ans = u;
      }
    }
    return ans;
  }

 private:
  Box2 window_{};
  std::size_t n_real_ = 0;
  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<char> alive_;
  std::vector<int> free_;
  std::vector<int> vert_tri_;
  mutable int hint_ = 0;
  std::uint64_t dup_skips_ = 0;
  // scratch
  std::vector<int> cav_, bfs_;
  std::vector<int> stamp_;
  int epoch_ = 0;

  int locate_scan_(const Vec2& p) const {
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!alive_[t]) continue;
      const Tri& T = tris_[t];
      bool in = true;
      for (int k = 0; k < 3 && in; ++k)
        if (orient2d(pts_[T.v[(k + 1) % 3]], pts_[T.v[(k + 2) % 3]], p) < 0)
          in = false;
      if (in) { hint_ = (int)t; return (int)t; }
    }
    throw std::logic_error("locate: point in no triangle");
  }

  int alloc_tri_() {
    if (!free_.empty()) {
      int t = free_.back();
      free_.pop_back();
      alive_[t] = 1;
      return t;
    }
    tris_.push_back({});
    alive_.push_back(1);
    return (int)tris_.size() - 1;
  }

  void insert_(int vi) {
    const Vec2 p = pts_[vi];
    int t0 = locate(p);
    for (int k = 0; k < 3; ++k)
      if (pts_[tris_[t0].v[k]] == p) {
        ++dup_skips_;
        std::clog << "vorpoly: duplicate vertex skipped during triangulation\n";
        return;
      }

    if ((int)stamp_.size() < (int)tris_.size()) stamp_.resize(tris_.size() * 2 + 8, 0);
    ++epoch_;
    auto conflict = [&](int t) {
      const Tri& T = tris_[t];
      return incircle_perturbed(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]], p) > 0;
    };

    cav_.clear();
    bfs_.clear();
    bfs_.push_back(t0);
    stamp_[t0] = epoch_;
    struct BEdge { int a, b, outer, outer_k; };
    std::vector<BEdge> ring;
    while (!bfs_.empty()) {
      int t = bfs_.back();
      bfs_.pop_back();
      cav_.push_back(t);
      const Tri T = tris_[t];
      for (int k = 0; k < 3; ++k) {
        int u = T.nb[k];
        int a = T.v[(k + 1) % 3], b = T.v[(k + 2) % 3];
        if (u != -1 && stamp_[u] == epoch_) continue;  // already queued/in
        if (u != -1 && conflict(u)) {
          stamp_[u] = epoch_;
          bfs_.push_back(u);
        } else {
          int outer_k = -1;
          if (u != -1)
            for (int j = 0; j < 3; ++j)
              if (tris_[u].nb[j] == t) outer_k = j;
          ring.push_back({a, b, u, outer_k});
        }
      }
    }

    for (int t : cav_) {
      alive_[t] = 0;
      free_.push_back(t);
    }
    // new fan around p; ring edges are CCW (cavity on the left)
    std::vector<std::pair<int, int>> tri_of_a;  // a-vertex -> new tri
    std::vector<int> created;
    created.reserve(ring.size());
    for (const BEdge& e : ring) {
      int t = alloc_tri_();
      tris_[t].v = {vi, e.a, e.b};
      tris_[t].nb = {e.outer, -1, -1};
      if (e.outer != -1) tris_[e.outer].nb[e.outer_k] = t;
      tri_of_a.emplace_back(e.a, t);
      created.push_back(t);
      vert_tri_[e.a] = t;
      vert_tri_[e.b] = t;
    }
    auto find_a = [&](int a) {
      for (auto& pr : tri_of_a)
        if (pr.first == a) return pr.second;
      throw std::logic_error("cavity ring not closed");
    };
    for (std::size_t i = 0; i < ring.size(); ++i) {
      int t = created[i];
      tris_[t].nb[1] = find_a(ring[i].b);  // across (b, p)
      // across (p, a): triangle whose b == a
      int ta = -1;
      for (std::size_t j = 0; j < ring.size(); ++j)
        if (ring[j].b == ring[i].a) { ta = created[j]; break; }
      if (ta == -1) throw std::logic_error("cavity ring not closed");
      tris_[t].nb[2] = ta;
    }
    vert_tri_[vi] = created.empty() ? -1 : created[0];
    if ((int)stamp_.size() < (int)tris_.size()) stamp_.resize(tris_.size() * 2 + 8, 0);
    hint_ = created.empty() ? hint_ : created[0];
  }
};

// Convenience: triangulate a sampled point set.
inline Triangulation delaunay(const PointSet<2>& ps) {
  return Triangulation::build(ps.pts, ps.window);
}

}  // namespace vorpoly
