#include <catch2/catch_amalgamated.hpp>

#include <climits>
#include <functional>
#include <set>

#include "oracles.hpp"
#include "vorpoly/bondperc.hpp"
#include "vorpoly/rng.hpp"

using namespace vorpoly;

static Box2 box2(double lo0, double hi0, double lo1, double hi1) {
  Box2 b;
  b.lo = {lo0, lo1};
  b.hi = {hi0, hi1};
  return b;
}

static PointSet<2> sample_half(double half, std::uint64_t seed, std::uint64_t rep) {
  Intensity<2> mu;
  return sample<2>(box2(-half, half, -half, half), mu, seed, rep);
}

TEST_CASE("edge rewards: symmetric, deterministic, correct density, key-separated") {
  PointSet<2> ps = sample_half(10, 9100, 0);
  Triangulation tr = delaunay(ps);
  auto es = tr.real_edges();
  REQUIRE(es.size() > 300);
  EdgeField f1 = make_edge_field(3, 7, 0.6);
  EdgeField f1b = make_edge_field(3, 7, 0.6);
  EdgeField f2 = make_edge_field(3, 8, 0.6);
  int ones = 0, agree = 0;
  for (auto [u, v] : es) {
    int t = f1.tau(tr.point(u), tr.point(v));
    REQUIRE((t == 0 || t == 1));
    REQUIRE(f1.tau(tr.point(v), tr.point(u)) == t);  // symmetric
    REQUIRE(f1b.tau(tr.point(u), tr.point(v)) == t); // reproducible
    ones += t;
    agree += t == f2.tau(tr.point(u), tr.point(v));
  }
  double n = (double)es.size();
  REQUIRE(std::abs(ones / n - 0.6) < 6 * std::sqrt(0.24 / n));
  double expect_agree = 0.6 * 0.6 + 0.4 * 0.4;
  REQUIRE(std::abs(agree / n - expect_agree) < 6 * std::sqrt(0.25 / n));
  REQUIRE_THROWS_AS(make_edge_field(1, 0, 1.0001), precondition_error);
}

TEST_CASE("endpoint-rooted minimal path rewards match brute-force enumeration") {
  for (std::uint64_t rep : {1, 2, 3}) {
    PointSet<2> ps = sample_half(9, 9200, rep);
    Triangulation tr = delaunay(ps);
    int root = tr.nearest(Vec2{0, 0});
    EdgeField tau = make_edge_field(11, rep, 0.55);
    const int r = 6;
    PathRewardProfile prof = min_path_reward(tr, tau, root, r);
    // oracle: explicit recursive enumeration of simple paths from root
    std::vector<int> want(r + 1, INT_MAX);
    want[1] = 0;
    std::vector<int> cur{root};
    std::function<void(int)> rec = [&](int sum) {
      if ((int)cur.size() == r) return;
      for (int u : tr.neighbors(cur.back())) {
        if (std::find(cur.begin(), cur.end(), u) != cur.end()) continue;
        int s2 = sum + tau.tau(tr.point(cur.back()), tr.point(u));
        cur.push_back(u);
        want[cur.size()] = std::min<int>(want[cur.size()], s2);
        rec(s2);
        cur.pop_back();
      }
    };
    rec(0);
    REQUIRE(prof.min_reward == want);
    for (int k = 2; k <= r; ++k) REQUIRE(prof.min_reward[k] >= prof.min_reward[k - 1]);
  }
  PointSet<2> ps = sample_half(9, 9200, 1);
  Triangulation tr = delaunay(ps);
  EdgeField tau = make_edge_field(11, 1, 0.55);
  REQUIRE_THROWS_AS(min_path_reward(tr, tau, 0, 11), precondition_error);
}

TEST_CASE("good boxes: full neighborhood with all-ones rewards is good") {
  const double L = 3.0;
  const Box2 w = box2(-12, 12, -12, 12);
  std::vector<IVec2> blocks;
  for (int dx = -2; dx <= 2; ++dx)
    for (int dy = -2; dy <= 2; ++dy) blocks.push_back(IVec2{dx, dy});
  PointSet<2> ps = sample_given_full_blocks<2>(w, 1.0, 9300, 0, L, blocks);
  Triangulation tr = delaunay(ps);
  auto occ = BlockOccupancy<2>::build(ps.pts, L);
  for (const IVec2& z : blocks) REQUIRE(occ.full_block(z));

  EdgeField ones = make_edge_field(13, 0, 1.0);  // every edge pays 1
  GoodBoxField zf(tr, occ, ones, L);
  REQUIRE(zf.open(IVec2{0, 0}));
  REQUIRE(zf.open(IVec2{0, 0}));  // memoized second call agrees
  // a block whose 5x5 neighborhood is not conditioned full is not good
  REQUIRE_FALSE(zf.open(IVec2{3, 0}));

  EdgeField zeros = make_edge_field(13, 0, 0.0);  // every edge pays 0
  GoodBoxField zf0(tr, occ, zeros, L);
  REQUIRE_FALSE(zf0.open(IVec2{0, 0}));  // the annulus is crossed for free
}

TEST_CASE("good-box evaluation near the window edge is a reported error") {
  // occupancy handcrafted to claim full blocks right up to the window edge
  const double L = 3.0;
  const Box2 w = box2(-11, 11, -11, 11);
  PointSet<2> ps = sample_half(11, 9400, 0);
  Triangulation tr = delaunay(ps);
  const int m = block_subdivisions(2);
  std::vector<Vec2> dense;
  for (int bx = -4; bx <= 4; ++bx)
    for (int by = -4; by <= 4; ++by)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          dense.push_back(Vec2{L * bx - L / 2 + (i + 0.5) * L / m,
                               L * by - L / 2 + (j + 0.5) * L / m});
  auto occ = BlockOccupancy<2>::build(dense, L);
  EdgeField tau = make_edge_field(17, 0, 0.5);
  GoodBoxField zf(tr, occ, tau, L);
  // z = (2,0): outer box reaches 10.5 > 11 - L/2 = 9.5
  REQUIRE_THROWS_AS(zf.open(IVec2{2, 0}), precondition_error);
}

TEST_CASE("disjoint-pieces accounting along a concrete crossing path") {
  const double L = 3.0;
  const Box2 w = box2(-12, 12, -12, 12);
  std::vector<IVec2> blocks;
  for (int dx = -2; dx <= 2; ++dx)
    for (int dy = -2; dy <= 2; ++dy) blocks.push_back(IVec2{dx, dy});
  PointSet<2> ps = sample_given_full_blocks<2>(w, 1.0, 9500, 0, L, blocks);
  Triangulation tr = delaunay(ps);
  auto occ = BlockOccupancy<2>::build(ps.pts, L);
  EdgeField ones = make_edge_field(19, 0, 1.0);
  GoodBoxField zf(tr, occ, ones, L);
  std::vector<int> path = segment_path(tr, Vec2{-6, 0}, Vec2{6, 0});
  REQUIRE(path.size() >= 3);
  PiecesReport rep = verify_disjoint_pieces(tr, zf, ones, path, L);
  REQUIRE(rep.sum_tau == (int)path.size() - 1);  // all edges pay 1
  REQUIRE(rep.boxes >= 3);                       // spans at least x boxes -2..2? no: >= 3
  // only (0,0) can have a fully conditioned 5x5 neighborhood
  REQUIRE(rep.z_good == 1);
  REQUIRE(rep.z_cross == 1);  // the path pierces its annulus end to end
  REQUIRE(rep.raw_applicable);
  REQUIRE(rep.rhs_cross == Catch::Approx(1.0 / 16.0));
  REQUIRE(rep.rhs_raw == Catch::Approx(1.0 / 16.0));
  REQUIRE(rep.ok);

  // zero-reward field: no good boxes at all, inequality trivially tight
  EdgeField zeros = make_edge_field(19, 0, 0.0);
  GoodBoxField zf0(tr, occ, zeros, L);
  PiecesReport rep0 = verify_disjoint_pieces(tr, zf0, zeros, path, L);
  REQUIRE(rep0.sum_tau == 0);
  REQUIRE(rep0.z_good == 0);
  REQUIRE(rep0.z_cross == 0);
  REQUIRE(rep0.ok);
}
