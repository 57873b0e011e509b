#pragma once

// Monte Carlo experiment harness: named tail-probability experiments over
// random Voronoi tessellations, a fixed CSV output schema, deterministic
// replicate streams (byte-identical reruns for the same config and seed), a
// small worker pool with an ordered reduce, and the closed-form verification
// suites used by the `verify` CLI subcommand.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "blocks.hpp"
#include "bondperc.hpp"
#include "core.hpp"
#include "delaunay.hpp"
#include "lattice.hpp"
#include "modified.hpp"
#include "percolation.hpp"
#include "polyomino.hpp"
#include "ppp.hpp"
#include "stats.hpp"

#include "json.hpp"

namespace vorpoly {

// ---------------------------------------------------------------------------
// configuration

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"t1-min",     "t1-max",     "t2-inverse",
                                               "c1-paths",   "c2-segment", "thm4-reward"};
  return ids;
}

struct ExperimentConfig {
  int schema_version = 1;
  std::string experiment;  // one of experiment_ids()
  int d = 2;
  double lambda = 1.0;
  std::uint64_t n = 0;   // density-regularised model parameter; 0 = plain model
  double delta = 0.5;
  std::vector<int> r_grid;  // tile / box-count thresholds
  std::vector<int> s_grid;  // size / radius / reward thresholds
  double p = 0.9;           // edge-reward parameter (thm4-reward only)
  std::uint64_t replicates = 1000;
  std::uint64_t seed = 1;
  double margin = 0;  // window padding beyond the statistic's extent; 0 = default policy

  void validate() const {
    const auto& ids = experiment_ids();
    if (std::find(ids.begin(), ids.end(), experiment) == ids.end())
      throw precondition_error("config: unknown experiment id '" + experiment + "'");
    if (schema_version != 1) throw precondition_error("config: unsupported schema_version");
    if (d != 2) throw precondition_error("config: only d = 2 experiments are available");
    if (!(lambda > 0)) throw precondition_error("config: lambda must be positive");
    if (r_grid.empty() || s_grid.empty())
      throw precondition_error("config: r_grid and s_grid must be nonempty");
    if (replicates < 100) throw precondition_error("config: replicates must be >= 100");
    if (!(p >= 0 && p <= 1)) throw precondition_error("config: p outside [0,1]");
    if (!(delta > 0 && delta < 1)) throw precondition_error("config: delta outside (0,1)");
    for (int r : r_grid)
      if (r < 1) throw precondition_error("config: r values must be >= 1");
    for (int s : s_grid)
      if (s < 0) throw precondition_error("config: s values must be >= 0");
    if (experiment == "thm4-reward") {
      for (int r : r_grid)
        if (r > 10) throw precondition_error("config: thm4-reward r grid capped at 10");
    } else if (experiment != "t1-min") {
      for (int r : r_grid)
        if (r > 8 && experiment != "t2-inverse" && experiment != "c2-segment")
          throw precondition_error("config: r grid capped at 8 for exhaustive statistics");
    }
    if (experiment == "t1-min" || experiment == "c1-paths" || experiment == "t2-inverse") {
      for (int s : s_grid)
        if (s > animal_exact_guard(2))
          throw precondition_error("config: s grid capped at the animal guard");
    }
  }

  static ExperimentConfig from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentConfig c;
    c.schema_version = j.value("schema_version", 1);
    c.experiment = j.at("experiment").get<std::string>();
    c.d = j.value("d", 2);
    c.lambda = j.value("lambda", 1.0);
    c.n = j.value("n", (std::uint64_t)0);
    c.delta = j.value("delta", 0.5);
    c.r_grid = j.value("r_grid", std::vector<int>{});
    c.s_grid = j.value("s_grid", std::vector<int>{});
    c.p = j.value("p", 0.9);
    c.replicates = j.value("replicates", (std::uint64_t)1000);
    c.seed = j.value("seed", (std::uint64_t)1);
    c.margin = j.value("margin", 0.0);
    c.validate();
    return c;
  }

  std::string to_json_text() const {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["experiment"] = experiment;
    j["d"] = d;
    j["lambda"] = lambda;
    j["n"] = n;
    j["delta"] = delta;
    j["r_grid"] = r_grid;
    j["s_grid"] = s_grid;
    j["p"] = p;
    j["replicates"] = replicates;
    j["seed"] = seed;
    j["margin"] = margin;
    return j.dump(2);
  }
};

// ---------------------------------------------------------------------------
// CSV rows

struct ResultRow {
  std::string experiment;
  int d = 2;
  double lambda = 1.0;
  std::optional<double> L;
  std::optional<std::uint64_t> n;
  std::optional<double> delta;
  std::optional<int> r;
  std::optional<int> s;
  std::optional<double> p;
  TailEstimate est;
};

inline std::string csv_header() {
  return "experiment,d,lambda,L,n,delta,r,s,p,hits,n_rep,p_hat,ci_lo,ci_hi,bound,pass,"
         "censored";
}

namespace detail {
inline std::string fmt_num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}
}  // namespace detail

inline std::string format_row(const ResultRow& row) {
  using detail::fmt_num;
  std::ostringstream os;
  os << row.experiment << ',' << row.d << ',' << fmt_num(row.lambda) << ',';
  if (row.L) os << fmt_num(*row.L);
  os << ',';
  if (row.n) os << *row.n;
  os << ',';
  if (row.delta) os << fmt_num(*row.delta);
  os << ',';
  if (row.r) os << *row.r;
  os << ',';
  if (row.s) os << *row.s;
  os << ',';
  if (row.p) os << fmt_num(*row.p);
  os << ',';
  os << row.est.hits << ',' << row.est.n << ',' << fmt_num(row.est.p_hat) << ','
     << fmt_num(row.est.ci.lo) << ',' << fmt_num(row.est.ci.hi) << ',';
  if (row.est.has_bound) os << fmt_num(row.est.bound);
  os << ',';
  if (row.est.has_bound) os << (row.est.pass ? 1 : 0);
  os << ',' << row.est.censored;
  return os.str();
}

// Parse one CSV line produced by format_row (used by the `fit` subcommand).
inline std::optional<ResultRow> parse_row(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      f.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  f.push_back(cur);
  if (f.size() != 17 || f[0] == "experiment") return std::nullopt;
  ResultRow row;
  row.experiment = f[0];
  row.d = std::atoi(f[1].c_str());
  row.lambda = std::atof(f[2].c_str());
  if (!f[3].empty()) row.L = std::atof(f[3].c_str());
  if (!f[4].empty()) row.n = (std::uint64_t)std::strtoull(f[4].c_str(), nullptr, 10);
  if (!f[5].empty()) row.delta = std::atof(f[5].c_str());
  if (!f[6].empty()) row.r = std::atoi(f[6].c_str());
  if (!f[7].empty()) row.s = std::atoi(f[7].c_str());
  if (!f[8].empty()) row.p = std::atof(f[8].c_str());
  std::uint64_t hits = std::strtoull(f[9].c_str(), nullptr, 10);
  std::uint64_t n_rep = std::strtoull(f[10].c_str(), nullptr, 10);
  std::uint64_t cens = std::strtoull(f[16].c_str(), nullptr, 10);
  row.est = make_tail_estimate(hits, n_rep, cens);
  if (!f[14].empty()) apply_bound(row.est, std::atof(f[14].c_str()));
  return row;
}

// ---------------------------------------------------------------------------
// replicate scheduling

struct RepOutcome {
  std::vector<char> hit;  // one flag per result row
  bool censored = false;
  std::uint32_t invariant_checks = 0;
  std::uint32_t invariant_violations = 0;
};

namespace detail {

inline std::atomic<bool>* g_abort_flag = nullptr;

inline int worker_count() {
  if (const char* s = std::getenv("VORPOLY_WORKERS")) {
    int w = std::atoi(s);
    if (w > 0) return w;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? (int)hc : 1;
}

// Runs fn(rep) for rep = 0..n-1 on the worker pool. Results land in a slot
// per replicate, so the reduce order never depends on scheduling. A set
// abort flag stops the sweep early; `completed` marks which slots are valid.
template <class Fn>
std::vector<RepOutcome> run_replicates(std::uint64_t n, std::vector<char>& completed,
                                       Fn&& fn) {
  std::vector<RepOutcome> out(n);
  completed.assign(n, 0);
  int workers = worker_count();
  auto should_abort = [] {
    return g_abort_flag && g_abort_flag->load(std::memory_order_relaxed);
  };
  if (workers <= 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) {
      if (should_abort()) break;
      out[i] = fn(i);
      completed[i] = 1;
    }
    return out;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto work = [&] {
    while (true) {
      std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n || should_abort()) return;
      try {
        out[i] = fn(i);
        completed[i] = 1;
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

inline std::unordered_map<IVec2, int, ivec_hash> box_count_map(const PointSet<2>& ps,
                                                              double side) {
  std::unordered_map<IVec2, int, ivec_hash> m;
  for (const Vec2& p : ps.pts) ++m[box_index_of<2>(p, side)];
  return m;
}

}  // namespace detail

inline void set_abort_flag(std::atomic<bool>* flag) { detail::g_abort_flag = flag; }

// ---------------------------------------------------------------------------
// run result

struct RunResult {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  std::uint64_t completed = 0;
  std::uint64_t censored = 0;
  std::uint64_t invariant_checks = 0;
  std::uint64_t invariant_violations = 0;
  bool interrupted = false;
  bool ok = true;  // censor fraction <= 5%, all bounded rows pass, no violations
  std::string message;
};

namespace detail {

inline Box2 centered_window(double half) {
  return Box2{{-half, -half}, {half, half}};
}

// window half-width for a statistic reaching `extent` from the origin; the
// default pad keeps window-boundary censoring negligible
inline double half_width(const ExperimentConfig& cfg, double extent) {
  double pad = cfg.margin > 0 ? cfg.margin : 18.0;
  double half = extent + pad;
  if (cfg.n > 0) {
    // the density-regularised rebuild needs a window aligned to its sub-grid
    double sub = ModifiedLayout::make(cfg.n, cfg.delta).sub_side;
    half = std::ceil(half / sub - 1e-9) * sub;
  }
  return half;
}

inline PointSet<2> sample_model(const ExperimentConfig& cfg, const Box2& window,
                                std::uint64_t rep) {
  Intensity<2> mu;
  mu.lambda = cfg.lambda;
  PointSet<2> ps = sample<2>(window, mu, cfg.seed, rep);
  if (cfg.n > 0) ps = build_modified(ps, cfg.n, cfg.delta);
  return ps;
}

// threshold above which the tail bound exp(-r/2) applies to the minimal
// box-count statistic: r >= 2 (log alpha + c_mu (e - 1)) s
inline double min_cover_bound_threshold(double lambda, int s) {
  double c_mu = std::max(lambda, 1.0 / lambda);
  return 2.0 * (std::log(animal_growth_alpha(2)) + c_mu * (std::exp(1.0) - 1.0)) * s;
}

struct InvariantTally {
  std::atomic<std::uint64_t> checks{0};
  std::atomic<std::uint64_t> violations{0};
};

// Shared sanity checks on a witness tile set: tile count bounded by the
// total point count of the boxes it meets, and box counts at coarser side
// S obeying |A_S| <= |A_1| <= S^2 |A_S|.
inline void witness_invariants(const Triangulation& tr, const PointSet<2>& ps,
                               CellBoxCache& cache1, const std::vector<int>& witness,
                               RepOutcome& rep) {
  if (witness.empty()) return;
  try {
    auto counts = box_count_map(ps, 1.0);
    ++rep.invariant_checks;
    if (!cover_sandwich_holds(cache1, witness, counts)) ++rep.invariant_violations;
    std::vector<IVec2> u1, merged;
    for (int v : witness) {
      merge_sorted(u1, cache1.boxes(v), merged);
      u1.swap(merged);
    }
    std::size_t n1 = u1.size();
    // odd sides only: centered side-S boxes decompose into unit boxes (and
    // the S^2 sandwich is exact) exactly when S is odd
    for (double S : {3.0, 5.0}) {
      CellBoxCache cs(tr, S);
      std::vector<IVec2> uS, mS;
      for (int v : witness) {
        merge_sorted(uS, cs.boxes(v), mS);
        uS.swap(mS);
      }
      ++rep.invariant_checks;
      if (!(uS.size() <= n1 && n1 <= (std::size_t)(S * S) * uS.size()))
        ++rep.invariant_violations;
    }
  } catch (const censored_error&) {
    // witness cells clipped by the window; skip the check, the replicate's
    // main statistic decides censoring on its own
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// individual experiments (one RepOutcome per replicate; row order fixed)

namespace detail {

// t1-min with r within the exhaustive guard: minimal box count over
// connected tile sets of exactly r tiles containing the origin's tile
inline RepOutcome rep_t1_min_geometry(const ExperimentConfig& cfg, const Box2& window,
                                      int r_max, std::uint64_t rep) {
  RepOutcome out;
  out.hit.assign(cfg.r_grid.size() * cfg.s_grid.size(), 0);
  try {
    PointSet<2> ps = sample_model(cfg, window, rep);
    Triangulation tr = delaunay(ps);
    int v0 = tr.nearest(Vec2{0.0, 0.0});
    CellBoxCache cache(tr, 1.0);
    std::vector<int> prof = min_boxes_profile(cache, {v0}, r_max);
    std::size_t j = 0;
    for (int s : cfg.s_grid)
      for (int r : cfg.r_grid) out.hit[j++] = prof[r] <= s ? 1 : 0;
    if (rep % 8 == 0) {
      CoverStat w = min_boxes_over_polyominoes(cache, {v0}, r_max);
      witness_invariants(tr, ps, cache, w.witness, out);
    }
  } catch (const censored_error&) {
    out.censored = true;
  }
  return out;
}

// t1-min beyond the guard: the box-count statistic is replaced by its
// upper-bounding occupation sum max over animals A of size <= s of the total
// point count of A, which dominates the event and carries the same bound.
// Box counts are independent Poisson(lambda) draws keyed per box.
inline RepOutcome rep_t1_min_surrogate(const ExperimentConfig& cfg, std::uint64_t rep) {
  RepOutcome out;
  out.hit.assign(cfg.r_grid.size() * cfg.s_grid.size(), 0);
  std::unordered_map<IVec2, std::uint64_t, ivec_hash> counts;
  auto count_of = [&](const IVec2& z) {
    auto it = counts.find(z);
    if (it != counts.end()) return it->second;
    Rng rng = Rng::keyed({cfg.seed, rep, stream_tag::aux, 11, (std::uint64_t)(std::int64_t)z[0],
                          (std::uint64_t)(std::int64_t)z[1]});
    std::uint64_t c = rng.poisson(cfg.lambda);
    counts.emplace(z, c);
    return c;
  };
  std::size_t j = 0;
  for (int s : cfg.s_grid) {
    std::uint64_t best = 0;
    enumerate_animals_containing<2>(IVec2{0, 0}, s, [&](const std::vector<IVec2>& members) {
      std::uint64_t total = 0;
      for (const IVec2& z : members) total += count_of(z);
      best = std::max(best, total);
    });
    for (int r : cfg.r_grid) out.hit[j++] = best >= (std::uint64_t)r ? 1 : 0;
  }
  return out;
}

// t1-max: maximal box count over connected tile sets of exactly r tiles
// containing the origin's tile, swept over the s grid
inline RepOutcome rep_t1_max(const ExperimentConfig& cfg, const Box2& window, int r,
                             std::uint64_t rep) {
  RepOutcome out;
  out.hit.assign(cfg.s_grid.size(), 0);
  try {
    PointSet<2> ps = sample_model(cfg, window, rep);
    Triangulation tr = delaunay(ps);
    int v0 = tr.nearest(Vec2{0.0, 0.0});
    CellBoxCache cache(tr, 1.0);
    int per_cell = max_boxes_per_cell_near(cache, {v0}, r - 1);
    std::vector<int> prof = max_boxes_profile(cache, {v0}, r, per_cell);
    std::size_t j = 0;
    for (int s : cfg.s_grid) out.hit[j++] = prof[r] >= s ? 1 : 0;
    if (rep % 8 == 0) {
      CoverStat w = max_boxes_over_polyominoes(cache, {v0}, r, per_cell);
      witness_invariants(tr, ps, cache, w.witness, out);
    }
  } catch (const censored_error&) {
    out.censored = true;
  }
  return out;
}

// t2-inverse: tile count of the inverse cover, maximised over box animals of
// size <= s containing the origin's box
inline RepOutcome rep_t2_inverse(const ExperimentConfig& cfg, const Box2& window,
                                 std::uint64_t rep) {
  RepOutcome out;
  out.hit.assign(cfg.r_grid.size() * cfg.s_grid.size(), 0);
  try {
    PointSet<2> ps = sample_model(cfg, window, rep);
    Triangulation tr = delaunay(ps);
    CellBoxCache cache(tr, 1.0);
    std::size_t j = 0;
    for (int s : cfg.s_grid) {
      std::size_t best = 0;
      std::vector<int> best_tiles;
      enumerate_animals_containing<2>(IVec2{0, 0}, s, [&](const std::vector<IVec2>& members) {
        Animal<2> a(members);
        canonicalize<2>(a);
        std::vector<int> tiles = tiles_meeting_animal(cache, a);
        if (tiles.size() > best) {
          best = tiles.size();
          best_tiles = tiles;
        }
      });
      for (int r : cfg.r_grid) out.hit[j++] = best >= (std::size_t)r ? 1 : 0;
      if (rep % 8 == 0 && !best_tiles.empty()) {
        ++out.invariant_checks;
        if (!tiles_connected(tr, best_tiles)) ++out.invariant_violations;
        witness_invariants(tr, ps, cache, best_tiles, out);
      }
    }
  } catch (const censored_error&) {
    out.censored = true;
  }
  return out;
}

// c1-paths: minimal box count over self-avoiding tile paths of exactly r
// tiles through the origin's tile
inline RepOutcome rep_c1_paths(const ExperimentConfig& cfg, const Box2& window, int r_max,
                               std::uint64_t rep) {
  RepOutcome out;
  out.hit.assign(cfg.r_grid.size() * cfg.s_grid.size(), 0);
  try {
    PointSet<2> ps = sample_model(cfg, window, rep);
    Triangulation tr = delaunay(ps);
    int v0 = tr.nearest(Vec2{0.0, 0.0});
    CellBoxCache cache(tr, 1.0);
    std::vector<int> prof = min_boxes_saw_profile(cache, v0, r_max);
    std::size_t j = 0;
    for (int s : cfg.s_grid)
      for (int r : cfg.r_grid) out.hit[j++] = prof[r] <= s ? 1 : 0;
    if (rep % 8 == 0) {
      // every r-tile path is an r-tile connected set, so the unrestricted
      // minimum can never exceed the path minimum
      std::vector<int> lower = min_boxes_profile(cache, {v0}, r_max);
      for (int r : cfg.r_grid) {
        ++out.invariant_checks;
        if (lower[r] > prof[r]) ++out.invariant_violations;
      }
    }
  } catch (const censored_error&) {
    out.censored = true;
  }
  return out;
}

// c2-segment: tile count of the straight-segment walk from the origin,
// maximised over a fan of directions at radius s
inline RepOutcome rep_c2_segment(const ExperimentConfig& cfg, const Box2& window, int s,
                                 std::uint64_t rep) {
  RepOutcome out;
  out.hit.assign(cfg.r_grid.size(), 0);
  try {
    PointSet<2> ps = sample_model(cfg, window, rep);
    Triangulation tr = delaunay(ps);
    std::size_t best = 0;
    const int dirs = 16;
    for (int k = 0; k < dirs; ++k) {
      double th = 2.0 * 3.14159265358979323846 * (k + 0.125) / dirs;
      Vec2 y{s * std::cos(th), s * std::sin(th)};
      std::vector<int> path = segment_path(tr, Vec2{0.0, 0.0}, y);
      best = std::max(best, path.size());
      if (rep % 16 == 0) {
        // the walk must be self-avoiding with Delaunay-adjacent steps
        ++out.invariant_checks;
        bool ok = true;
        std::vector<int> sorted(path);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) ok = false;
        std::vector<int> nb;
        for (std::size_t i = 0; ok && i + 1 < path.size(); ++i) {
          tr.neighbors(path[i], nb);
          if (std::find(nb.begin(), nb.end(), path[i + 1]) == nb.end()) ok = false;
        }
        if (!ok) ++out.invariant_violations;
      }
    }
    std::size_t j = 0;
    for (int r : cfg.r_grid) out.hit[j++] = best >= (std::size_t)r ? 1 : 0;
  } catch (const censored_error&) {
    out.censored = true;
  }
  return out;
}

// minimal edge-reward sum over self-avoiding paths *through* the root with
// exactly k vertices (root allowed anywhere on the path); two-arm DFS with
// strict monotone pruning as in min_boxes_saw_profile
inline std::vector<int> min_reward_through_profile(const Triangulation& tr,
                                                   const EdgeField& tau, int root,
                                                   int r_max) {
  std::vector<int> best(r_max + 1, std::numeric_limits<int>::max());
  best[1] = 0;
  std::vector<char> used(tr.n_real(), 0);
  used[root] = 1;
  int depth = 1;
  int sum = 0;
  // arm 2 may only start with a generator id above arm 1's first cell, so
  // each two-armed path is enumerated under exactly one arm labeling
  auto dfs = [&](auto&& self, int tip1, int tip2, bool arm1_frozen,
                 int arm1_first) -> void {
    if (depth >= r_max) return;
    std::vector<int> nb;
    auto grow = [&](int tip, bool freeze) {
      tr.neighbors(tip, nb);
      std::vector<int> order(nb);
      for (int u : order) {
        if (used[u]) continue;
        if (freeze && tip == root && u < arm1_first) continue;
        int w = tau.tau(tr.point(tip), tr.point(u));
        int ns = sum + w;
        if (best[r_max] != std::numeric_limits<int>::max() && ns > best[r_max]) continue;
        used[u] = 1;
        sum = ns;
        ++depth;
        best[depth] = std::min(best[depth], sum);
        if (freeze)
          self(self, tip1, u, true, arm1_first);
        else
          self(self, u, tip2, false, arm1_first < 0 ? u : arm1_first);
        --depth;
        sum -= w;
        used[u] = 0;
      }
    };
    if (!arm1_frozen) grow(tip1, false);
    if (arm1_frozen || tip1 != root) grow(tip2, true);
  };
  dfs(dfs, root, root, false, -1);
  return best;
}

// thm4-reward: minimal total edge reward over self-avoiding tile paths
// through the origin's tile with exactly r tiles
inline RepOutcome rep_thm4_reward(const ExperimentConfig& cfg, const Box2& window, int r_max,
                                  std::uint64_t rep) {
  RepOutcome out;
  out.hit.assign(cfg.r_grid.size() * cfg.s_grid.size(), 0);
  try {
    PointSet<2> ps = sample_model(cfg, window, rep);
    Triangulation tr = delaunay(ps);
    int v0 = tr.nearest(Vec2{0.0, 0.0});
    EdgeField tau = make_edge_field(cfg.seed, rep, cfg.p);
    std::vector<int> prof = min_reward_through_profile(tr, tau, v0, r_max);
    std::size_t j = 0;
    for (int s : cfg.s_grid)
      for (int r : cfg.r_grid) out.hit[j++] = prof[r] <= s ? 1 : 0;
    if (rep % 8 == 0) {
      // the through-path minimum never exceeds the endpoint-rooted minimum
      PathRewardProfile ep = min_path_reward(tr, tau, v0, r_max);
      for (int r : cfg.r_grid) {
        ++out.invariant_checks;
        if (prof[r] > ep.min_reward[r]) ++out.invariant_violations;
      }
    }
  } catch (const censored_error&) {
    out.censored = true;
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// experiment driver

inline RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RunResult res;
  res.config = cfg;

  int r_max = *std::max_element(cfg.r_grid.begin(), cfg.r_grid.end());
  int s_max = *std::max_element(cfg.s_grid.begin(), cfg.s_grid.end());

  std::function<RepOutcome(std::uint64_t)> fn;
  // row metadata in the same order the runners fill `hit`
  std::vector<ResultRow> rows;
  auto base_row = [&](std::optional<int> r, std::optional<int> s) {
    ResultRow row;
    row.experiment = cfg.experiment;
    row.d = cfg.d;
    row.lambda = cfg.lambda;
    if (cfg.n > 0) {
      row.n = cfg.n;
      row.delta = cfg.delta;
    }
    row.r = r;
    row.s = s;
    if (cfg.experiment == "thm4-reward") row.p = cfg.p;
    rows.push_back(row);
  };

  if (cfg.experiment == "t1-min") {
    bool exhaustive = r_max <= animal_exact_guard(2);
    for (int s : cfg.s_grid)
      for (int r : cfg.r_grid) base_row(r, s);
    if (exhaustive) {
      Box2 window = detail::centered_window(detail::half_width(cfg, 0.0));
      fn = [cfg, window, r_max](std::uint64_t rep) {
        return detail::rep_t1_min_geometry(cfg, window, r_max, rep);
      };
    } else {
      if (cfg.n > 0)
        throw precondition_error(
            "t1-min: r beyond the exhaustive guard uses the box-occupation form, which has "
            "no density-regularised variant");
      fn = [cfg](std::uint64_t rep) { return detail::rep_t1_min_surrogate(cfg, rep); };
    }
  } else if (cfg.experiment == "t1-max") {
    int r = cfg.r_grid.front();
    if (r > animal_exact_guard(2))
      throw precondition_error("t1-max: r exceeds the exhaustive guard");
    for (int s : cfg.s_grid) base_row(r, s);
    Box2 window = detail::centered_window(detail::half_width(cfg, 0.0));
    fn = [cfg, window, r](std::uint64_t rep) {
      return detail::rep_t1_max(cfg, window, r, rep);
    };
  } else if (cfg.experiment == "t2-inverse") {
    for (int s : cfg.s_grid)
      for (int r : cfg.r_grid) base_row(r, s);
    Box2 window = detail::centered_window(detail::half_width(cfg, 0.5 * s_max + 0.5));
    fn = [cfg, window](std::uint64_t rep) {
      return detail::rep_t2_inverse(cfg, window, rep);
    };
  } else if (cfg.experiment == "c1-paths") {
    if (r_max > animal_exact_guard(2))
      throw precondition_error("c1-paths: r exceeds the exhaustive guard");
    for (int s : cfg.s_grid)
      for (int r : cfg.r_grid) base_row(r, s);
    Box2 window = detail::centered_window(detail::half_width(cfg, 0.0));
    fn = [cfg, window, r_max](std::uint64_t rep) {
      return detail::rep_c1_paths(cfg, window, r_max, rep);
    };
  } else if (cfg.experiment == "c2-segment") {
    int s = cfg.s_grid.front();
    for (int r : cfg.r_grid) base_row(r, s);
    Box2 window = detail::centered_window(detail::half_width(cfg, (double)s));
    fn = [cfg, window, s](std::uint64_t rep) {
      return detail::rep_c2_segment(cfg, window, s, rep);
    };
  } else {  // thm4-reward
    for (int s : cfg.s_grid)
      for (int r : cfg.r_grid) base_row(r, s);
    Box2 window = detail::centered_window(detail::half_width(cfg, 0.0));
    fn = [cfg, window, r_max](std::uint64_t rep) {
      return detail::rep_thm4_reward(cfg, window, r_max, rep);
    };
  }

  std::vector<char> completed;
  std::vector<RepOutcome> outs = detail::run_replicates(cfg.replicates, completed, fn);

  std::vector<std::uint64_t> hits(rows.size(), 0);
  std::uint64_t n_eff = 0, censored = 0;
  for (std::uint64_t i = 0; i < outs.size(); ++i) {
    if (!completed[i]) {
      res.interrupted = true;
      continue;
    }
    ++res.completed;
    const RepOutcome& o = outs[i];
    res.invariant_checks += o.invariant_checks;
    res.invariant_violations += o.invariant_violations;
    if (o.censored) {
      ++censored;
      continue;
    }
    ++n_eff;
    for (std::size_t j = 0; j < rows.size() && j < o.hit.size(); ++j)
      if (o.hit[j]) ++hits[j];
  }
  res.censored = censored;

  for (std::size_t j = 0; j < rows.size(); ++j) {
    rows[j].est = make_tail_estimate(hits[j], n_eff, censored);
    // the exp(-r/2) bound applies to the minimal-cover statistic once
    // r >= 2 (log alpha + c_mu (e-1)) s
    if (cfg.experiment == "t1-min" && rows[j].r && rows[j].s &&
        (double)*rows[j].r >= detail::min_cover_bound_threshold(cfg.lambda, *rows[j].s)) {
      apply_bound(rows[j].est, std::exp(-0.5 * *rows[j].r));
    }
  }
  res.rows = rows;

  double cens_frac = res.completed ? (double)censored / (double)res.completed : 0.0;
  std::ostringstream msg;
  if (res.interrupted) {
    res.ok = false;
    msg << "interrupted after " << res.completed << " replicates; ";
  }
  if (cens_frac > 0.05) {
    res.ok = false;
    msg << "censored fraction " << cens_frac << " exceeds 5%; ";
  }
  if (res.invariant_violations > 0) {
    res.ok = false;
    msg << res.invariant_violations << " invariant violations; ";
  }
  for (const ResultRow& row : res.rows)
    if (row.est.has_bound && !row.est.pass) {
      res.ok = false;
      msg << "bound exceeded at r=" << row.r.value_or(-1) << "; ";
      break;
    }
  res.message = msg.str();
  return res;
}

// ---------------------------------------------------------------------------
// decay fits over result rows

struct GroupFit {
  std::string label;
  char axis = 'r';
  DecayFit fit;
  std::size_t grid_points = 0;
  std::size_t positive_points = 0;
  bool below_resolution = false;  // every estimate in the group is zero
};

inline std::vector<GroupFit> fit_rows(const std::vector<ResultRow>& rows) {
  // group by everything except r; if a group is degenerate in r, regroup the
  // leftovers by everything except s
  auto key_except = [](const ResultRow& row, char axis) {
    std::ostringstream k;
    k << row.experiment << "|n=" << (row.n ? std::to_string(*row.n) : "-")
      << "|lambda=" << row.lambda;
    if (row.p) k << "|p=" << *row.p;
    if (axis == 'r')
      k << "|s=" << (row.s ? std::to_string(*row.s) : "-");
    else
      k << "|r=" << (row.r ? std::to_string(*row.r) : "-");
    return k.str();
  };
  std::vector<GroupFit> fits;
  for (char axis : {'r', 's'}) {
    std::unordered_map<std::string, std::vector<const ResultRow*>> groups;
    std::vector<std::string> order;
    for (const ResultRow& row : rows) {
      if (axis == 'r' && !row.r) continue;
      if (axis == 's' && !row.s) continue;
      std::string k = key_except(row, axis);
      if (!groups.count(k)) order.push_back(k);
      groups[k].push_back(&row);
    }
    for (const std::string& k : order) {
      const auto& g = groups[k];
      std::vector<int> xs;
      for (const ResultRow* row : g) xs.push_back(axis == 'r' ? *row->r : *row->s);
      std::sort(xs.begin(), xs.end());
      xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
      if (xs.size() < 2) continue;  // nothing to fit along this axis
      if (axis == 's') {
        // only fit over s when the r direction was degenerate for this group
        std::vector<int> rs;
        for (const ResultRow* row : g)
          if (row->r) rs.push_back(*row->r);
        std::sort(rs.begin(), rs.end());
        rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
        if (rs.size() > 1) continue;
      }
      GroupFit gf;
      gf.label = k;
      gf.axis = axis;
      gf.grid_points = g.size();
      std::vector<double> x, p;
      for (const ResultRow* row : g) {
        x.push_back(axis == 'r' ? (double)*row->r : (double)*row->s);
        p.push_back(row->est.p_hat);
        if (row->est.p_hat > 0) ++gf.positive_points;
      }
      gf.below_resolution = gf.positive_points == 0;
      gf.fit = fit_decay(x, p);
      fits.push_back(gf);
    }
  }
  return fits;
}

// ---------------------------------------------------------------------------
// closed-form verification suites (`verify` subcommand)

struct SuiteResult {
  std::string name;
  bool ok = true;
  std::uint64_t passed = 0;  // individual checks that held
  std::uint64_t total = 0;
  std::vector<std::string> lines;
};

// Full-box probability: Monte Carlo CI must contain the closed form
// 1 - (1 - e^{-lambda (L/m)^2})^{m^2}, and the closed form must respect the
// m^2 e^{-(L/m)^2 / c_mu} bound.
inline SuiteResult verify_full_box(std::uint64_t seed, double lambda, double L,
                                   std::uint64_t replicates) {
  SuiteResult sr;
  sr.name = "full-box";
  const int m = block_subdivisions(2);
  double exact_not_full = 1.0 - full_block_probability(lambda, L, 2);
  double c_mu = std::max(lambda, 1.0 / lambda);
  double bound = not_full_block_bound(c_mu, L, 2);
  std::uint64_t hits = 0;
  double sub = L / m;
  for (std::uint64_t rep = 0; rep < replicates; ++rep) {
    Rng rng = Rng::keyed({seed, rep, stream_tag::points, 2, 55});
    std::uint64_t n = rng.poisson(lambda * L * L);
    std::vector<char> occ(m * m, 0);
    for (std::uint64_t k = 0; k < n; ++k) {
      double x = rng.uniform(0.0, L), y = rng.uniform(0.0, L);
      int ix = std::min(m - 1, (int)(x / sub)), iy = std::min(m - 1, (int)(y / sub));
      occ[ix * m + iy] = 1;
    }
    bool full = true;
    for (char c : occ)
      if (!c) {
        full = false;
        break;
      }
    if (!full) ++hits;
  }
  TailEstimate est = make_tail_estimate(hits, replicates);
  bool ci_ok = est.ci.lo <= exact_not_full && exact_not_full <= est.ci.hi;
  bool bound_ok = exact_not_full <= bound;
  sr.ok = ci_ok && bound_ok;
  sr.total = 2;
  sr.passed = (ci_ok ? 1 : 0) + (bound_ok ? 1 : 0);
  std::ostringstream l1, l2;
  l1 << "P(block not full) closed form " << detail::fmt_num(exact_not_full) << ", bound "
     << detail::fmt_num(bound) << (bound_ok ? " (holds)" : " (VIOLATED)");
  l2 << "MC estimate " << detail::fmt_num(est.p_hat) << " CI [" << detail::fmt_num(est.ci.lo)
     << ", " << detail::fmt_num(est.ci.hi) << "] over " << replicates << " replicates"
     << (ci_ok ? " contains the closed form" : " MISSES the closed form");
  sr.lines = {l1.str(), l2.str()};
  return sr;
}

namespace detail {
// random connected box animal containing the origin, grown by uniform
// frontier picks; size in [1, max_size]
inline Animal<2> random_animal(Rng& rng, int max_size) {
  int target = 1 + (int)rng.below((std::uint64_t)max_size);
  std::vector<IVec2> members{IVec2{0, 0}};
  std::vector<IVec2> frontier;
  auto add_frontier = [&](const IVec2& z) {
    std::vector<IVec2> nb;
    lattice_neighbors<2>(z, nb);
    for (const IVec2& u : nb)
      if (std::find(members.begin(), members.end(), u) == members.end() &&
          std::find(frontier.begin(), frontier.end(), u) == frontier.end())
        frontier.push_back(u);
  };
  add_frontier(members[0]);
  while ((int)members.size() < target && !frontier.empty()) {
    std::size_t k = (std::size_t)rng.below(frontier.size());
    IVec2 z = frontier[k];
    frontier.erase(frontier.begin() + (std::ptrdiff_t)k);
    members.push_back(z);
    add_frontier(z);
  }
  Animal<2> a(members);
  canonicalize<2>(a);
  return a;
}
}  // namespace detail

// Cell confinement under full boundary blocks: realizations drawn from the
// exact conditional law given every block on the animal's outer boundary is
// full; every cell meeting the animal's box union must stay inside its
// L/2-neighbourhood.
inline SuiteResult verify_confinement_suite(std::uint64_t seed, std::uint64_t replicates,
                                            const std::vector<double>& lambdas = {5.0, 20.0},
                                            const std::vector<double>& Ls = {2.0, 4.0}) {
  SuiteResult sr;
  sr.name = "confinement";
  std::uint64_t combos = (std::uint64_t)(lambdas.size() * Ls.size());
  std::uint64_t per = std::max<std::uint64_t>(1, replicates / combos);
  std::uint64_t total = 0, okc = 0;
  for (double lambda : lambdas)
    for (double L : Ls) {
      double worst = std::numeric_limits<double>::infinity();
      for (std::uint64_t rep = 0; rep < per; ++rep) {
        Rng arng = Rng::keyed({seed, rep, stream_tag::aux, 21,
                               (std::uint64_t)(lambda * 1000), (std::uint64_t)L});
        Animal<2> a = detail::random_animal(arng, 4);
        Animal<2> boundary = animal_boundary_linf<2>(a);
        double ext = 0;
        for (const IVec2& z : boundary)
          ext = std::max({ext, std::abs((double)z[0]), std::abs((double)z[1])});
        double half = (ext + 0.5) * L + 6.0 * std::max(L, 3.0);
        Box2 window = detail::centered_window(half);
        std::vector<IVec2> blocks(boundary.begin(), boundary.end());
        std::uint64_t cseed = hash_key({seed, (std::uint64_t)(lambda * 1000),
                                        (std::uint64_t)L, 77});
        PointSet<2> ps = sample_given_full_blocks<2>(window, lambda, cseed, rep, L, blocks);
        Triangulation tr = Triangulation::build(ps.pts, window);
        ConfinementReport rep2 = verify_confinement(tr, a, L);
        ++total;
        if (rep2.ok) ++okc;
        worst = std::min(worst, rep2.worst_margin);
      }
      std::ostringstream l;
      l << "lambda=" << lambda << " L=" << L << ": " << per
        << " conditioned realizations, worst certified margin " << detail::fmt_num(worst);
      sr.lines.push_back(l.str());
    }
  std::ostringstream l;
  l << "confinement held in " << okc << "/" << total << " realizations";
  sr.lines.push_back(l.str());
  sr.ok = okc == total;
  sr.passed = okc;
  sr.total = total;
  return sr;
}

// Cluster product bound for increasing functionals of closed-cluster sizes
// in the iid site field
inline SuiteResult verify_cluster_product_suite(std::uint64_t seed, std::uint64_t replicates) {
  SuiteResult sr;
  sr.name = "cluster-product";
  std::vector<std::pair<std::string, Animal<2>>> shapes = {
      {"1x1", Animal<2>{IVec2{0, 0}}},
      {"2x2", Animal<2>{IVec2{0, 0}, IVec2{1, 0}, IVec2{0, 1}, IVec2{1, 1}}},
      {"1x4", Animal<2>{IVec2{0, 0}, IVec2{1, 0}, IVec2{2, 0}, IVec2{3, 0}}}};
  sr.ok = true;
  for (double rho : {0.7, 0.8, 0.9})
    for (auto& [label, a] : shapes) {
      ClusterProductReport rep = verify_cluster_product<2>(seed, rho, a, 4, replicates);
      std::ostringstream l;
      l << "rho=" << rho << " A=" << label << ": E prod " << detail::fmt_num(rep.lhs)
        << " <= (E single)^" << a.size() << " = " << detail::fmt_num(rep.rhs_pow)
        << (rep.ok ? " (holds)" : " (VIOLATED)");
      sr.lines.push_back(l.str());
      ++sr.total;
      if (rep.ok)
        ++sr.passed;
      else
        sr.ok = false;
    }
  return sr;
}

// Density-regularised rebuild: per sub-box count laws and the altered
// fraction against its closed form
inline SuiteResult verify_modified_suite(std::uint64_t seed, std::uint64_t replicates,
                                         const std::vector<std::uint64_t>& ns = {8, 16, 32},
                                         double delta = 0.5, double lambda = 1.0) {
  SuiteResult sr;
  sr.name = "modified-invariants";
  sr.ok = true;
  for (std::uint64_t n : ns) {
    ModifiedLayout layout = ModifiedLayout::make(n, delta);
    double half = std::ceil(12.0 / layout.sub_side) * layout.sub_side;
    Box2 window = detail::centered_window(half);
    Intensity<2> mu;
    mu.lambda = lambda;
    std::uint64_t altered = 0, boxes = 0, bad = 0;
    for (std::uint64_t rep = 0; rep < replicates; ++rep) {
      PointSet<2> ps = sample<2>(window, mu, seed + n, rep);
      PointSet<2> mod = build_modified(ps, n, delta);
      ModifiedCheck chk = verify_modified_invariants(ps, mod, n, delta);
      if (!chk.ok) {
        ++bad;
        if (bad == 1) sr.lines.push_back("INVARIANT: " + chk.message);
      }
      double frac = altered_subbox_fraction(ps, n, delta);
      std::uint64_t nb = chk.sub_boxes;
      altered += (std::uint64_t)std::llround(frac * (double)nb);
      boxes += nb;
    }
    // closed form: P(Pois(lambda sub^2) = 0) + P(> cap)
    double mean = lambda * layout.sub_side * layout.sub_side;
    double p0 = std::exp(-mean);
    double tail = 1.0, term = p0;
    for (std::uint64_t k = 0; k <= layout.cap; ++k) {
      if (k > 0) term *= mean / (double)k;
      tail -= term;
    }
    double p_alt = p0 + std::max(0.0, tail);
    TailEstimate est = make_tail_estimate(altered, boxes);
    bool ci_ok = est.ci.lo <= p_alt && p_alt <= est.ci.hi;
    std::ostringstream l;
    l << "n=" << n << ": altered sub-box fraction " << detail::fmt_num(est.p_hat) << " CI ["
      << detail::fmt_num(est.ci.lo) << ", " << detail::fmt_num(est.ci.hi)
      << "] vs closed form " << detail::fmt_num(p_alt)
      << (ci_ok ? " (contained)" : " (OUTSIDE)") << "; counts in [1, cap] "
      << (bad == 0 ? "held" : "FAILED");
    sr.lines.push_back(l.str());
    ++sr.total;
    if (ci_ok && bad == 0)
      ++sr.passed;
    else
      sr.ok = false;
  }
  return sr;
}

}  // namespace vorpoly
