#pragma once

#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace vorpoly {

// Intensity of the point process. Homogeneous unless a density is set, in
// which case sampling thins a homogeneous process of intensity c_mu and the
// density must stay within [1/c_mu, c_mu].
template <int D>
struct Intensity {
  double lambda = 1.0;
  std::function<double(const Vec<D>&)> density;  // empty -> homogeneous
  double c_mu = 1.0;

  bool homogeneous() const { return !density; }
};

template <int D>
struct PointSet {
  Box<D> window{};
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  bool modified = false;  // produced by the density-regularised rebuild
  std::uint64_t modified_n = 0;
  double modified_delta = 0;
  std::vector<Vec<D>> pts;
  std::uint64_t resampled_duplicates = 0;  // not serialized

  std::size_t size() const { return pts.size(); }
};

namespace detail {
template <int D>
inline std::uint64_t coord_bits(const Vec<D>& p) {
  std::uint64_t h = 0x2545F4914F6CDD1Dull;
  for (int i = 0; i < D; ++i) {
    std::uint64_t b;
    std::memcpy(&b, &p[i], 8);
    h = key_chain(h, b);
  }
  return h;
}
}  // namespace detail

// Homogeneous or thinned inhomogeneous Poisson sample on a half-open window.
// Deterministic in (seed, replicate); duplicate coordinates (absurdly rare)
// are redrawn with a warning so downstream geometry never sees ties.
template <int D>
inline PointSet<D> sample(const Box<D>& window, const Intensity<D>& mu,
                          std::uint64_t seed, std::uint64_t replicate) {
  for (int i = 0; i < D; ++i)
    if (!(window.lo[i] < window.hi[i]))
      throw precondition_error("sample: empty window");
  PointSet<D> ps;
  ps.window = window;
  ps.seed = seed;
  ps.replicate = replicate;
  Rng rng = Rng::keyed({seed, replicate, stream_tag::points, (std::uint64_t)D});

  const double vol = window.volume();
  const double dominating = mu.homogeneous() ? mu.lambda : mu.c_mu;
  if (!(dominating > 0)) throw precondition_error("sample: intensity <= 0");
  int n = rng.poisson(dominating * vol);

  std::unordered_set<std::uint64_t> seen;
  seen.reserve((std::size_t)n * 2 + 8);
  ps.pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    for (;;) {
      Vec<D> p;
      for (int k = 0; k < D; ++k) p[k] = rng.uniform(window.lo[k], window.hi[k]);
      if (!mu.homogeneous()) {
        double dens = mu.density(p);
        if (!(dens >= 1.0 / mu.c_mu - 1e-12 && dens <= mu.c_mu + 1e-12))
          throw precondition_error("sample: density outside [1/c_mu, c_mu]");
        if (!rng.bernoulli(dens / mu.c_mu)) break;  // thinned away
      }
      if (!seen.insert(detail::coord_bits<D>(p)).second) {
        ++ps.resampled_duplicates;
        std::clog << "vorpoly: duplicate point resampled\n";
        continue;
      }
      ps.pts.push_back(p);
      break;
    }
  }
  return ps;
}

// Exactly n uniform points (binomial process), same duplicate handling.
template <int D>
inline PointSet<D> sample_uniform_count(const Box<D>& window, int n,
                                        std::uint64_t seed,
                                        std::uint64_t replicate) {
  PointSet<D> ps;
  ps.window = window;
  ps.seed = seed;
  ps.replicate = replicate;
  Rng rng = Rng::keyed({seed, replicate, stream_tag::points, (std::uint64_t)D, 77});
  std::unordered_set<std::uint64_t> seen;
  ps.pts.reserve(n);
  while ((int)ps.pts.size() < n) {
    Vec<D> p;
    for (int k = 0; k < D; ++k) p[k] = rng.uniform(window.lo[k], window.hi[k]);
    if (!seen.insert(detail::coord_bits<D>(p)).second) {
      ++ps.resampled_duplicates;
      continue;
    }
    ps.pts.push_back(p);
  }
  return ps;
}

// Number of points in a half-open box.
template <int D>
inline std::size_t count_in(const PointSet<D>& ps, const Box<D>& region) {
  std::size_t c = 0;
  for (const auto& p : ps.pts)
    if (region.contains_half_open(p)) ++c;
  return c;
}

template <int D>
inline void write_points(std::ostream& os, const PointSet<D>& ps) {
  char buf[320];
  std::snprintf(buf, sizeof buf, "# d=%d seed=%llu replicate=%llu", D,
                (unsigned long long)ps.seed, (unsigned long long)ps.replicate);
  os << buf;
  os << " window=";
  for (int i = 0; i < D; ++i) {
    std::snprintf(buf, sizeof buf, "%s%.17g:%.17g", i ? ";" : "", ps.window.lo[i],
                  ps.window.hi[i]);
    os << buf;
  }
  if (ps.modified) {
    std::snprintf(buf, sizeof buf, " modified n=%llu delta=%.17g",
                  (unsigned long long)ps.modified_n, ps.modified_delta);
    os << buf;
  }
  os << '\n';
  for (const auto& p : ps.pts) {
    for (int i = 0; i < D; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", p[i]);
      os << (i ? " " : "") << buf;
    }
    os << '\n';
  }
}

template <int D>
inline std::string to_text(const PointSet<D>& ps) {
  std::ostringstream os;
  write_points(os, ps);
  return os.str();
}

template <int D>
inline PointSet<D> read_points(std::istream& is) {
  PointSet<D> ps;
  std::string line;
  if (!std::getline(is, line) || line.empty() || line[0] != '#')
    throw precondition_error("read_points: missing header");
  int d = 0;
  unsigned long long seed = 0, rep = 0, n = 0;
  double delta = 0;
  int got = std::sscanf(line.c_str(), "# d=%d seed=%llu replicate=%llu", &d,
                        &seed, &rep);
  if (got != 3 || d != D) throw precondition_error("read_points: bad header");
  ps.seed = seed;
  ps.replicate = rep;
  const char* m = std::strstr(line.c_str(), "modified");
  if (m && std::sscanf(m, "modified n=%llu delta=%lf", &n, &delta) == 2) {
    ps.modified = true;
    ps.modified_n = n;
    ps.modified_delta = delta;
  }
  bool have_window = false;
  if (const char* w = std::strstr(line.c_str(), "window=")) {
    w += 7;
    have_window = true;
    for (int i = 0; i < D && have_window; ++i) {
      char sep = 0;
      int used = 0;
      if (std::sscanf(w, "%lf:%lf%n", &ps.window.lo[i], &ps.window.hi[i], &used) == 2) {
        w += used;
        if (i + 1 < D) {
          if (std::sscanf(w, "%c", &sep) == 1 && sep == ';')
            ++w;
          else
            have_window = false;
        }
      } else {
        have_window = false;
      }
    }
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Vec<D> p{};
    std::istringstream ls(line);
    for (int i = 0; i < D; ++i)
      if (!(ls >> p[i])) throw precondition_error("read_points: bad row");
    ps.pts.push_back(p);
  }
  if (!have_window) {
    // legacy rows without a recorded window: use a padded bounding box
    for (int i = 0; i < D; ++i) {
      double lo = 0, hi = 1;
      if (!ps.pts.empty()) {
        lo = hi = ps.pts[0][i];
        for (const auto& p : ps.pts) {
          lo = std::min(lo, p[i]);
          hi = std::max(hi, p[i]);
        }
      }
      double pad = 1e-6 * std::max(1.0, hi - lo);
      ps.window.lo[i] = lo - pad;
      ps.window.hi[i] = hi + pad;
    }
  }
  return ps;
}

}  // namespace vorpoly
