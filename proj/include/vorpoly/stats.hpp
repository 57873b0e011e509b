#pragma once

// Small statistics toolkit for Monte Carlo tail estimation: Wilson score
// intervals, bound comparisons with sampling slack, and exponential-decay
// fits of estimated tail probabilities.

#include <cmath>
#include <cstdint>
#include <vector>

#include "core.hpp"

namespace vorpoly {

struct Interval {
  double lo = 0, hi = 1;
};

// Wilson score interval for a binomial proportion (default 95%).
inline Interval wilson_ci(std::uint64_t hits, std::uint64_t n, double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  double ph = (double)hits / (double)n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (ph + z2 / (2.0 * n)) / denom;
  double half = (z / denom) * std::sqrt(ph * (1 - ph) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct TailEstimate {
  std::uint64_t hits = 0;
  std::uint64_t n = 0;         // completed (non-censored) replicates
  std::uint64_t censored = 0;  // dropped replicates
  double p_hat = 0;
  Interval ci;
  bool has_bound = false;
  double bound = 0;
  bool pass = true;  // p_hat <= bound + 3 sigma (sigma from the CI width)

  double sigma() const { return (ci.hi - ci.lo) / (2.0 * 1.959963984540054); }
};

inline TailEstimate make_tail_estimate(std::uint64_t hits, std::uint64_t n,
                                       std::uint64_t censored = 0) {
  TailEstimate t;
  t.hits = hits;
  t.n = n;
  t.censored = censored;
  t.p_hat = n ? (double)hits / (double)n : 0.0;
  t.ci = wilson_ci(hits, n);
  return t;
}

inline void apply_bound(TailEstimate& t, double bound) {
  t.has_bound = true;
  t.bound = bound;
  t.pass = t.p_hat <= bound + 3.0 * t.sigma();
}

struct DecayFit {
  double log_a = 0;   // intercept of log p over r
  double slope = 0;   // decay exponent per unit r (negative = decaying)
  double r2 = 0;
  std::size_t points = 0;
};

// Least-squares line through (r, log p) for the strictly positive estimates.
inline DecayFit fit_decay(const std::vector<double>& r, const std::vector<double>& p) {
  DecayFit f;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < r.size() && i < p.size(); ++i)
    if (p[i] > 0) {
      xs.push_back(r[i]);
      ys.push_back(std::log(p[i]));
    }
  f.points = xs.size();
  if (f.points < 2) return f;
  double n = (double)xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) return f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.log_a = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0, ybar = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double pred = f.log_a + f.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  if (ss_tot < 1e-12)
    f.r2 = ss_res < 1e-12 ? 1.0 : 0.0;
  else
    f.r2 = 1.0 - ss_res / ss_tot;
  return f;
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0;
  double s = 0;
  for (double x : v) s += x;
  return s / (double)v.size();
}

inline double variance_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  double m = mean_of(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (double)(v.size() - 1);
}

}  // namespace vorpoly
