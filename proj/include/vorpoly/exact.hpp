#pragma once

// Error-free float expansions (Shewchuk-style), used as the exact fallback of
// the filtered orientation / in-circle predicates. Not performance critical:
// the filter decides almost every call.

#include <cmath>
#include <vector>

namespace vorpoly::exactfp {

using Exp = std::vector<double>;  // nonoverlapping, increasing magnitude

inline void fast_two_sum(double a, double b, double& x, double& y) {
  // requires |a| >= |b|
  x = a + b;
  double bv = x - a;
  y = b - bv;
}

inline void two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  double bv = x - a;
  double av = x - bv;
  y = (a - av) + (b - bv);
}

inline void two_diff(double a, double b, double& x, double& y) {
  x = a - b;
  double bv = a - x;
  double av = x + bv;
  y = (a - av) + (bv - b);
}

inline void two_prod(double a, double b, double& x, double& y) {
  x = a * b;
  y = std::fma(a, b, -x);
}

inline Exp from_two(double hi, double lo) {
  Exp e;
  if (lo != 0) e.push_back(lo);
  if (hi != 0) e.push_back(hi);
  if (e.empty()) e.push_back(0.0);
  return e;
}

inline Exp from_diff(double a, double b) {
  double x, y;
  two_diff(a, b, x, y);
  return from_two(x, y);
}

inline Exp from_prod(double a, double b) {
  double x, y;
  two_prod(a, b, x, y);
  return from_two(x, y);
}

// fast_expansion_sum_zeroelim
inline Exp add(const Exp& e, const Exp& f) {
  std::size_t ei = 0, fi = 0;
  const std::size_t en = e.size(), fn = f.size();
  Exp h;
  h.reserve(en + fn);
  auto take_e = [&] { return fi >= fn || (ei < en && std::abs(e[ei]) <= std::abs(f[fi])); };
  double Q, now;
  if (take_e()) Q = e[ei++];
  else Q = f[fi++];
  double Qn, hh;
  if (ei < en || fi < fn) {
    if (take_e()) now = e[ei++];
    else now = f[fi++];
    fast_two_sum(now, Q, Qn, hh);
    Q = Qn;
    if (hh != 0) h.push_back(hh);
    while (ei < en || fi < fn) {
      if (take_e()) now = e[ei++];
      else now = f[fi++];
      two_sum(Q, now, Qn, hh);
      Q = Qn;
      if (hh != 0) h.push_back(hh);
    }
  }
  if (Q != 0 || h.empty()) h.push_back(Q);
  return h;
}

// scale_expansion_zeroelim
inline Exp scale(const Exp& e, double b) {
  Exp h;
  h.reserve(e.size() * 2);
  double Q, hh, p1, p0, sum;
  two_prod(e[0], b, Q, hh);
  if (hh != 0) h.push_back(hh);
  for (std::size_t i = 1; i < e.size(); ++i) {
    two_prod(e[i], b, p1, p0);
    two_sum(Q, p0, sum, hh);
    if (hh != 0) h.push_back(hh);
    fast_two_sum(p1, sum, Q, hh);
    if (hh != 0) h.push_back(hh);
  }
  if (Q != 0 || h.empty()) h.push_back(Q);
  return h;
}

inline Exp neg(Exp e) {
  for (auto& v : e) v = -v;
  return e;
}

inline Exp mul(const Exp& e, const Exp& f) {
  Exp acc{0.0};
  for (double c : f) {
    if (c == 0) continue;
    acc = add(acc, scale(e, c));
  }
  return acc;
}

inline Exp sub(const Exp& e, const Exp& f) { return add(e, neg(f)); }

inline int sign(const Exp& e) {
  double top = e.back();  // largest magnitude dominates
  if (top > 0) return 1;
  if (top < 0) return -1;
  return 0;
}

}  // namespace vorpoly::exactfp
