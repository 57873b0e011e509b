#pragma once

// Filtered exact orientation and in-circle tests, plus the symbolic
// perturbation used to break cocircular ties: points are ranked
// lexicographically by coordinates and conceptually lowered on the lifting
// paraboloid by an infinitesimal increasing with rank. Net effect: in an
// exactly cocircular quad the triangulated diagonal passes through the
// lexicographically smallest vertex.

#include <cmath>
#include <stdexcept>

#include "core.hpp"
#include "exact.hpp"

namespace vorpoly {

namespace detail {
// error bound coefficients (Shewchuk), machine epsilon 2^-53
constexpr double kEps = 1.1102230246251565e-16;
constexpr double kCcwErrA = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccErrA = (10.0 + 96.0 * kEps) * kEps;

inline int orient2d_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
  using namespace exactfp;
  // det = ax(by-cy) - ay(bx-cx) + (bx*cy - by*cx), all terms exact
  Exp t1 = sub(from_prod(a[0], b[1]), from_prod(a[0], c[1]));
  Exp t2 = sub(from_prod(a[1], b[0]), from_prod(a[1], c[0]));
  Exp t3 = sub(from_prod(b[0], c[1]), from_prod(b[1], c[0]));
  return sign(add(sub(t1, t2), t3));
}

inline exactfp::Exp incircle_det_exact(const Vec2& a, const Vec2& b,
                                       const Vec2& c, const Vec2& d) {
  using namespace exactfp;
  Exp adx = from_diff(a[0], d[0]), ady = from_diff(a[1], d[1]);
  Exp bdx = from_diff(b[0], d[0]), bdy = from_diff(b[1], d[1]);
  Exp cdx = from_diff(c[0], d[0]), cdy = from_diff(c[1], d[1]);
  Exp alift = add(mul(adx, adx), mul(ady, ady));
  Exp blift = add(mul(bdx, bdx), mul(bdy, bdy));
  Exp clift = add(mul(cdx, cdx), mul(cdy, cdy));
  Exp bc = sub(mul(bdx, cdy), mul(bdy, cdx));
  Exp ca = sub(mul(cdx, ady), mul(cdy, adx));
  Exp ab = sub(mul(adx, bdy), mul(ady, bdx));
  return add(add(mul(alift, bc), mul(blift, ca)), mul(clift, ab));
}
}  // namespace detail

// Sign of det[[b-a],[c-a]]: +1 if a,b,c counterclockwise, 0 if collinear.
inline int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  double detl = (a[0] - c[0]) * (b[1] - c[1]);
  double detr = (a[1] - c[1]) * (b[0] - c[0]);
  double det = detl - detr;
  double detsum;
  if (detl > 0) {
    if (detr <= 0) return det > 0 ? 1 : (det < 0 ? -1 : 0);
    detsum = detl + detr;
  } else if (detl < 0) {
    if (detr >= 0) return det > 0 ? 1 : (det < 0 ? -1 : 0);
    detsum = -detl - detr;
  } else {
    return det > 0 ? 1 : (det < 0 ? -1 : 0);
  }
  double errbound = detail::kCcwErrA * detsum;
  if (det >= errbound || -det >= errbound) return det > 0 ? 1 : -1;
  return detail::orient2d_exact(a, b, c);
}

// Sign of the lifted 4x4 determinant: +1 iff d lies strictly inside the
// circle through a,b,c taken counterclockwise; 0 iff exactly cocircular.
inline int incircle(const Vec2& a, const Vec2& b, const Vec2& c,
                    const Vec2& d) {
  double adx = a[0] - d[0], ady = a[1] - d[1];
  double bdx = b[0] - d[0], bdy = b[1] - d[1];
  double cdx = c[0] - d[0], cdy = c[1] - d[1];
  double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  double cdxady = cdx * ady, adxcdy = adx * cdy;
  double adxbdy = adx * bdy, bdxady = bdx * ady;
  double alift = adx * adx + ady * ady;
  double blift = bdx * bdx + bdy * bdy;
  double clift = cdx * cdx + cdy * cdy;
  double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
               clift * (adxbdy - bdxady);
  double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                     (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                     (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  double errbound = detail::kIccErrA * permanent;
  if (det > errbound) return 1;
  if (-det > errbound) return -1;
  return exactfp::sign(detail::incircle_det_exact(a, b, c, d));
}

// incircle with the lexicographic symbolic perturbation applied; never 0 for
// four distinct points not all collinear. a,b,c must be a valid CCW triangle.
inline int incircle_perturbed(const Vec2& a, const Vec2& b, const Vec2& c,
                              const Vec2& d) {
  int s = incircle(a, b, c, d);
  if (s != 0) return s;
  // Exact tie. Perturbed sign = -sign(dDet/dl_q) for the lexicographically
  // largest point q among {a,b,c,d} whose cofactor is nonzero; the cofactors
  // of the lifted column are orientation determinants of the other three.
  const Vec2* p[4] = {&a, &b, &c, &d};
  int order[4] = {0, 1, 2, 3};  // sort descending by lex coordinate order
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (lex_less<2>(*p[order[i]], *p[order[j]])) std::swap(order[i], order[j]);
  for (int oi = 0; oi < 4; ++oi) {
    int i = order[oi];
    // cofactor of row i in the lifted column, rows in order a,b,c,d
    const Vec2* q[3];
    int k = 0;
    for (int j = 0; j < 4; ++j)
      if (j != i) q[k++] = p[j];
    int m = detail::orient2d_exact(*q[0], *q[1], *q[2]);
    if (m == 0) continue;
    int cof = ((i % 2) == 0) ? m : -m;  // (-1)^(i+3) pattern for column 3
    return -cof > 0 ? 1 : -1;
  }
  throw std::logic_error("incircle_perturbed: fully degenerate quad");
}

}  // namespace vorpoly
