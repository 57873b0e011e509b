#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vorpoly {

template <int D> using Vec = std::array<double, D>;
template <int D> using IVec = std::array<int, D>;

using Vec2 = Vec<2>;
using IVec2 = IVec<2>;

struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Replicate touched the window/region boundary; caller should drop it and
// count it, not treat it as a failure.
struct censored_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <int D>
inline bool lex_less(const Vec<D>& a, const Vec<D>& b) {
  for (int i = 0; i < D; ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

template <int D>
inline bool lex_less(const IVec<D>& a, const IVec<D>& b) {
  for (int i = 0; i < D; ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

template <int D>
inline double dist2(const Vec<D>& a, const Vec<D>& b) {
  double s = 0;
  for (int i = 0; i < D; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

template <int D>
inline int linf_dist(const IVec<D>& a, const IVec<D>& b) {
  int m = 0;
  for (int i = 0; i < D; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <int D>
inline int l1_dist(const IVec<D>& a, const IVec<D>& b) {
  int m = 0;
  for (int i = 0; i < D; ++i) m += std::abs(a[i] - b[i]);
  return m;
}

// Axis-aligned box, half-open [lo, hi) unless stated otherwise.
template <int D>
struct Box {
  Vec<D> lo{}, hi{};

  double volume() const {
    double v = 1;
    for (int i = 0; i < D; ++i) v *= hi[i] - lo[i];
    return v;
  }
  bool contains_half_open(const Vec<D>& x) const {
    for (int i = 0; i < D; ++i)
      if (!(x[i] >= lo[i] && x[i] < hi[i])) return false;
    return true;
  }
  bool contains_closed(const Vec<D>& x) const {
    for (int i = 0; i < D; ++i)
      if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
    return true;
  }
  // Euclidean distance from x to the closed box.
  double dist(const Vec<D>& x) const {
    double s = 0;
    for (int i = 0; i < D; ++i) {
      double d = 0;
      if (x[i] < lo[i]) d = lo[i] - x[i];
      else if (x[i] > hi[i]) d = x[i] - hi[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
};

using Box2 = Box<2>;

// Unit-scale lattice box B_z = side*z + [-side/2, side/2)^D.
template <int D>
inline Box<D> lattice_box(const IVec<D>& z, double side = 1.0) {
  Box<D> b;
  for (int i = 0; i < D; ++i) {
    b.lo[i] = side * (z[i] - 0.5);
    b.hi[i] = side * (z[i] + 0.5);
  }
  return b;
}

// Index of the half-open lattice box (side s) containing x.
template <int D>
inline IVec<D> box_index_of(const Vec<D>& x, double side = 1.0) {
  IVec<D> z;
  for (int i = 0; i < D; ++i) z[i] = (int)std::floor(x[i] / side + 0.5);
  return z;
}

struct ivec_hash {
  template <std::size_t D>
  std::size_t operator()(const std::array<int, D>& z) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (std::size_t i = 0; i < D; ++i) {
      std::uint64_t w = (std::uint64_t)(std::uint32_t)z[i];
      h ^= (w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2));
      h *= 0xBF58476D1CE4E5B9ull;
    }
    return (std::size_t)(h ^ (h >> 31));
  }
};

}  // namespace vorpoly
