#pragma once

// Lattice animals (finite connected site sets of Z^d under nearest-neighbor
// adjacency), their enumeration, boundaries, and weight maximization.
// Exhaustive enumeration is guarded: size <= 8 in d=2 and size <= 5 in d=3
// stay well under 10^5 visited sets per root.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include "connected_enum.hpp"
#include "core.hpp"

namespace vorpoly {

template <int D>
using Animal = std::vector<IVec<D>>;  // canonical form: lex-sorted, unique

constexpr int animal_exact_guard(int d) { return d == 2 ? 8 : 5; }

// every connected set of size s containing a fixed site numbers at most
// alpha^(s-1) with alpha = (2d)^(2d)
inline double animal_growth_alpha(int d) {
  double a = 1;
  for (int i = 0; i < 2 * d; ++i) a *= 2.0 * d;
  return a;
}

template <int D>
inline void lattice_neighbors(const IVec<D>& z, std::vector<IVec<D>>& out) {
  out.clear();
  for (int i = 0; i < D; ++i) {
    IVec<D> a = z, b = z;
    a[i] -= 1;
    b[i] += 1;
    out.push_back(a);
    out.push_back(b);
  }
}

template <int D>
inline void canonicalize(Animal<D>& a) {
  std::sort(a.begin(), a.end(),
            [](const IVec<D>& x, const IVec<D>& y) { return lex_less<D>(x, y); });
  a.erase(std::unique(a.begin(), a.end()), a.end());
}

template <int D>
inline bool is_connected_animal(const Animal<D>& a) {
  if (a.empty()) return false;
  std::unordered_set<IVec<D>, ivec_hash> in(a.begin(), a.end());
  std::vector<IVec<D>> stack{a[0]}, nb;
  std::unordered_set<IVec<D>, ivec_hash> seen{a[0]};
  while (!stack.empty()) {
    IVec<D> z = stack.back();
    stack.pop_back();
    lattice_neighbors<D>(z, nb);
    for (const IVec<D>& u : nb)
      if (in.count(u) && seen.insert(u).second) stack.push_back(u);
  }
  return seen.size() == a.size();
}

// Visit every animal of size <= max_size containing root exactly once.
// visit(members) gets the members in discovery order (not canonical).
template <int D, class Visit>
void enumerate_animals_containing(const IVec<D>& root, int max_size, Visit&& visit) {
  if (max_size > animal_exact_guard(D))
    throw precondition_error("enumerate_animals_containing: size " +
                             std::to_string(max_size) + " exceeds exhaustive guard " +
                             std::to_string(animal_exact_guard(D)));
  for_each_connected_superset<IVec<D>, ivec_hash>(
      root, max_size,
      [](const IVec<D>& z, std::vector<IVec<D>>& out) { lattice_neighbors<D>(z, out); },
      [&](const std::vector<IVec<D>>& members) {
        visit(members);
        return true;
      });
}

// counts[s] = number of animals of size exactly s containing the origin
template <int D>
inline std::vector<std::uint64_t> count_animals_by_size(int max_size) {
  std::vector<std::uint64_t> counts(max_size + 1, 0);
  enumerate_animals_containing<D>(IVec<D>{}, max_size,
                                  [&](const std::vector<IVec<D>>& m) { ++counts[m.size()]; });
  return counts;
}

// outer boundary: sites not in A at L-infinity distance exactly 1 from A
template <int D>
inline Animal<D> animal_boundary_linf(const Animal<D>& a) {
  std::unordered_set<IVec<D>, ivec_hash> in(a.begin(), a.end());
  std::unordered_set<IVec<D>, ivec_hash> bd;
  for (const IVec<D>& z : a) {
    IVec<D> u;
    // all 3^D - 1 offsets
    int total = 1;
    for (int i = 0; i < D; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
      int c = code;
      bool zero = true;
      for (int i = 0; i < D; ++i) {
        int o = c % 3 - 1;
        c /= 3;
        u[i] = z[i] + o;
        if (o != 0) zero = false;
      }
      if (!zero && !in.count(u)) bd.insert(u);
    }
  }
  Animal<D> out(bd.begin(), bd.end());
  canonicalize<D>(out);
  return out;
}

// Union of closed lattice boxes of side L over the sites of an animal.
template <int D>
struct BoxUnion {
  std::vector<Box<D>> boxes;

  static BoxUnion from_animal(const Animal<D>& a, double side) {
    BoxUnion u;
    u.boxes.reserve(a.size());
    for (const IVec<D>& z : a) u.boxes.push_back(lattice_box<D>(z, side));
    return u;
  }
  double dist(const Vec<D>& x) const {  // 1-Lipschitz in x
    double d = std::numeric_limits<double>::infinity();
    for (const Box<D>& b : boxes) d = std::min(d, b.dist(x));
    return d;
  }
  bool contains_closed(const Vec<D>& x) const {
    for (const Box<D>& b : boxes)
      if (b.contains_closed(x)) return true;
    return false;
  }
};

template <int D>
struct MaxWeightResult {
  double value = 0;
  Animal<D> animal;
  bool exact = true;
};

// Maximize sum of site weights over animals of size exactly `size` containing
// root. Exhaustive for size <= exact_guard; otherwise a deterministic greedy
// beam search (width 64) whose result is a lower bound, flagged approximate.
template <int D, class WeightFn>
MaxWeightResult<D> max_weight_animal(const IVec<D>& root, int size, WeightFn&& w,
                                     int exact_guard = animal_exact_guard(D)) {
  MaxWeightResult<D> best;
  best.value = -std::numeric_limits<double>::infinity();
  if (size <= std::min(exact_guard, animal_exact_guard(D))) {
    enumerate_animals_containing<D>(root, size, [&](const std::vector<IVec<D>>& m) {
      if ((int)m.size() != size) return;
      double s = 0;
      for (const IVec<D>& z : m) s += w(z);
      if (s > best.value) {
        best.value = s;
        best.animal = Animal<D>(m.begin(), m.end());
      }
    });
    canonicalize<D>(best.animal);
    return best;
  }
  // beam search
  best.exact = false;
  struct State {
    double value;
    Animal<D> sites;  // canonical
  };
  std::vector<State> beam{{w(root), {root}}};
  std::vector<IVec<D>> nb;
  for (int step = 1; step < size; ++step) {
    std::vector<State> next;
    for (const State& st : beam) {
      std::unordered_set<IVec<D>, ivec_hash> in(st.sites.begin(), st.sites.end());
      std::unordered_set<IVec<D>, ivec_hash> cand;
      for (const IVec<D>& z : st.sites) {
        lattice_neighbors<D>(z, nb);
        for (const IVec<D>& u : nb)
          if (!in.count(u)) cand.insert(u);
      }
      for (const IVec<D>& u : cand) {
        State ns = st;
        ns.value += w(u);
        ns.sites.push_back(u);
        canonicalize<D>(ns.sites);
        next.push_back(std::move(ns));
      }
    }
    std::sort(next.begin(), next.end(), [](const State& a, const State& b) {
      if (a.value != b.value) return a.value > b.value;
      return std::lexicographical_compare(
          a.sites.begin(), a.sites.end(), b.sites.begin(), b.sites.end(),
          [](const IVec<D>& x, const IVec<D>& y) { return lex_less<D>(x, y); });
    });
    // drop duplicate site-sets (same animal reached along different orders)
    std::vector<State> dedup;
    for (State& st : next) {
      if (!dedup.empty() && dedup.back().sites == st.sites) continue;
      dedup.push_back(std::move(st));
      if ((int)dedup.size() >= 64) break;
    }
    beam = std::move(dedup);
    if (beam.empty()) break;
  }
  if (!beam.empty()) {
    best.value = beam[0].value;
    best.animal = beam[0].sites;
  }
  return best;
}

// text form "x,y;x,y;..." (3D: "x,y,z;...") of the canonical animal
template <int D>
inline std::string animal_to_string(const Animal<D>& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ';';
    for (int k = 0; k < D; ++k) {
      if (k) s += ',';
      s += std::to_string(a[i][k]);
    }
  }
  return s;
}

template <int D>
inline Animal<D> animal_from_string(const std::string& s) {
  Animal<D> a;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = s.find(';', pos);
    if (end == std::string::npos) end = s.size();
    IVec<D> z{};
    std::size_t p = pos;
    for (int k = 0; k < D; ++k) {
      z[k] = std::stoi(s.substr(p, end - p));
      std::size_t comma = s.find(',', p);
      if (k + 1 < D) {
        if (comma == std::string::npos || comma >= end)
          throw precondition_error("animal_from_string: bad site");
        p = comma + 1;
      }
    }
    a.push_back(z);
    pos = end + 1;
  }
  canonicalize<D>(a);
  if (!is_connected_animal<D>(a))
    throw precondition_error("animal_from_string: sites not connected");
  return a;
}

}  // namespace vorpoly
