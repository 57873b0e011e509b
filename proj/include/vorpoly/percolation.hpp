#pragma once

// Site percolation on Z^d with lazily evaluated, hash-keyed fields, closed
// clusters (nearest-neighbor adjacency) and their closures, and Monte Carlo
// verification of the negative-correlation product bound for cluster sizes.

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "core.hpp"
#include "lattice.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace vorpoly {

// iid Bernoulli(rho) open/closed site field; each site's value is a pure
// function of (base key, site), so evaluation order never matters
template <int D>
struct IidSiteField {
  std::uint64_t base = 0;
  double rho = 1.0;

  bool open(const IVec<D>& z) const {
    std::uint64_t h = base;
    for (int i = 0; i < D; ++i) h = key_chain(h, (std::uint64_t)(std::int64_t)z[i]);
    double u = (double)(mix64(h) >> 11) * 0x1.0p-53;
    return u < rho;
  }
};

template <int D>
inline IidSiteField<D> make_iid_site_field(std::uint64_t seed, std::uint64_t replicate,
                                           std::uint64_t field_k, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw precondition_error("make_iid_site_field: rho outside [0,1]");
  IidSiteField<D> f;
  f.base = hash_key({seed, replicate, (std::uint64_t)stream_tag::sites, field_k});
  f.rho = rho;
  return f;
}

template <int D>
inline Animal<D> closure_of(const Animal<D>& a) {
  Animal<D> bd = animal_boundary_linf<D>(a);
  Animal<D> out = a;
  out.insert(out.end(), bd.begin(), bd.end());
  canonicalize<D>(out);
  return out;
}

template <int D>
struct ClosedClusters {
  std::vector<Animal<D>> clusters;  // canonical, disjoint
  std::size_t total_sites = 0;
};

// All closed clusters intersecting `seeds`. Exploration is truncated at
// `cap` sites total; beyond it the replicate cannot be evaluated faithfully
// and is reported as censored.
template <int D, class Field>
ClosedClusters<D> closed_clusters_meeting(const Field& field, const Animal<D>& seeds,
                                          std::size_t cap = 100000) {
  ClosedClusters<D> out;
  std::unordered_set<IVec<D>, ivec_hash> seen;
  std::vector<IVec<D>> stack, nb;
  for (const IVec<D>& s : seeds) {
    if (field.open(s) || seen.count(s)) continue;
    Animal<D> cl;
    stack.assign(1, s);
    seen.insert(s);
    while (!stack.empty()) {
      IVec<D> z = stack.back();
      stack.pop_back();
      cl.push_back(z);
      if (++out.total_sites > cap)
        throw censored_error("closed cluster exploration exceeded cap");
      lattice_neighbors<D>(z, nb);
      for (const IVec<D>& u : nb)
        if (!field.open(u) && seen.insert(u).second) stack.push_back(u);
    }
    canonicalize<D>(cl);
    out.clusters.push_back(std::move(cl));
  }
  return out;
}

// closure of seeds united with the closures of all closed clusters meeting it
template <int D, class Field>
Animal<D> cluster_hull(const Field& field, const Animal<D>& seeds, std::size_t cap = 100000) {
  ClosedClusters<D> cc = closed_clusters_meeting<D>(field, seeds, cap);
  Animal<D> out = closure_of<D>(seeds);
  for (const Animal<D>& cl : cc.clusters) {
    Animal<D> cb = closure_of<D>(cl);
    out.insert(out.end(), cb.begin(), cb.end());
  }
  canonicalize<D>(out);
  return out;
}

// minimum of sum of open indicators over animals of size exactly s containing
// the origin (exhaustive; s capped by the enumeration guard)
template <int D, class Field>
int min_open_sum(const Field& field, int s) {
  int best = s + 1;
  enumerate_animals_containing<D>(IVec<D>{}, s, [&](const std::vector<IVec<D>>& m) {
    if ((int)m.size() != s) return;
    int sum = 0;
    for (const IVec<D>& z : m) sum += field.open(z) ? 1 : 0;
    if (sum < best) best = sum;
  });
  return best;
}

// Monte Carlo check of the product bound
//   E prod_{Cl meeting A} f(#Cl)  <=  ( E f(#Cl_0) )^{#A}
// with the bounded increasing test function f(k) = exp(min(k, K)).
struct ClusterProductReport {
  double lhs = 0, lhs_sem = 0;
  double rhs_single = 0;        // E f(#Cl_0) estimate
  double rhs_pow = 0;           // rhs_single^{#A}
  double rhs_pow_sem = 0;       // delta-method
  std::uint64_t n = 0;
  bool ok = true;               // lhs <= rhs_pow + 3 * combined sigma
};

template <int D>
ClusterProductReport verify_cluster_product(std::uint64_t seed, double rho,
                                            const Animal<D>& a, int K,
                                            std::uint64_t n_rep) {
  ClusterProductReport rep;
  rep.n = n_rep;
  std::vector<double> lhs_samples, single_samples;
  lhs_samples.reserve(n_rep);
  single_samples.reserve(n_rep);
  auto f = [&](std::size_t k) { return std::exp((double)std::min<std::size_t>(k, K)); };
  for (std::uint64_t i = 0; i < n_rep; ++i) {
    IidSiteField<D> fld = make_iid_site_field<D>(seed, i, 1, rho);
    ClosedClusters<D> cc = closed_clusters_meeting<D>(fld, a);
    double prod = 1;
    for (const Animal<D>& cl : cc.clusters) prod *= f(cl.size());
    lhs_samples.push_back(prod);
    IidSiteField<D> fld2 = make_iid_site_field<D>(seed, i, 2, rho);
    Animal<D> origin{IVec<D>{}};
    ClosedClusters<D> c0 = closed_clusters_meeting<D>(fld2, origin);
    single_samples.push_back(f(c0.clusters.empty() ? 0 : c0.clusters[0].size()));
  }
  rep.lhs = mean_of(lhs_samples);
  rep.lhs_sem = std::sqrt(variance_of(lhs_samples) / (double)n_rep);
  rep.rhs_single = mean_of(single_samples);
  double m = (double)a.size();
  rep.rhs_pow = std::pow(rep.rhs_single, m);
  double sem1 = std::sqrt(variance_of(single_samples) / (double)n_rep);
  rep.rhs_pow_sem = m * std::pow(rep.rhs_single, m - 1) * sem1;
  double sigma = std::sqrt(rep.lhs_sem * rep.lhs_sem + rep.rhs_pow_sem * rep.rhs_pow_sem);
  rep.ok = rep.lhs <= rep.rhs_pow + 3.0 * sigma;
  return rep;
}

}  // namespace vorpoly
