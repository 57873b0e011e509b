#pragma once

// Enumeration of connected vertex sets of an implicit graph. Every connected
// set of size <= max_size that contains the root is reported exactly once.
//
// The branching rule is the classic one: repeatedly pop a candidate v from
// the frontier; first enumerate all sets that contain v (recursing with the
// frontier extended by v's unseen neighbors), then bar v for the rest of the
// frame so later branches enumerate exactly the sets that avoid it.
//
// The controller receives each set when it is first formed and returns
// whether extensions of the set should be explored; returning false is a
// monotone prune (the set itself has already been reported).

#include <unordered_map>
#include <vector>

namespace vorpoly {

namespace detail {

template <class Node, class Hasher, class NbrFn, class CtrlFn>
struct ConnEnum {
  int max_size;
  NbrFn& nbrs;
  CtrlFn& ctrl;
  std::unordered_map<Node, char, Hasher> seen;
  std::vector<Node> members;
  std::vector<Node> tmp;

  void run(const Node& root) {
    seen.emplace(root, 1);
    members.push_back(root);
    std::vector<Node> cands;
    nbrs(root, tmp);
    for (const Node& u : tmp)
      if (seen.emplace(u, 1).second) cands.push_back(u);
    rec(cands);
  }

  void rec(std::vector<Node>& cands) {
    if (!ctrl(members)) return;
    if ((int)members.size() >= max_size) return;
    while (!cands.empty()) {
      Node v = cands.back();
      cands.pop_back();
      std::vector<Node> child = cands;
      std::vector<Node> added;
      nbrs(v, tmp);
      for (const Node& u : tmp)
        if (seen.emplace(u, 1).second) {
          child.push_back(u);
          added.push_back(u);
        }
      members.push_back(v);
      rec(child);
      members.pop_back();
      for (const Node& u : added) seen.erase(u);
      // v stays barred until this frame finishes
    }
  }
};

}  // namespace detail

template <class Node, class Hasher, class NbrFn, class CtrlFn>
void for_each_connected_superset(const Node& root, int max_size, NbrFn&& neighbors_of,
                                 CtrlFn&& ctrl) {
  if (max_size < 1) return;
  detail::ConnEnum<Node, Hasher, NbrFn, CtrlFn> e{max_size, neighbors_of, ctrl, {}, {}, {}};
  e.run(root);
}

}  // namespace vorpoly
