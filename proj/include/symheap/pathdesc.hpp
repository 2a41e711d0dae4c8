#pragma once

#include <set>

#include "symheap/lang.hpp"

namespace symheap {

using Path = std::vector<std::pair<uint32_t, uint32_t>>;

// Regular-expression-like description of all paths between two vertices,
// with recursion symbols standing for cycle sets.
class PathDesc {
 public:
  struct N {
    enum class K { Eps, Empty, Edge, Concat, Union, Rec } k;
    uint32_t u = 0, v = 0;    // Edge
    uint64_t dbits = 0;       // Rec (u = vertex)
    std::vector<int> parts;   // Concat / Union
  };

  int root = -1;
  std::vector<N> nodes;
  // (vertex, D) -> node index of Π(u, u, D); the full definition is
  // {ε} ∪ Π(u, u, D) ∘ Rec(u, D)
  std::vector<std::pair<std::pair<uint32_t, uint64_t>, int>> rec_defs;

  std::string print_node(int n) const;
  std::string print_root() const;
  // "Rec(u, {..}) = <pi> ∘ Rec(u, {..}) ∪ {ε}" per definition
  std::vector<std::string> print_rec_defs() const;
};

PathDesc describe_paths(const Digraph& g, uint64_t rv_mask, uint32_t u, uint32_t v);
PathDesc describe_paths(const Cfg& cfg, uint32_t u, uint32_t v);

std::set<Path> enumerate_bounded(const PathDesc& d, int max_len);
std::set<Path> brute_force_paths(const Digraph& g, uint32_t u, uint32_t v, int max_len);

}  // namespace symheap
