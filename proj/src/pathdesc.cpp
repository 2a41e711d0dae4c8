#include "symheap/pathdesc.hpp"

#include <algorithm>
#include <cassert>
#include <map>

namespace symheap {

namespace {

struct Builder {
  const Digraph& g;
  uint64_t rv;
  PathDesc out;
  std::map<std::tuple<uint32_t, uint32_t, uint64_t>, int> pi_memo;
  std::map<std::pair<uint32_t, uint64_t>, int> rec_nodes;

  bool recursive(uint32_t t) const { return t < 64 && (rv >> t) & 1; }

  int add(PathDesc::N n) {
    out.nodes.push_back(std::move(n));
    return static_cast<int>(out.nodes.size() - 1);
  }
  int eps() { return add({PathDesc::N::K::Eps}); }
  int empty() { return add({PathDesc::N::K::Empty}); }
  int edge(uint32_t u, uint32_t v) {
    PathDesc::N n{PathDesc::N::K::Edge};
    n.u = u; n.v = v;
    return add(n);
  }
  int concat(std::vector<int> parts) {
    std::vector<int> flat;
    for (int p : parts) {
      const auto& n = out.nodes[p];
      if (n.k == PathDesc::N::K::Empty) return empty();
      if (n.k == PathDesc::N::K::Eps) continue;
      if (n.k == PathDesc::N::K::Concat) flat.insert(flat.end(), n.parts.begin(), n.parts.end());
      else flat.push_back(p);
    }
    if (flat.empty()) return eps();
    if (flat.size() == 1) return flat[0];
    PathDesc::N n{PathDesc::N::K::Concat};
    n.parts = std::move(flat);
    return add(n);
  }
  int alt(std::vector<int> parts) {
    std::vector<int> flat;
    for (int p : parts) {
      const auto& n = out.nodes[p];
      if (n.k == PathDesc::N::K::Empty) continue;
      if (n.k == PathDesc::N::K::Union) flat.insert(flat.end(), n.parts.begin(), n.parts.end());
      else flat.push_back(p);
    }
    if (flat.empty()) return empty();
    if (flat.size() == 1) return flat[0];
    PathDesc::N n{PathDesc::N::K::Union};
    n.parts = std::move(flat);
    return add(n);
  }
  int rec(uint32_t u, uint64_t dbits) {
    auto key = std::make_pair(u, dbits);
    auto it = rec_nodes.find(key);
    if (it != rec_nodes.end()) return it->second;
    PathDesc::N n{PathDesc::N::K::Rec};
    n.u = u; n.dbits = dbits;
    int id = add(n);
    rec_nodes[key] = id;
    return id;
  }

  void ensure_rec_def(uint32_t t, uint64_t dbits) {
    auto key = std::make_pair(t, dbits);
    for (auto& [k, v] : out.rec_defs)
      if (k == key) return;
    out.rec_defs.push_back({key, -1});  // reserve: recursion hits memoized Π
    int body = pi(t, t, dbits);
    for (auto& [k, v] : out.rec_defs)
      if (k == key) v = body;
  }

  int pi(uint32_t u, uint32_t v, uint64_t dbits) {
    auto key = std::make_tuple(u, v, dbits);
    auto it = pi_memo.find(key);
    if (it != pi_memo.end()) {
      // every cycle passes a recursive vertex, so re-entry during
      // construction means the rv mask does not belong to this graph
      if (it->second == -2) throw std::logic_error("path description: rv mask inconsistent with graph");
      return it->second;
    }
    pi_memo[key] = -2;
    std::vector<int> alts;
    for (uint32_t t : g.succ[u]) {
      if (t == v) {
        alts.push_back(edge(u, v));
        continue;
      }
      if (!recursive(t)) {
        alts.push_back(concat({edge(u, t), pi(t, v, dbits)}));
        continue;
      }
      if ((dbits >> t) & 1) continue;  // visited recursive vertex: excluded
      uint64_t d2 = dbits | (1ull << t);
      ensure_rec_def(t, d2);
      alts.push_back(concat({edge(u, t), rec(t, d2), pi(t, v, d2)}));
    }
    int r = alt(std::move(alts));
    pi_memo[key] = r;
    return r;
  }
};

std::string dset(uint64_t bits) {
  std::string s = "{";
  bool first = true;
  for (int i = 0; i < 64; ++i)
    if (bits & (1ull << i)) {
      if (!first) s += ", ";
      s += std::to_string(i);
      first = false;
    }
  return s + "}";
}

}  // namespace

PathDesc describe_paths(const Digraph& g, uint64_t rv_mask, uint32_t u, uint32_t v) {
  Builder b{g, rv_mask};
  b.out.root = -1;
  int root = b.pi(u, v, 0);
  b.out.root = root;
  return std::move(b.out);
}

PathDesc describe_paths(const Cfg& cfg, uint32_t u, uint32_t v) {
  Digraph g{cfg.vertex_count, cfg.succ, cfg.start};
  return describe_paths(g, cfg.rv_mask, u, v);
}

std::string PathDesc::print_node(int id) const {
  const N& n = nodes[id];
  switch (n.k) {
    case N::K::Eps: return "{ε}";
    case N::K::Empty: return "∅";
    case N::K::Edge:
      return "(" + std::to_string(n.u) + ", " + std::to_string(n.v) + ")";
    case N::K::Concat: {
      std::string s;
      for (size_t i = 0; i < n.parts.size(); ++i) {
        if (i) s += " ∘ ";
        const N& c = nodes[n.parts[i]];
        if (c.k == N::K::Union) s += "(" + print_node(n.parts[i]) + ")";
        else s += print_node(n.parts[i]);
      }
      return s;
    }
    case N::K::Union: {
      std::string s;
      for (size_t i = 0; i < n.parts.size(); ++i) {
        if (i) s += " ∪ ";
        s += print_node(n.parts[i]);
      }
      return s;
    }
    case N::K::Rec:
      return "Rec(" + std::to_string(n.u) + ", " + dset(n.dbits) + ")";
  }
  return "?";
}

std::string PathDesc::print_root() const { return print_node(root); }

std::vector<std::string> PathDesc::print_rec_defs() const {
  std::vector<std::string> out;
  for (auto& [key, body] : rec_defs) {
    std::string rec = "Rec(" + std::to_string(key.first) + ", " + dset(key.second) + ")";
    out.push_back(rec + " = " + print_node(body) + " ∘ " + rec + " ∪ {ε}");
  }
  return out;
}

namespace {

struct Enumerator {
  const PathDesc& d;
  std::map<std::pair<uint32_t, uint64_t>, int> def_of;
  std::map<std::pair<int, int>, std::set<Path>> memo;

  const std::set<Path>& denote(int id, int budget) {
    auto key = std::make_pair(id, budget);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::set<Path> r;
    const PathDesc::N& n = d.nodes[id];
    switch (n.k) {
      case PathDesc::N::K::Eps:
        r.insert(Path{});
        break;
      case PathDesc::N::K::Empty:
        break;
      case PathDesc::N::K::Edge:
        if (budget >= 1) r.insert(Path{{n.u, n.v}});
        break;
      case PathDesc::N::K::Concat: {
        std::set<Path> acc{Path{}};
        for (int p : n.parts) {
          std::set<Path> next;
          for (const Path& a : acc) {
            int rem = budget - static_cast<int>(a.size());
            if (rem < 0) continue;
            for (const Path& b : denote(p, rem)) {
              if (static_cast<int>(a.size() + b.size()) > budget) continue;
              Path c = a;
              c.insert(c.end(), b.begin(), b.end());
              next.insert(std::move(c));
            }
          }
          acc = std::move(next);
        }
        r = std::move(acc);
        break;
      }
      case PathDesc::N::K::Union:
        for (int p : n.parts)
          for (const Path& a : denote(p, budget)) r.insert(a);
        break;
      case PathDesc::N::K::Rec: {
        // {ε} plus cycles followed by more repetitions; each cycle consumes
        // at least one edge, so the recursion is well-founded on the budget
        r.insert(Path{});
        auto it2 = def_of.find({n.u, n.dbits});
        if (it2 == def_of.end()) break;
        for (const Path& a : denote(it2->second, budget)) {
          if (a.empty()) continue;
          for (const Path& b : denote(id, budget - static_cast<int>(a.size()))) {
            if (static_cast<int>(a.size() + b.size()) > budget) continue;
            Path c = a;
            c.insert(c.end(), b.begin(), b.end());
            r.insert(std::move(c));
          }
        }
        break;
      }
    }
    return memo[key] = std::move(r);
  }
};

}  // namespace

std::set<Path> enumerate_bounded(const PathDesc& d, int max_len) {
  Enumerator e{d};
  for (auto& [key, body] : d.rec_defs) e.def_of[key] = body;
  return e.denote(d.root, max_len);
}

std::set<Path> brute_force_paths(const Digraph& g, uint32_t u, uint32_t v, int max_len) {
  std::set<Path> out;
  Path cur;
  std::function<void(uint32_t)> dfs = [&](uint32_t x) {
    if (x == v && !cur.empty()) out.insert(cur);
    if (static_cast<int>(cur.size()) >= max_len) return;
    for (uint32_t w : g.succ[x]) {
      cur.emplace_back(x, w);
      dfs(w);
      cur.pop_back();
    }
  };
  dfs(u);
  return out;
}

}  // namespace symheap
