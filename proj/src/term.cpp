#include "symheap/term.hpp"

#include <boost/functional/hash.hpp>

#include <algorithm>
#include <cassert>
#include <sstream>

namespace symheap {

// Implemented in heap.cpp; used by mk_cell to expand definite sources.
Id heap_read(Id heapdef, Id x, Sort vsort);

bool Node::operator==(const Node& o) const {
  return kind == o.kind && sort == o.sort && a == o.a && b == o.b &&
         num == o.num && bits == o.bits && flag == o.flag && sym == o.sym &&
         kids == o.kids && arms == o.arms && lin == o.lin;
}

static size_t hash_node(const Node& n) {
  size_t h = 0;
  boost::hash_combine(h, static_cast<int>(n.kind));
  boost::hash_combine(h, static_cast<int>(n.sort));
  boost::hash_combine(h, n.a);
  boost::hash_combine(h, n.b);
  boost::hash_combine(h, n.num);
  boost::hash_combine(h, n.bits);
  boost::hash_combine(h, n.flag);
  boost::hash_combine(h, n.sym);
  for (Id k : n.kids) boost::hash_combine(h, k);
  for (auto& [x, y] : n.arms) { boost::hash_combine(h, x); boost::hash_combine(h, y); }
  for (auto& [x, c] : n.lin) { boost::hash_combine(h, x); boost::hash_combine(h, c); }
  return h;
}

Id Arena::intern(Node n) {
  std::lock_guard<std::mutex> lock(mu_);
  size_t h = hash_node(n);
  auto& bucket = buckets_[h];
  for (Id id : bucket)
    if (nodes_[id] == n) return id;
  Id id = static_cast<Id>(nodes_.size());
  nodes_.push_back(std::move(n));
  bucket.push_back(id);
  return id;
}

Arena& arena() {
  static Arena a;
  return a;
}

static int cmp_int(const Int& a, const Int& b) { return a < b ? -1 : (b < a ? 1 : 0); }

int structural_compare(Id x, Id y) {
  if (x == y) return 0;
  const Node& nx = node(x);
  const Node& ny = node(y);
  if (nx.kind != ny.kind) return nx.kind < ny.kind ? -1 : 1;
  if (nx.sort != ny.sort) return nx.sort < ny.sort ? -1 : 1;
  if (int c = cmp_int(nx.num, ny.num)) return c;
  if (nx.bits != ny.bits) return nx.bits < ny.bits ? -1 : 1;
  if (nx.flag != ny.flag) return nx.flag < ny.flag ? -1 : 1;
  if (int c = nx.sym.compare(ny.sym)) return c < 0 ? -1 : 1;
  auto cmp_id = [](Id a, Id b) {
    if (a == b) return 0;
    if (a == no_id || b == no_id) return a == no_id ? -1 : 1;
    return structural_compare(a, b);
  };
  if (int c = cmp_id(nx.a, ny.a)) return c;
  if (int c = cmp_id(nx.b, ny.b)) return c;
  if (nx.kids.size() != ny.kids.size()) return nx.kids.size() < ny.kids.size() ? -1 : 1;
  for (size_t i = 0; i < nx.kids.size(); ++i)
    if (int c = cmp_id(nx.kids[i], ny.kids[i])) return c;
  if (nx.arms.size() != ny.arms.size()) return nx.arms.size() < ny.arms.size() ? -1 : 1;
  for (size_t i = 0; i < nx.arms.size(); ++i) {
    if (int c = cmp_id(nx.arms[i].first, ny.arms[i].first)) return c;
    if (int c = cmp_id(nx.arms[i].second, ny.arms[i].second)) return c;
  }
  if (nx.lin.size() != ny.lin.size()) return nx.lin.size() < ny.lin.size() ? -1 : 1;
  for (size_t i = 0; i < nx.lin.size(); ++i) {
    if (int c = cmp_id(nx.lin[i].first, ny.lin[i].first)) return c;
    if (int c = cmp_int(nx.lin[i].second, ny.lin[i].second)) return c;
  }
  return 0;
}

// ---------------------------------------------------------------- guards

Id top() {
  Node n; n.kind = Kind::Top; n.sort = Sort::Guard;
  return arena().intern(std::move(n));
}

Id bot() {
  Node n; n.kind = Kind::Bot; n.sort = Sort::Guard;
  return arena().intern(std::move(n));
}

static bool is_literal(Id g) {
  Kind k = kind(g);
  return k == Kind::EqA || k == Kind::LtA || k == Kind::EqL;
}

Id g_not(Id g) {
  const Node& n = node(g);
  switch (n.kind) {
    case Kind::Top: return bot();
    case Kind::Bot: return top();
    case Kind::Not: return n.a;
    case Kind::And: {
      std::vector<Id> ks;
      for (Id k : n.kids) ks.push_back(g_not(k));
      return g_or(std::move(ks));
    }
    case Kind::Or: {
      std::vector<Id> ks;
      for (Id k : n.kids) ks.push_back(g_not(k));
      return g_and(std::move(ks));
    }
    default: {
      Node m; m.kind = Kind::Not; m.sort = Sort::Guard; m.a = g;
      return arena().intern(std::move(m));
    }
  }
}

static Id connect(Kind k, std::vector<Id> gs) {
  const Id unit = (k == Kind::And) ? top() : bot();
  const Id zero = (k == Kind::And) ? bot() : top();
  std::vector<Id> flat;
  for (Id g : gs) {
    if (g == zero) return zero;
    if (g == unit) continue;
    if (kind(g) == k) {
      for (Id kk : node(g).kids) flat.push_back(kk);
    } else {
      flat.push_back(g);
    }
  }
  std::sort(flat.begin(), flat.end(), structural_less);
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  // complementary pair kills the connective
  for (Id g : flat) {
    if (kind(g) == Kind::Not &&
        std::find(flat.begin(), flat.end(), node(g).a) != flat.end())
      return zero;
  }
  // absorption: x op (x dual-op y) = x
  Kind dual = (k == Kind::And) ? Kind::Or : Kind::And;
  std::vector<Id> kept;
  for (Id g : flat) {
    if (kind(g) == dual) {
      bool absorbed = false;
      for (Id s : flat) {
        if (s == g || kind(s) == dual) continue;
        const auto& inner = node(g).kids;
        if (std::find(inner.begin(), inner.end(), s) != inner.end()) { absorbed = true; break; }
      }
      if (absorbed) continue;
    }
    kept.push_back(g);
  }
  if (kept.empty()) return unit;
  if (kept.size() == 1) return kept[0];
  Node n; n.kind = k; n.sort = Sort::Guard; n.kids = std::move(kept);
  return arena().intern(std::move(n));
}

Id g_and(std::vector<Id> gs) { return connect(Kind::And, std::move(gs)); }
Id g_or(std::vector<Id> gs) { return connect(Kind::Or, std::move(gs)); }

// ---------------------------------------------------------------- linear arith

Id mk_int(Int v) {
  Node n; n.kind = Kind::IntLin; n.sort = Sort::Arith; n.num = std::move(v);
  return arena().intern(std::move(n));
}

Id mk_lin(std::vector<std::pair<Id, Int>> atoms, Int constant) {
  std::map<Id, Int, decltype(&structural_less)> acc(&structural_less);
  for (auto& [a, c] : atoms) {
    if (c == 0) continue;
    acc[a] += c;
  }
  Node n; n.kind = Kind::IntLin; n.sort = Sort::Arith; n.num = std::move(constant);
  for (auto& [a, c] : acc)
    if (c != 0) n.lin.emplace_back(a, c);
  return arena().intern(std::move(n));
}

static Id lin_combine(Id x, const Int& kx, Id y, const Int& ky) {
  const Node& nx = node(x);
  const Node& ny = node(y);
  std::vector<std::pair<Id, Int>> atoms;
  for (auto& [a, c] : nx.lin) atoms.emplace_back(a, c * kx);
  for (auto& [a, c] : ny.lin) atoms.emplace_back(a, c * ky);
  return mk_lin(std::move(atoms), nx.num * kx + ny.num * ky);
}

template <typename F>
static Id distribute2(Id x, Id y, Sort vsort, F f) {
  bool ux = kind(x) == Kind::Union;
  bool uy = kind(y) == Kind::Union;
  if (!ux && !uy) return f(x, y);
  std::vector<std::pair<Id, Id>> arms;
  auto arms_of = [](Id t) {
    std::vector<std::pair<Id, Id>> v;
    if (kind(t) == Kind::Union) v = node(t).arms;
    else v.emplace_back(top(), t);
    return v;
  };
  for (auto& [g1, v1] : arms_of(x))
    for (auto& [g2, v2] : arms_of(y)) {
      Id g = g_and(g1, g2);
      if (g == bot()) continue;
      arms.emplace_back(g, f(v1, v2));
    }
  return mk_union(std::move(arms), vsort);
}

template <typename F>
static Id distribute1(Id x, Sort vsort, F f) {
  if (kind(x) != Kind::Union) return f(x);
  std::vector<std::pair<Id, Id>> arms;
  for (auto& [g, v] : node(x).arms) arms.emplace_back(g, f(v));
  return mk_union(std::move(arms), vsort);
}

Id a_add(Id x, Id y) {
  return distribute2(x, y, Sort::Arith,
                     [](Id a, Id b) { return lin_combine(a, 1, b, 1); });
}

Id a_sub(Id x, Id y) {
  return distribute2(x, y, Sort::Arith,
                     [](Id a, Id b) { return lin_combine(a, 1, b, -1); });
}

Id a_neg(Id x) {
  return distribute1(x, Sort::Arith,
                     [](Id a) { return lin_combine(a, -1, mk_int(0), 0); });
}

Id a_scale(const Int& k, Id x) {
  return distribute1(x, Sort::Arith,
                     [&](Id a) { return lin_combine(a, k, mk_int(0), 0); });
}

// ---------------------------------------------------------------- locs

Id mk_null() {
  Node n; n.kind = Kind::NullLoc; n.sort = Sort::Loc;
  return arena().intern(std::move(n));
}

Id mk_addr(Int alloc, uint64_t epoch, bool in_cycle) {
  Node n; n.kind = Kind::Addr; n.sort = Sort::Loc;
  n.num = std::move(alloc); n.bits = epoch; n.flag = in_cycle;
  return arena().intern(std::move(n));
}

Id mk_var(const std::string& name) {
  Node n; n.kind = Kind::Var; n.sort = Sort::Loc; n.sym = name;
  return arena().intern(std::move(n));
}

Id mk_field(Id base, const std::string& field) {
  return distribute1(base, Sort::Loc, [&](Id b) {
    Node n; n.kind = Kind::Field; n.sort = Sort::Loc; n.a = b; n.sym = field;
    return arena().intern(std::move(n));
  });
}

Id mk_cell(Id source_heap, Id loc, Sort value_sort) {
  return distribute1(loc, value_sort, [&](Id x) {
    if (is_definite(source_heap) && !is_empty_heap(source_heap))
      return heap_read(source_heap, x, value_sort);
    Node n; n.kind = Kind::Cell; n.sort = value_sort;
    n.a = source_heap; n.b = x;
    Id cell = arena().intern(std::move(n));
    // arith cells live inside linear sums as atoms
    if (value_sort == Sort::Arith) return mk_lin({{cell, Int(1)}}, 0);
    return cell;
  });
}

// ---------------------------------------------------------------- unions

Id mk_union(std::vector<std::pair<Id, Id>> in, Sort value_sort) {
  std::vector<std::pair<Id, Id>> flat;
  // flatten nested unions, conjoining guards; drop unsatisfied arms
  std::function<void(Id, Id)> push = [&](Id g, Id v) {
    if (g == bot()) return;
    if (kind(v) == Kind::Union) {
      for (auto& [g2, v2] : node(v).arms) push(g_and(g, g2), v2);
      return;
    }
    if (sort_of(v) != value_sort) throw std::runtime_error("union: mixed arm sorts");
    flat.emplace_back(g, v);
  };
  for (auto& [g, v] : in) push(g, v);

  // group arms by value, drop guards implied by a sibling guard of the
  // same value, then join what is left by disjunction
  std::vector<std::pair<Id, std::vector<Id>>> groups;  // value -> guards
  for (auto& [g, v] : flat) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](auto& p) { return p.first == v; });
    if (it == groups.end()) groups.push_back({v, {g}});
    else it->second.push_back(g);
  }
  std::vector<std::pair<Id, Id>> arms;
  for (auto& [v, gs] : groups) {
    std::vector<Id> kept;
    for (size_t i = 0; i < gs.size(); ++i) {
      bool drop = false;
      for (size_t j = 0; j < gs.size() && !drop; ++j) {
        if (i == j || gs[i] == gs[j]) continue;
        if (implies(gs[i], gs[j])) drop = true;
      }
      if (!drop && std::find(kept.begin(), kept.end(), gs[i]) == kept.end())
        kept.push_back(gs[i]);
    }
    if (kept.empty()) kept.push_back(gs[0]);
    Id g = g_or(std::move(kept));
    if (g == bot()) continue;
    arms.emplace_back(g, v);
  }
  for (auto& [g, v] : arms)
    if (g == top()) return v;
  std::sort(arms.begin(), arms.end(), [](auto& l, auto& r) {
    if (int c = structural_compare(l.first, r.first)) return c < 0;
    return structural_compare(l.second, r.second) < 0;
  });
  Node n; n.kind = Kind::Union; n.sort = value_sort; n.arms = std::move(arms);
  return arena().intern(std::move(n));
}

Id ite_term(Id cond, Id then_v, Id else_v) {
  Sort s = kind(then_v) != Kind::Union || !node(then_v).arms.empty()
               ? sort_of(then_v)
               : sort_of(else_v);
  return mk_union({{cond, then_v}, {g_not(cond), else_v}}, s);
}

// ---------------------------------------------------------------- comparisons

// A guard over unions rewrites to a disjunction over the arms, so guard
// normal forms never contain unions.
template <typename F>
static Id distribute_guard(Id x, Id y, F f) {
  bool ux = kind(x) == Kind::Union;
  bool uy = kind(y) == Kind::Union;
  if (!ux && !uy) return f(x, y);
  auto arms_of = [](Id t) {
    std::vector<std::pair<Id, Id>> v;
    if (kind(t) == Kind::Union) v = node(t).arms;
    else v.emplace_back(top(), t);
    return v;
  };
  std::vector<Id> cases;
  for (auto& [g1, v1] : arms_of(x))
    for (auto& [g2, v2] : arms_of(y))
      cases.push_back(g_and({g1, g2, distribute_guard(v1, v2, f)}));
  return g_or(std::move(cases));
}

static bool cell_free(Id t) {
  const Node& n = node(t);
  switch (n.kind) {
    case Kind::Cell:
    case Kind::Union: return false;
    case Kind::Field: return cell_free(n.a);
    default: return true;
  }
}

static Id eq_loc_fold(Id l, Id r);

static Id eq_loc_sym(Id l, Id r) {
  // canonical orientation: the structurally larger side (cells, fields)
  // first, so comparisons read like "LI(p) = null"
  if (structural_compare(l, r) < 0) std::swap(l, r);
  Node n; n.kind = Kind::EqL; n.sort = Sort::Guard; n.a = l; n.b = r;
  return arena().intern(std::move(n));
}

static Id eq_loc_fold(Id l, Id r) {
  if (l == r) return top();
  const Node& nl = node(l);
  const Node& nr = node(r);
  Kind kl = nl.kind, kr = nr.kind;
  auto one_is = [&](Kind k) { return kl == k || kr == k; };
  if (one_is(Kind::Cell)) return eq_loc_sym(l, r);
  // a variable cell is a distinct location class: values never alias it
  if (one_is(Kind::Var)) return bot();
  if (kl == Kind::Field && kr == Kind::Field) {
    if (nl.sym == nr.sym) return eq_loc_fold(nl.a, nr.a);
    if (cell_free(l) && cell_free(r)) return bot();
    return eq_loc_sym(l, r);
  }
  if (one_is(Kind::Field)) {
    Id other = kl == Kind::Field ? r : l;
    Kind ko = kind(other);
    if (ko == Kind::NullLoc || ko == Kind::Addr) return bot();
    return eq_loc_sym(l, r);
  }
  // Null vs Addr, Addr vs different Addr
  return bot();
}

Id g_eq(Id lhs, Id rhs) {
  if (sort_of(lhs) != sort_of(rhs)) throw std::runtime_error("eq: sort mismatch");
  if (sort_of(lhs) == Sort::Loc) {
    return distribute_guard(lhs, rhs, eq_loc_fold);
  }
  return distribute_guard(lhs, rhs, [](Id a, Id b) {
    Id L = lin_combine(a, 1, b, -1);
    const Node& n = node(L);
    if (n.lin.empty()) return n.num == 0 ? top() : bot();
    if (n.lin[0].second < 0) L = lin_combine(L, -1, mk_int(0), 0);
    Node m; m.kind = Kind::EqA; m.sort = Sort::Guard; m.a = L;
    return arena().intern(std::move(m));
  });
}

Id g_lt(Id lhs, Id rhs) {
  if (sort_of(lhs) != Sort::Arith || sort_of(rhs) != Sort::Arith)
    throw std::runtime_error("lt: arith operands required");
  return distribute_guard(lhs, rhs, [](Id a, Id b) {
    Id L = lin_combine(a, 1, b, -1);
    const Node& n = node(L);
    if (n.lin.empty()) return n.num < 0 ? top() : bot();
    Node m; m.kind = Kind::LtA; m.sort = Sort::Guard; m.a = L;
    return arena().intern(std::move(m));
  });
}

// -------------------------------------------------------- congruence check

namespace {

// Tiny union-find with congruence over Field nodes; used only for the
// guard-absorption implication test.
class Congruence {
 public:
  void add_term(Id t) {
    if (parent_.count(t)) return;
    parent_[t] = t;
    terms_.push_back(t);
    if (kind(t) == Kind::Field) add_term(node(t).a);
    if (kind(t) == Kind::Cell) add_term(node(t).b);
  }
  Id find(Id t) {
    auto it = parent_.find(t);
    if (it == parent_.end()) { add_term(t); return find(t); }
    if (it->second == t) return t;
    Id r = find(it->second);
    parent_[t] = r;
    return r;
  }
  void merge(Id a, Id b) {
    a = find(a); b = find(b);
    if (a != b) parent_[a] = b;
  }
  void close() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < terms_.size(); ++i)
        for (size_t j = i + 1; j < terms_.size(); ++j) {
          Id x = terms_[i], y = terms_[j];
          if (kind(x) != Kind::Field || kind(y) != Kind::Field) continue;
          if (node(x).sym != node(y).sym) continue;
          if (find(x) == find(y)) continue;
          if (find(node(x).a) == find(node(y).a)) { merge(x, y); changed = true; }
        }
    }
  }
  bool same(Id a, Id b) { return find(a) == find(b); }
  std::vector<Id> class_of(Id a) {
    std::vector<Id> out;
    Id r = find(a);
    for (Id t : terms_)
      if (find(t) == r) out.push_back(t);
    return out;
  }

 private:
  std::map<Id, Id> parent_;
  std::vector<Id> terms_;
};

std::vector<Id> conjuncts(Id g) {
  if (g == top()) return {};
  if (kind(g) == Kind::And) return node(g).kids;
  return {g};
}

}  // namespace

bool implies(Id g1, Id g2) {
  if (g2 == top() || g1 == bot() || g1 == g2) return true;
  if (g1 == top() || g2 == bot()) return false;
  if (kind(g2) == Kind::Or) {
    for (Id d : node(g2).kids)
      if (implies(g1, d)) return true;
    return false;
  }
  std::vector<Id> l1 = conjuncts(g1);
  std::vector<Id> l2 = conjuncts(g2);
  if (std::any_of(l1.begin(), l1.end(),
                  [](Id g) { return kind(g) == Kind::Or; }))
    l1.erase(std::remove_if(l1.begin(), l1.end(),
                            [](Id g) { return kind(g) == Kind::Or; }),
             l1.end());

  Congruence cc;
  std::vector<Id> diseqs;
  for (Id l : l1) {
    if (kind(l) == Kind::EqL) { cc.add_term(node(l).a); cc.add_term(node(l).b); cc.merge(node(l).a, node(l).b); }
    if (kind(l) == Kind::Not && kind(node(l).a) == Kind::EqL) {
      diseqs.push_back(node(l).a);
      cc.add_term(node(node(l).a).a);
      cc.add_term(node(node(l).a).b);
    }
  }
  for (Id l : l2) {
    if (kind(l) == Kind::EqL) { cc.add_term(node(l).a); cc.add_term(node(l).b); }
    if (kind(l) == Kind::Not && kind(node(l).a) == Kind::EqL) {
      cc.add_term(node(node(l).a).a);
      cc.add_term(node(node(l).a).b);
    }
  }
  cc.close();

  auto derivable = [&](Id lit) -> bool {
    if (std::find(l1.begin(), l1.end(), lit) != l1.end()) return true;
    if (kind(lit) == Kind::EqL)
      return cc.same(node(lit).a, node(lit).b);
    if (kind(lit) == Kind::Not && kind(node(lit).a) == Kind::EqL) {
      Id a = node(node(lit).a).a;
      Id b = node(node(lit).a).b;
      for (Id d : diseqs) {
        Id c = node(d).a, e = node(d).b;
        if ((cc.same(c, a) && cc.same(e, b)) || (cc.same(c, b) && cc.same(e, a)))
          return true;
      }
      // distinct concrete members of the two classes refute equality
      for (Id ca : cc.class_of(a))
        for (Id cb : cc.class_of(b))
          if (cell_free(ca) && cell_free(cb) && eq_loc_fold(ca, cb) == bot())
            return true;
      return false;
    }
    return false;
  };
  for (Id lit : l2)
    if (!derivable(lit)) return false;
  return true;
}

// ---------------------------------------------------------------- heaps

Id mk_heap_def(std::vector<std::pair<Id, Id>> entries) {
  std::vector<std::pair<Id, Id>> out;
  for (auto& [k, v] : entries) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](auto& p) { return p.first == k; });
    if (it != out.end()) it->second = v;
    else out.emplace_back(k, v);
  }
  Node n; n.kind = Kind::HeapDef; n.sort = Sort::Heap; n.arms = std::move(out);
  return arena().intern(std::move(n));
}

Id empty_heap() { return mk_heap_def({}); }

Id mk_heap_compose_raw(Id h1, Id h2) {
  Node n; n.kind = Kind::HeapCompose; n.sort = Sort::Heap; n.a = h1; n.b = h2;
  return arena().intern(std::move(n));
}

Id mk_heap_merge_raw(std::vector<std::pair<Id, Id>> arms) {
  Node n; n.kind = Kind::HeapMerge; n.sort = Sort::Heap; n.arms = std::move(arms);
  return arena().intern(std::move(n));
}

Id mk_heap_write_raw(Id h, Id key, Id value) {
  Node n; n.kind = Kind::HeapWrite; n.sort = Sort::Heap; n.a = h;
  n.arms.emplace_back(key, value);
  return arena().intern(std::move(n));
}

Id mk_heap_rec(uint32_t vertex, uint64_t visited_bits) {
  Node n; n.kind = Kind::HeapRec; n.sort = Sort::Heap;
  n.num = vertex; n.bits = visited_bits;
  return arena().intern(std::move(n));
}

bool is_definite(Id h) { return kind(h) == Kind::HeapDef; }
bool is_empty_heap(Id h) { return kind(h) == Kind::HeapDef && node(h).arms.empty(); }

bool is_ground(Id t) {
  const Node& n = node(t);
  switch (n.kind) {
    case Kind::Cell:
    case Kind::Union: return false;
    case Kind::IntLin: {
      for (auto& [a, c] : n.lin)
        if (!is_ground(a)) return false;
      return true;
    }
    case Kind::Field: return is_ground(n.a);
    case Kind::NullLoc:
    case Kind::Addr:
    case Kind::Var:
    case Kind::Top:
    case Kind::Bot: return true;
    case Kind::EqA:
    case Kind::LtA: return is_ground(n.a);
    case Kind::EqL: return is_ground(n.a) && is_ground(n.b);
    case Kind::Not: return is_ground(n.a);
    case Kind::And:
    case Kind::Or: {
      for (Id k : n.kids)
        if (!is_ground(k)) return false;
      return true;
    }
    case Kind::HeapDef: {
      for (auto& [k, v] : n.arms)
        if (!is_ground(k) || !is_ground(v)) return false;
      return true;
    }
    default: return false;  // compose/merge/write/rec
  }
}

void collect_cells(Id t, std::vector<Id>& out) {
  const Node& n = node(t);
  switch (n.kind) {
    case Kind::Cell:
      out.push_back(t);
      collect_cells(n.b, out);
      return;
    case Kind::IntLin:
      for (auto& [a, c] : n.lin) collect_cells(a, out);
      return;
    case Kind::Field:
    case Kind::Not:
    case Kind::EqA:
    case Kind::LtA:
      collect_cells(n.a, out);
      return;
    case Kind::EqL:
      collect_cells(n.a, out);
      collect_cells(n.b, out);
      return;
    case Kind::And:
    case Kind::Or:
      for (Id k : n.kids) collect_cells(k, out);
      return;
    case Kind::Union:
    case Kind::HeapDef:
    case Kind::HeapMerge:
      for (auto& [g, v] : n.arms) { collect_cells(g, out); collect_cells(v, out); }
      return;
    case Kind::HeapCompose:
      collect_cells(n.a, out);
      collect_cells(n.b, out);
      return;
    case Kind::HeapWrite:
      collect_cells(n.a, out);
      collect_cells(n.arms[0].first, out);
      collect_cells(n.arms[0].second, out);
      return;
    default:
      return;
  }
}

}  // namespace symheap
