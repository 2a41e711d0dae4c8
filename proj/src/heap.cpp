#include "symheap/heap.hpp"

#include <algorithm>
#include <cassert>

#include "symheap/genheap.hpp"

namespace symheap {

static bool g_epoch_addresses = true;
void set_epoch_addresses(bool on) { g_epoch_addresses = on; }
bool epoch_addresses() { return g_epoch_addresses; }

const std::vector<std::pair<Id, Id>>& heap_entries(Id heapdef) {
  assert(is_definite(heapdef));
  return node(heapdef).arms;
}

Id heap_read(Id h, Id x, Sort vsort) {
  assert(is_definite(h));
  std::vector<std::pair<Id, Id>> arms;
  std::vector<Id> negs;
  for (auto& [l, v] : heap_entries(h)) {
    if (sort_of(v) != vsort) continue;  // a type-correct x never matches l
    Id g = g_eq(x, l);
    arms.emplace_back(g, v);
    negs.push_back(g_not(g));
  }
  arms.emplace_back(g_and(std::move(negs)), mk_cell(empty_heap(), x, vsort));
  return mk_union(std::move(arms), vsort);
}

Id Refiner::term(Id e) {
  if (is_empty_heap(ctx_)) return e;
  auto it = memo_.find(e);
  if (it != memo_.end()) return it->second;
  const Node& n = node(e);
  Id out = e;
  switch (n.kind) {
    case Kind::IntLin: {
      Id acc = mk_int(n.num);
      for (auto& [atom, coeff] : n.lin) acc = a_add(acc, a_scale(coeff, term(atom)));
      out = acc;
      break;
    }
    case Kind::NullLoc:
    case Kind::Var:
      break;
    case Kind::Addr:
      if (n.flag && g_epoch_addresses)
        out = mk_addr(n.num, arena().fresh_epoch(), true);
      break;
    case Kind::Field:
      out = mk_field(term(n.a), n.sym);
      break;
    case Kind::Cell: {
      // ctx • LI(src, x) reads from ctx ∘ src; a pending source defers
      Id key = term(n.b);
      out = read_g(compose_g(ctx_, n.a), key, n.sort);
      break;
    }
    case Kind::Union: {
      std::vector<std::pair<Id, Id>> arms;
      for (auto& [g, v] : n.arms) arms.emplace_back(guard(g), term(v));
      out = mk_union(std::move(arms), n.sort);
      break;
    }
    default:
      throw std::runtime_error("refine: not a term");
  }
  memo_[e] = out;
  return out;
}

Id Refiner::guard(Id g) {
  if (is_empty_heap(ctx_)) return g;
  auto it = memo_.find(g);
  if (it != memo_.end()) return it->second;
  const Node& n = node(g);
  Id out = g;
  switch (n.kind) {
    case Kind::Top:
    case Kind::Bot:
      break;
    case Kind::Not:
      out = g_not(guard(n.a));
      break;
    case Kind::And: {
      std::vector<Id> ks;
      for (Id k : n.kids) ks.push_back(guard(k));
      out = g_and(std::move(ks));
      break;
    }
    case Kind::Or: {
      std::vector<Id> ks;
      for (Id k : n.kids) ks.push_back(guard(k));
      out = g_or(std::move(ks));
      break;
    }
    case Kind::EqA:
      out = g_eq(term(n.a), mk_int(0));
      break;
    case Kind::LtA:
      out = g_lt(term(n.a), mk_int(0));
      break;
    case Kind::EqL:
      out = g_eq(term(n.a), term(n.b));
      break;
    default:
      throw std::runtime_error("refine: not a guard");
  }
  memo_[g] = out;
  return out;
}

Id refine(Id ctx_heap, Id e) { return Refiner(ctx_heap).term(e); }
Id refine_guard(Id ctx_heap, Id g) { return Refiner(ctx_heap).guard(g); }

Id heap_compose(Id h1, Id h2) {
  assert(is_definite(h1) && is_definite(h2));
  if (is_empty_heap(h1)) return h2;
  if (is_empty_heap(h2)) return h1;
  Refiner R(h1);
  std::vector<std::pair<Id, Id>> refined;  // refined keys and values of h2
  for (auto& [l, v] : heap_entries(h2)) refined.emplace_back(R.term(l), R.term(v));

  std::vector<Id> keys;
  for (auto& [k, v] : heap_entries(h1)) keys.push_back(k);
  for (auto& [k, v] : refined)
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);

  auto sort_at = [&](Id x) -> Sort {
    for (auto& [k, v] : heap_entries(h1))
      if (k == x) return sort_of(v);
    for (auto& [k, v] : refined)
      if (k == x) return sort_of(v);
    return Sort::Arith;
  };

  std::vector<std::pair<Id, Id>> out;
  for (Id x : keys) {
    Sort vs = sort_at(x);
    std::vector<std::pair<Id, Id>> arms;
    std::vector<Id> negs;
    for (auto& [k, v] : refined) {
      if (sort_of(v) != vs) continue;
      Id g = g_eq(x, k);
      arms.emplace_back(g, v);
      negs.push_back(g_not(g));
    }
    arms.emplace_back(g_and(std::move(negs)), heap_read(h1, x, vs));
    out.emplace_back(x, mk_union(std::move(arms), vs));
  }
  return mk_heap_def(std::move(out));
}

Id heap_find(Id h, Id x, Id ctx, Id dflt, Sort vsort) {
  assert(is_definite(h) && is_definite(ctx));
  Refiner R(ctx);
  std::vector<std::pair<Id, Id>> arms;
  std::vector<Id> negs;
  for (auto& [l, v] : heap_entries(h)) {
    if (sort_of(v) != vsort) continue;
    Id g = g_eq(x, R.term(l));
    arms.emplace_back(g, R.term(v));
    negs.push_back(g_not(g));
  }
  arms.emplace_back(g_and(std::move(negs)), dflt);
  return mk_union(std::move(arms), vsort);
}

Id heap_merge(const std::vector<std::pair<Id, Id>>& arms) {
  std::vector<Id> keys;
  for (auto& [g, h] : arms) {
    assert(is_definite(h));
    for (auto& [k, v] : heap_entries(h))
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  std::vector<std::pair<Id, Id>> out;
  for (Id x : keys) {
    Sort vs = Sort::Arith;
    for (auto& [g, h] : arms)
      for (auto& [k, v] : heap_entries(h))
        if (k == x) { vs = sort_of(v); goto found; }
  found:
    std::vector<std::pair<Id, Id>> uarms;
    for (auto& [g, h] : arms) uarms.emplace_back(g, heap_read(h, x, vs));
    out.emplace_back(x, mk_union(std::move(uarms), vs));
  }
  return mk_heap_def(std::move(out));
}

Id heap_write(Id h, Id key, Id value) {
  assert(is_definite(h));
  std::vector<std::pair<Id, Id>> out;
  bool key_present = false;
  for (auto& [k, v] : heap_entries(h)) {
    if (k == key) {
      out.emplace_back(k, value);
      key_present = true;
    } else if (sort_of(v) == sort_of(value)) {
      out.emplace_back(k, ite_term(g_eq(k, key), value, v));
    } else {
      out.emplace_back(k, v);
    }
  }
  if (!key_present) out.emplace_back(key, value);
  return mk_heap_def(std::move(out));
}

SemResult heap_read_equiv(Id h1, Id h2, int budget) {
  std::vector<std::pair<Id, Sort>> keys;
  auto add = [&](Id h) {
    for (auto& [k, v] : heap_entries(h)) {
      auto it = std::find_if(keys.begin(), keys.end(),
                             [&](auto& p) { return p.first == k; });
      if (it == keys.end()) keys.emplace_back(k, sort_of(v));
    }
  };
  add(h1);
  add(h2);
  for (int i = 0; i < budget; ++i) {
    GroundStore s;
    s.enable_sampling(static_cast<uint64_t>(i) * 40503 + 7, i < 2 ? 1 : 2, i % 3 == 0 ? 1 : 2);
    for (auto& [k, vs] : keys) {
      try {
        GroundValue a = eval_ground(heap_read(h1, k, vs), s);
        GroundValue b = eval_ground(heap_read(h2, k, vs), s);
        if (!(a == b)) return {SemResult::Verdict::NotEqual, s.entries()};
      } catch (const EvalUnknown&) {
      }
    }
  }
  return {SemResult::Verdict::Equal, {}};
}

std::optional<std::string> check_heap_invariant(Id h, int samples) {
  auto& es = heap_entries(h);
  for (size_t i = 0; i < es.size(); ++i)
    for (size_t j = i + 1; j < es.size(); ++j) {
      Id x = es[i].first, y = es[j].first;
      Id gxy = g_eq(x, y);
      if (gxy == bot()) continue;
      if (sort_of(es[i].second) != sort_of(es[j].second)) {
        // type-safe programs never alias cells of different value sorts
        for (int s = 0; s < samples; ++s) {
          GroundStore st;
          st.enable_sampling(s * 131 + 5, 2, 1);
          try {
            if (eval_guard_ground(gxy, st))
              return "cross-sort keys " + print(x) + " and " + print(y) + " can alias";
          } catch (const EvalUnknown&) {
          }
        }
        continue;
      }
      Sort vs = sort_of(es[i].second);
      Id t1 = mk_union({{gxy, es[i].second}}, vs);
      Id t2 = mk_union({{gxy, es[j].second}}, vs);
      SemResult r = sem_equal(t1, t2, samples);
      if (r.verdict == SemResult::Verdict::NotEqual)
        return "keys " + print(x) + " and " + print(y) +
               " break the heap invariant";
    }
  return std::nullopt;
}

}  // namespace symheap
