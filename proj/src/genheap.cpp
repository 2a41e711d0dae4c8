#include "symheap/genheap.hpp"

#include <algorithm>
#include <cassert>

#include "symheap/heap.hpp"

namespace symheap {

void BodyTable::set(uint32_t vertex, uint64_t visited, Id body) {
  auto key = std::make_pair(vertex, visited);
  if (!map_.count(key)) ordered_.push_back({key, body});
  else
    for (auto& e : ordered_)
      if (e.first == key) e.second = body;
  map_[key] = body;
}

std::optional<Id> BodyTable::get(uint32_t vertex, uint64_t visited) const {
  auto it = map_.find(std::make_pair(vertex, visited));
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

Oracle::V SyntacticOracle::sat(Id guard) const {
  if (guard == bot()) return V::Unsat;
  if (guard == top()) return V::Sat;
  return V::Unknown;
}

Id compose_g(Id h1, Id h2) {
  if (is_empty_heap(h1)) return h2;
  if (is_empty_heap(h2)) return h1;
  if (is_definite(h1) && is_definite(h2)) return heap_compose(h1, h2);
  return mk_heap_compose_raw(h1, h2);
}

Id write_g(Id h, Id key, Id value) {
  if (is_definite(h)) return heap_write(h, key, value);
  return mk_heap_write_raw(h, key, value);
}

Id merge_g(std::vector<std::pair<Id, Id>> in) {
  std::vector<std::pair<Id, Id>> arms;
  std::function<void(Id, Id)> push = [&](Id g, Id h) {
    if (g == bot()) return;
    if (kind(h) == Kind::HeapMerge) {
      for (auto& [g2, h2] : node(h).arms) push(g_and(g, g2), h2);
      return;
    }
    arms.emplace_back(g, h);
  };
  for (auto& [g, h] : in) push(g, h);
  if (arms.size() == 1 && arms[0].first == top()) return arms[0].second;
  std::sort(arms.begin(), arms.end(), [](auto& l, auto& r) {
    if (int c = structural_compare(l.first, r.first)) return c < 0;
    return structural_compare(l.second, r.second) < 0;
  });
  arms.erase(std::unique(arms.begin(), arms.end()), arms.end());
  return mk_heap_merge_raw(std::move(arms));
}

Id read_g(Id h, Id x, Sort vsort) {
  if (is_definite(h)) return heap_read(h, x, vsort);
  if (kind(h) == Kind::HeapMerge) {
    std::vector<std::pair<Id, Id>> arms;
    for (auto& [g, hi] : node(h).arms) arms.emplace_back(g, read_g(hi, x, vsort));
    return mk_union(std::move(arms), vsort);
  }
  return mk_cell(h, x, vsort);
}

Id refine_gen(Id ctx, Id e) { return Refiner(ctx).term(e); }
Id refine_gen_guard(Id ctx, Id g) { return Refiner(ctx).guard(g); }

bool is_ground_heap(Id h) { return is_definite(h) && is_ground(h); }

// ----------------------------------------------------------- reduction

namespace {

struct Reducer {
  const BodyTable& bodies;
  const Oracle& oracle;
  bool outermost;
  // unfold bookkeeping
  std::map<std::pair<uint32_t, uint64_t>, int>* unfold_counts = nullptr;
  int unfold_budget = -1;
  bool budget_hit = false;

  const char* rule = nullptr;

  // ---- pass 1: every rule except Rec unfolding ----

  std::optional<Id> step_term(Id t) {
    const Node& n = node(t);
    switch (n.kind) {
      case Kind::IntLin:
        for (auto& [atom, coeff] : n.lin)
          if (auto r = step_term(atom)) {
            Id acc = mk_int(n.num);
            for (auto& [a2, c2] : n.lin)
              acc = a_add(acc, a_scale(c2, a2 == atom ? *r : a2));
            return acc;
          }
        return std::nullopt;
      case Kind::Field:
        if (auto r = step_term(n.a)) return mk_field(*r, n.sym);
        return std::nullopt;
      case Kind::Cell: {
        if (auto r = step_heap(n.a)) return mk_cell(*r, n.b, n.sort);
        if (auto r = step_term(n.b)) return mk_cell(n.a, *r, n.sort);
        return std::nullopt;
      }
      case Kind::Union: {
        for (size_t i = 0; i < n.arms.size(); ++i) {
          auto rebuild = [&](Id g, Id v) {
            auto arms = n.arms;
            arms[i] = {g, v};
            return mk_union(std::move(arms), n.sort);
          };
          if (auto r = step_guard(n.arms[i].first)) return rebuild(*r, n.arms[i].second);
          if (auto r = step_term(n.arms[i].second)) return rebuild(n.arms[i].first, *r);
        }
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  }

  std::optional<Id> step_guard(Id g) {
    const Node& n = node(g);
    switch (n.kind) {
      case Kind::Not:
        if (auto r = step_guard(n.a)) return g_not(*r);
        return std::nullopt;
      case Kind::And:
      case Kind::Or:
        for (size_t i = 0; i < n.kids.size(); ++i)
          if (auto r = step_guard(n.kids[i])) {
            auto ks = n.kids;
            ks[i] = *r;
            return n.kind == Kind::And ? g_and(std::move(ks)) : g_or(std::move(ks));
          }
        return std::nullopt;
      case Kind::EqA:
        if (auto r = step_term(n.a)) return g_eq(*r, mk_int(0));
        return std::nullopt;
      case Kind::LtA:
        if (auto r = step_term(n.a)) return g_lt(*r, mk_int(0));
        return std::nullopt;
      case Kind::EqL: {
        if (auto r = step_term(n.a)) return g_eq(*r, n.b);
        if (auto r = step_term(n.b)) return g_eq(n.a, *r);
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  }

  std::optional<Id> local_heap_rule(Id h) {
    const Node& n = node(h);
    switch (n.kind) {
      case Kind::HeapCompose: {
        Id a = n.a, b = n.b;
        if (is_empty_heap(a)) { rule = "eps-left"; return b; }
        if (is_empty_heap(b)) { rule = "eps-right"; return a; }
        if (kind(b) == Kind::HeapCompose) {
          rule = "reassoc";
          return mk_heap_compose_raw(mk_heap_compose_raw(a, node(b).a), node(b).b);
        }
        if (kind(b) == Kind::HeapMerge) {
          rule = "compose-merge";
          std::vector<std::pair<Id, Id>> arms;
          for (auto& [g, hi] : node(b).arms)
            arms.emplace_back(refine_gen_guard(a, g), mk_heap_compose_raw(a, hi));
          return merge_g(std::move(arms));
        }
        if (kind(a) == Kind::HeapMerge) {
          rule = "merge-compose";
          std::vector<std::pair<Id, Id>> arms;
          for (auto& [g, hi] : node(a).arms)
            arms.emplace_back(g, mk_heap_compose_raw(hi, b));
          return merge_g(std::move(arms));
        }
        if (kind(b) == Kind::HeapWrite) {
          rule = "compose-write";
          const Node& w = node(b);
          return mk_heap_write_raw(mk_heap_compose_raw(a, w.a),
                                   refine_gen(a, w.arms[0].first),
                                   refine_gen(a, w.arms[0].second));
        }
        if (is_definite(a) && is_definite(b)) {
          rule = "compose-definite";
          return heap_compose(a, b);
        }
        return std::nullopt;
      }
      case Kind::HeapWrite: {
        if (kind(n.a) == Kind::HeapMerge) {
          rule = "write-merge";
          std::vector<std::pair<Id, Id>> arms;
          for (auto& [g, hi] : node(n.a).arms)
            arms.emplace_back(g, mk_heap_write_raw(hi, n.arms[0].first, n.arms[0].second));
          return merge_g(std::move(arms));
        }
        if (is_definite(n.a)) {
          rule = "write-definite";
          return heap_write(n.a, n.arms[0].first, n.arms[0].second);
        }
        return std::nullopt;
      }
      case Kind::HeapMerge: {
        for (size_t i = 0; i < n.arms.size(); ++i) {
          if (oracle.sat(n.arms[i].first) == Oracle::V::Unsat) {
            rule = "drop-unsat-arm";
            auto arms = n.arms;
            arms.erase(arms.begin() + i);
            return mk_heap_merge_raw(std::move(arms));
          }
        }
        if (n.arms.size() == 1 && oracle.sat(g_not(n.arms[0].first)) == Oracle::V::Unsat) {
          rule = "collapse-valid-arm";
          return n.arms[0].second;
        }
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  }

  std::optional<Id> step_heap(Id h) {
    const Node& n = node(h);
    if (outermost)
      if (auto r = local_heap_rule(h)) return r;
    switch (n.kind) {
      case Kind::HeapDef:
        for (size_t i = 0; i < n.arms.size(); ++i) {
          auto rebuild = [&](Id k, Id v) {
            auto es = n.arms;
            es[i] = {k, v};
            return mk_heap_def(std::move(es));
          };
          if (auto r = step_term(n.arms[i].first)) return rebuild(*r, n.arms[i].second);
          if (auto r = step_term(n.arms[i].second)) return rebuild(n.arms[i].first, *r);
        }
        break;
      case Kind::HeapCompose:
        if (auto r = step_heap(n.a)) return mk_heap_compose_raw(*r, n.b);
        if (auto r = step_heap(n.b)) return mk_heap_compose_raw(n.a, *r);
        break;
      case Kind::HeapMerge:
        for (size_t i = 0; i < n.arms.size(); ++i) {
          auto rebuild = [&](Id g, Id hh) {
            auto arms = n.arms;
            arms[i] = {g, hh};
            return mk_heap_merge_raw(std::move(arms));
          };
          if (auto r = step_guard(n.arms[i].first)) return rebuild(*r, n.arms[i].second);
          if (auto r = step_heap(n.arms[i].second)) return rebuild(n.arms[i].first, *r);
        }
        break;
      case Kind::HeapWrite:
        if (auto r = step_heap(n.a)) return mk_heap_write_raw(*r, n.arms[0].first, n.arms[0].second);
        if (auto r = step_term(n.arms[0].first)) return mk_heap_write_raw(n.a, *r, n.arms[0].second);
        if (auto r = step_term(n.arms[0].second)) return mk_heap_write_raw(n.a, n.arms[0].first, *r);
        break;
      default:
        break;
    }
    if (!outermost)
      if (auto r = local_heap_rule(h)) return r;
    return std::nullopt;
  }

  // ---- pass 2: Rec unfolding, lowest priority ----

  std::optional<std::pair<uint32_t, uint64_t>> find_rec_term(Id t) {
    const Node& n = node(t);
    switch (n.kind) {
      case Kind::IntLin:
        for (auto& [a, c] : n.lin)
          if (auto r = find_rec_term(a)) return r;
        return std::nullopt;
      case Kind::Field:
        return find_rec_term(n.a);
      case Kind::Cell:
        if (auto r = find_rec_heap(n.a)) return r;
        return find_rec_term(n.b);
      case Kind::Union:
        for (auto& [g, v] : n.arms) {
          if (auto r = find_rec_guard(g)) return r;
          if (auto r = find_rec_term(v)) return r;
        }
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

  std::optional<std::pair<uint32_t, uint64_t>> find_rec_guard(Id g) {
    const Node& n = node(g);
    switch (n.kind) {
      case Kind::Not:
        return find_rec_guard(n.a);
      case Kind::And:
      case Kind::Or:
        for (Id k : n.kids)
          if (auto r = find_rec_guard(k)) return r;
        return std::nullopt;
      case Kind::EqA:
      case Kind::LtA:
        return find_rec_term(n.a);
      case Kind::EqL:
        if (auto r = find_rec_term(n.a)) return r;
        return find_rec_term(n.b);
      default:
        return std::nullopt;
    }
  }

  std::optional<std::pair<uint32_t, uint64_t>> find_rec_heap(Id h) {
    const Node& n = node(h);
    switch (n.kind) {
      case Kind::HeapRec: {
        auto id = std::make_pair(static_cast<uint32_t>(n.num), n.bits);
        if (unfold_budget >= 0 && unfold_counts &&
            (*unfold_counts)[id] >= unfold_budget) {
          budget_hit = true;
          return std::nullopt;
        }
        return id;
      }
      case Kind::HeapDef:
        for (auto& [k, v] : n.arms) {
          if (auto r = find_rec_term(k)) return r;
          if (auto r = find_rec_term(v)) return r;
        }
        return std::nullopt;
      case Kind::HeapCompose:
        if (auto r = find_rec_heap(n.a)) return r;
        return find_rec_heap(n.b);
      case Kind::HeapMerge:
        for (auto& [g, hh] : n.arms) {
          if (auto r = find_rec_guard(g)) return r;
          if (auto r = find_rec_heap(hh)) return r;
        }
        return std::nullopt;
      case Kind::HeapWrite:
        if (auto r = find_rec_heap(n.a)) return r;
        if (auto r = find_rec_term(n.arms[0].first)) return r;
        return find_rec_term(n.arms[0].second);
      default:
        return std::nullopt;
    }
  }

  // simultaneous substitution of Body(id) for Rec(id)
  Id subst(Id t, Id rec_node, Id body) {
    const Node& n = node(t);
    switch (n.kind) {
      case Kind::HeapRec:
        return t == rec_node ? body : t;
      case Kind::HeapDef: {
        std::vector<std::pair<Id, Id>> es;
        for (auto& [k, v] : n.arms)
          es.emplace_back(subst(k, rec_node, body), subst(v, rec_node, body));
        return mk_heap_def(std::move(es));
      }
      case Kind::HeapCompose:
        return mk_heap_compose_raw(subst(n.a, rec_node, body), subst(n.b, rec_node, body));
      case Kind::HeapMerge: {
        std::vector<std::pair<Id, Id>> arms;
        for (auto& [g, hh] : n.arms)
          arms.emplace_back(subst(g, rec_node, body), subst(hh, rec_node, body));
        return mk_heap_merge_raw(std::move(arms));
      }
      case Kind::HeapWrite:
        return mk_heap_write_raw(subst(n.a, rec_node, body),
                                 subst(n.arms[0].first, rec_node, body),
                                 subst(n.arms[0].second, rec_node, body));
      case Kind::IntLin: {
        Id acc = mk_int(n.num);
        for (auto& [a, c] : n.lin) acc = a_add(acc, a_scale(c, subst(a, rec_node, body)));
        return acc;
      }
      case Kind::Field:
        return mk_field(subst(n.a, rec_node, body), n.sym);
      case Kind::Cell:
        return mk_cell(subst(n.a, rec_node, body), subst(n.b, rec_node, body), n.sort);
      case Kind::Union: {
        std::vector<std::pair<Id, Id>> arms;
        for (auto& [g, v] : n.arms)
          arms.emplace_back(subst(g, rec_node, body), subst(v, rec_node, body));
        return mk_union(std::move(arms), n.sort);
      }
      case Kind::Not:
        return g_not(subst(n.a, rec_node, body));
      case Kind::And:
      case Kind::Or: {
        std::vector<Id> ks;
        for (Id k : n.kids) ks.push_back(subst(k, rec_node, body));
        return n.kind == Kind::And ? g_and(std::move(ks)) : g_or(std::move(ks));
      }
      case Kind::EqA:
        return g_eq(subst(n.a, rec_node, body), mk_int(0));
      case Kind::LtA:
        return g_lt(subst(n.a, rec_node, body), mk_int(0));
      case Kind::EqL:
        return g_eq(subst(n.a, rec_node, body), subst(n.b, rec_node, body));
      default:
        return t;
    }
  }

  StepOutcome step(Id x) {
    rule = nullptr;
    budget_hit = false;
    Sort s = sort_of(x);
    std::optional<Id> r;
    std::optional<std::pair<uint32_t, uint64_t>> rec;
    if (s == Sort::Heap) {
      r = step_heap(x);
      if (!r) rec = find_rec_heap(x);
    } else if (s == Sort::Guard) {
      r = step_guard(x);
      if (!r) rec = find_rec_guard(x);
    } else {
      r = step_term(x);
      if (!r) rec = find_rec_term(x);
    }
    if (r) return {true, *r, rule};
    if (rec) {
      auto body = bodies.get(rec->first, rec->second);
      if (!body)
        throw std::runtime_error("reduce: no body for recursion symbol Rec(" +
                                 std::to_string(rec->first) + ")");
      if (unfold_counts) ++(*unfold_counts)[*rec];
      Id rn = mk_heap_rec(rec->first, rec->second);
      return {true, subst(x, rn, *body), "unfold"};
    }
    return {false, x, nullptr};
  }
};

}  // namespace

StepOutcome reduce_step(Id h, const BodyTable& bodies, const Oracle& oracle) {
  Reducer r{bodies, oracle, false};
  return r.step(h);
}

ReduceResult reduce(Id h, const BodyTable& bodies, const Oracle& oracle,
                    ReduceOptions opts) {
  return reduce_any(h, bodies, oracle, opts);
}

ReduceResult reduce_any(Id h, const BodyTable& bodies, const Oracle& oracle,
                        ReduceOptions opts) {
  Reducer r{bodies, oracle, opts.alt_strategy};
  std::map<std::pair<uint32_t, uint64_t>, int> counts;
  r.unfold_counts = &counts;
  r.unfold_budget = opts.max_unfolds_per_rec;
  ReduceResult out{ReduceResult::Status::Normal, h, 0, {}};
  while (out.steps < opts.max_steps) {
    StepOutcome s = r.step(out.heap);
    if (!s.reduced) {
      out.status = r.budget_hit ? ReduceResult::Status::UnfoldBudget
                                : ReduceResult::Status::Normal;
      return out;
    }
    if (opts.keep_trace) out.trace.push_back({s.rule, out.heap, s.heap});
    out.heap = s.heap;
    ++out.steps;
  }
  out.status = ReduceResult::Status::Fuel;
  return out;
}

}  // namespace symheap
