#include "symheap/term.hpp"

#include <sstream>

namespace symheap {

GroundValue gv_int(Int v) { return GroundValue{Sort::Arith, std::move(v), no_id}; }
GroundValue gv_loc(Id l) { return GroundValue{Sort::Loc, 0, l}; }

bool GroundValue::operator==(const GroundValue& o) const {
  if (sort != o.sort) return false;
  return sort == Sort::Arith ? i == o.i : loc == o.loc;
}

std::string print_ground(const GroundValue& v) {
  return v.sort == Sort::Arith ? v.i.str() : print(v.loc);
}

void GroundStore::enable_sampling(uint64_t seed, int int_span, int addr_pool) {
  sampling_ = true;
  rng_ = seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull;
  int_span_ = int_span;
  addr_pool_ = addr_pool;
}

static uint64_t splitmix(uint64_t& s) {
  uint64_t z = (s += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

GroundValue GroundStore::invent(Sort want) {
  uint64_t r = splitmix(rng_);
  if (want == Sort::Arith) {
    int span = int_span_;
    if (span == 0) return gv_int(0);
    long v = static_cast<long>(r % (2 * span + 1)) - span;
    return gv_int(v);
  }
  // null roughly one time in three, otherwise an address from a small pool
  if (r % 3 == 0 || addr_pool_ == 0) return gv_loc(mk_null());
  return gv_loc(mk_addr(Int(1 + (r / 3) % addr_pool_)));
}

GroundValue GroundStore::lookup(Id ground_loc, Sort want) {
  auto it = env_.find(ground_loc);
  if (it != env_.end()) {
    if (it->second.sort != want)
      throw EvalUnknown("sort clash at " + print(ground_loc));
    return it->second;
  }
  if (!sampling_) throw EvalUnknown("store is partial at " + print(ground_loc));
  GroundValue v = invent(want);
  env_[ground_loc] = v;
  return v;
}

GroundValue GroundStore::lookup_opaque(Id heap, Id ground_loc, Sort want) {
  auto key = std::make_pair(heap, ground_loc);
  auto it = opaque_.find(key);
  if (it != opaque_.end()) {
    if (it->second.sort != want) throw EvalUnknown("sort clash in opaque cell");
    return it->second;
  }
  if (!sampling_) throw EvalUnknown("unresolved cell over non-unit heap");
  GroundValue v = invent(want);
  opaque_[key] = v;
  return v;
}

// evaluates a loc term to a ground location node
static Id eval_loc(Id t, GroundStore& s);

GroundValue eval_ground(Id term, GroundStore& s) {
  const Node& n = node(term);
  switch (n.kind) {
    case Kind::IntLin: {
      Int acc = n.num;
      for (auto& [atom, coeff] : n.lin) {
        GroundValue v = eval_ground(atom, s);
        acc += coeff * v.i;
      }
      return gv_int(acc);
    }
    case Kind::NullLoc:
    case Kind::Addr:
    case Kind::Var:
    case Kind::Field:
      return gv_loc(eval_loc(term, s));
    case Kind::Cell: {
      Id key = eval_loc(n.b, s);
      if (is_empty_heap(n.a)) return s.lookup(key, n.sort);
      return s.lookup_opaque(n.a, key, n.sort);
    }
    case Kind::Union: {
      for (auto& [g, v] : n.arms)
        if (eval_guard_ground(g, s)) return eval_ground(v, s);
      throw EvalUnknown("partial union: no arm guard holds");
    }
    default:
      throw EvalUnknown("not a term");
  }
}

static Id eval_loc(Id t, GroundStore& s) {
  const Node& n = node(t);
  switch (n.kind) {
    case Kind::NullLoc:
    case Kind::Addr:
    case Kind::Var:
      return t;
    case Kind::Field: {
      Id base = eval_loc(n.a, s);
      if (kind(base) == Kind::NullLoc)
        throw EvalUnknown("null dereference in ground location");
      return mk_field(base, n.sym);
    }
    case Kind::Cell:
    case Kind::Union: {
      GroundValue v = eval_ground(t, s);
      if (v.sort != Sort::Loc) throw EvalUnknown("loc expected");
      return v.loc;
    }
    default:
      throw EvalUnknown("not a loc");
  }
}

bool eval_guard_ground(Id guard, GroundStore& s) {
  const Node& n = node(guard);
  switch (n.kind) {
    case Kind::Top: return true;
    case Kind::Bot: return false;
    case Kind::Not: return !eval_guard_ground(n.a, s);
    case Kind::And:
      for (Id k : n.kids)
        if (!eval_guard_ground(k, s)) return false;
      return true;
    case Kind::Or:
      for (Id k : n.kids)
        if (eval_guard_ground(k, s)) return true;
      return false;
    case Kind::EqA: return eval_ground(n.a, s).i == 0;
    case Kind::LtA: return eval_ground(n.a, s).i < 0;
    case Kind::EqL: return eval_loc(n.a, s) == eval_loc(n.b, s);
    default:
      throw EvalUnknown("not a guard");
  }
}

// ------------------------------------------------------------- sem_equal

namespace {

struct SamplePolicy {
  int span;
  int pool;
};

SamplePolicy policy_for(int i) {
  // boundary-first schedule: zeros, then small values, then forced aliasing
  switch (i) {
    case 0: return {0, 1};
    case 1: return {1, 2};
    case 2: return {1, 1};
    case 3: return {2, 0};
    default: return {2, 3};
  }
}

template <typename EvalFn>
SemResult sem_equal_impl(Id a, Id b, int budget, EvalFn ev) {
  if (a == b) return {SemResult::Verdict::Equal, {}};
  for (int i = 0; i < budget; ++i) {
    SamplePolicy p = policy_for(i);
    GroundStore s;
    s.enable_sampling(static_cast<uint64_t>(i) * 2654435761ull + 17, p.span, p.pool);
    try {
      if (!ev(a, b, s)) {
        return {SemResult::Verdict::NotEqual, s.entries()};
      }
    } catch (const EvalUnknown&) {
      continue;
    }
  }
  return {SemResult::Verdict::Unknown, {}};
}

}  // namespace

SemResult sem_equal(Id a, Id b, int budget) {
  if (sort_of(a) != sort_of(b)) return {SemResult::Verdict::NotEqual, {}};
  return sem_equal_impl(a, b, budget, [](Id x, Id y, GroundStore& s) {
    return eval_ground(x, s) == eval_ground(y, s);
  });
}

SemResult sem_equal_guard(Id a, Id b, int budget) {
  return sem_equal_impl(a, b, budget, [](Id x, Id y, GroundStore& s) {
    return eval_guard_ground(x, s) == eval_guard_ground(y, s);
  });
}

std::optional<std::string> audit_union(Id u, int samples, uint64_t seed) {
  if (kind(u) != Kind::Union) return std::nullopt;
  const Node& n = node(u);
  for (int i = 0; i < samples; ++i) {
    GroundStore s;
    s.enable_sampling(seed + static_cast<uint64_t>(i) * 7919, 2, 2);
    std::vector<size_t> live;
    for (size_t k = 0; k < n.arms.size(); ++k) {
      try {
        if (eval_guard_ground(n.arms[k].first, s)) live.push_back(k);
      } catch (const EvalUnknown&) {
      }
    }
    if (live.size() < 2) continue;
    try {
      GroundValue first = eval_ground(n.arms[live[0]].second, s);
      for (size_t k = 1; k < live.size(); ++k) {
        GroundValue other = eval_ground(n.arms[live[k]].second, s);
        if (!(first == other)) {
          std::ostringstream os;
          os << "overlapping guards protect distinct values: arm " << live[0]
             << " = " << print_ground(first) << ", arm " << live[k] << " = "
             << print_ground(other) << " (sample " << i << ")";
          return os.str();
        }
      }
    } catch (const EvalUnknown&) {
    }
  }
  return std::nullopt;
}

}  // namespace symheap
