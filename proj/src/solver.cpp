#include "symheap/solver.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

#include "symheap/heap.hpp"

namespace symheap {

namespace {

constexpr size_t kStoreCap = 1u << 20;

void collect_constants(Id x, std::set<Int>& out) {
  const Node& n = node(x);
  switch (n.kind) {
    case Kind::EqA:
    case Kind::LtA:
      out.insert(node(n.a).num);
      return;
    case Kind::Not:
      collect_constants(n.a, out);
      return;
    case Kind::And:
    case Kind::Or:
      for (Id k : n.kids) collect_constants(k, out);
      return;
    case Kind::IntLin:
      out.insert(n.num);
      return;
    case Kind::Union:
    case Kind::HeapDef:
    case Kind::HeapMerge:
      for (auto& [g, v] : n.arms) {
        collect_constants(g, out);
        collect_constants(v, out);
      }
      return;
    case Kind::HeapCompose:
      collect_constants(n.a, out);
      collect_constants(n.b, out);
      return;
    case Kind::HeapWrite:
      collect_constants(n.a, out);
      collect_constants(n.arms[0].first, out);
      collect_constants(n.arms[0].second, out);
      return;
    case Kind::Cell:
      collect_constants(n.b, out);
      return;
    case Kind::EqL:
      collect_constants(n.a, out);
      collect_constants(n.b, out);
      return;
    case Kind::Field:
      collect_constants(n.a, out);
      return;
    default:
      return;
  }
}

}  // namespace

InputProfile profile_of(Id guard, const BodyTable& bodies) {
  InputProfile prof;
  std::vector<Id> cells;
  collect_cells(guard, cells);
  for (auto& [key, body] : bodies.ordered()) collect_cells(body, cells);

  std::set<std::pair<std::string, Sort>> vars, fields;
  for (Id c : cells) {
    const Node& cn = node(c);
    Id key = cn.b;
    const Node& kn = node(key);
    if (kn.kind == Kind::Var) vars.insert({kn.sym, cn.sort});
    if (kn.kind == Kind::Field) fields.insert({kn.sym, cn.sort});
  }
  // a variable or field read at both sorts would be a type clash; prefer Loc
  for (auto& [name, s] : vars) {
    if (s == Sort::Loc) continue;
    if (vars.count({name, Sort::Loc})) continue;
    prof.vars.emplace_back(name, s);
  }
  for (auto& [name, s] : vars)
    if (s == Sort::Loc) prof.vars.emplace_back(name, s);
  for (auto& [name, s] : fields) {
    if (s == Sort::Arith && fields.count({name, Sort::Loc})) continue;
    prof.fields.emplace_back(name, s);
  }
  std::sort(prof.vars.begin(), prof.vars.end());
  std::sort(prof.fields.begin(), prof.fields.end());

  std::set<Int> consts;
  collect_constants(guard, consts);
  for (auto& [key, body] : bodies.ordered()) collect_constants(body, consts);
  std::set<Int> vals;
  for (int v = -2; v <= 2; ++v) vals.insert(v);
  for (const Int& c : consts) {
    vals.insert(c - 1);
    vals.insert(c);
    vals.insert(c + 1);
  }
  prof.int_candidates.assign(vals.begin(), vals.end());
  return prof;
}

namespace {

// one linked chain per pointer variable; nodes carry every profiled field
struct ShapeIter {
  const InputProfile& prof;
  std::vector<std::pair<std::string, Sort>> ptr_vars, int_vars;
  std::string link_field;  // chain link when there is exactly one loc field
  std::vector<std::string> loc_fields, int_fields;

  explicit ShapeIter(const InputProfile& p) : prof(p) {
    for (auto& [n, s] : p.vars)
      (s == Sort::Loc ? ptr_vars : int_vars).push_back({n, s});
    for (auto& [n, s] : p.fields)
      (s == Sort::Loc ? loc_fields : int_fields).push_back(n);
    if (loc_fields.size() == 1) link_field = loc_fields[0];
  }

  // Writes one candidate chain for variable #vi of the given length with the
  // given int-field values (one value per (node, int field)).
  void install(GroundStore& st, size_t vi, int len,
               const std::vector<const Int*>& field_vals) const {
    Id var = mk_var(ptr_vars[vi].first);
    if (len == 0) {
      st.set(var, gv_loc(mk_null()));
      return;
    }
    std::vector<Id> addrs;
    for (int j = 0; j < len; ++j)
      addrs.push_back(mk_addr(Int(0x100 + 0x10 * static_cast<int>(vi) + j)));
    st.set(var, gv_loc(addrs[0]));
    size_t fv = 0;
    for (int j = 0; j < len; ++j) {
      for (const std::string& f : loc_fields) {
        Id next = (f == link_field && j + 1 < len) ? addrs[j + 1] : mk_null();
        st.set(mk_field(addrs[j], f), gv_loc(next));
      }
      for (const std::string& f : int_fields)
        st.set(mk_field(addrs[j], f), gv_int(*field_vals[fv++]));
    }
  }
};

}  // namespace

void for_each_store(const InputProfile& prof,
                    const std::function<bool(GroundStore&)>& fn) {
  ShapeIter sh(prof);
  const auto& vals = prof.int_candidates;
  size_t emitted = 0;

  // odometer over: per ptr var (chain length, int-field values), per int var a value
  struct VarState {
    int len = 0;
    std::vector<size_t> field_idx;  // len * int_fields values
  };
  std::vector<VarState> ptr_state(sh.ptr_vars.size());
  std::vector<size_t> int_state(sh.int_vars.size(), 0);

  std::function<bool(size_t)> emit_ptr = [&](size_t vi) -> bool {
    if (vi == sh.ptr_vars.size()) {
      // int vars odometer
      std::function<bool(size_t)> emit_int = [&](size_t ii) -> bool {
        if (ii == sh.int_vars.size()) {
          if (++emitted > kStoreCap) return false;
          GroundStore st;
          for (size_t k = 0; k < sh.ptr_vars.size(); ++k) {
            std::vector<const Int*> fv;
            for (size_t x : ptr_state[k].field_idx) fv.push_back(&vals[x]);
            sh.install(st, k, ptr_state[k].len, fv);
          }
          for (size_t k = 0; k < sh.int_vars.size(); ++k)
            st.set(mk_var(sh.int_vars[k].first), gv_int(vals[int_state[k]]));
          return fn(st);
        }
        for (size_t v = 0; v < vals.size(); ++v) {
          int_state[ii] = v;
          if (!emit_int(ii + 1)) return false;
        }
        return true;
      };
      return emit_int(0);
    }
    for (int len = 0; len <= prof.max_nodes; ++len) {
      size_t slots = static_cast<size_t>(len) * sh.int_fields.size();
      std::vector<size_t> idx(slots, 0);
      while (true) {
        ptr_state[vi] = {len, idx};
        if (!emit_ptr(vi + 1)) return false;
        // advance the per-node field-value odometer
        size_t k = 0;
        for (; k < slots; ++k) {
          if (++idx[k] < vals.size()) break;
          idx[k] = 0;
        }
        if (k == slots || vals.empty()) break;
      }
    }
    return true;
  };
  emit_ptr(0);
}

namespace {

// residual guard after grounding one candidate store
struct Residual {
  enum class K { True, False, NeedCell, Pending } k;
  Id cell_key = no_id;   // ground location still unassigned
  Sort cell_sort = Sort::Arith;
};

Residual residual_of(Id guard, const GroundStore& store, const BodyTable& bodies,
                     int depth) {
  std::vector<std::pair<Id, Id>> entries;
  for (auto& [loc, v] : store.entries())
    entries.emplace_back(loc, v.sort == Sort::Arith ? mk_int(v.i) : v.loc);
  Id sigma0 = mk_heap_def(std::move(entries));
  Id g1 = refine_guard(sigma0, guard);
  SyntacticOracle so;
  ReduceOptions opts;
  opts.max_steps = 20000 + 4000 * std::max(depth, 0);
  opts.max_unfolds_per_rec = depth;
  ReduceResult r = reduce_any(g1, bodies, so, opts);
  // the refinement seeded the store into every composed source, so reads
  // exposed later resolve against it during reduction; no second pass
  Id g2 = r.heap;
  if (g2 == top()) return {Residual::K::True};
  if (g2 == bot()) return {Residual::K::False};
  // the structurally smallest unassigned input cell drives the search
  std::vector<Id> cells;
  collect_cells(g2, cells);
  Id best = no_id;
  Sort bs = Sort::Arith;
  for (Id c : cells) {
    const Node& cn = node(c);
    if (!is_empty_heap(cn.a)) continue;
    if (!is_ground(cn.b)) continue;
    if (store.entries().count(cn.b)) continue;
    if (best == no_id || structural_less(cn.b, best)) {
      best = cn.b;
      bs = cn.sort;
    }
  }
  if (best != no_id) return {Residual::K::NeedCell, best, bs};
  return {Residual::K::Pending};
}

}  // namespace

std::optional<bool> eval_guard_under(Id guard, const GroundStore& store,
                                     const BodyTable& bodies, int depth) {
  Residual r = residual_of(guard, store, bodies, depth);
  if (r.k == Residual::K::True) return true;
  if (r.k == Residual::K::False) return false;
  return std::nullopt;
}

SatVerdict sat(const SatQuery& q) {
  static const BodyTable empty_bodies;
  const BodyTable& bodies = q.bodies ? *q.bodies : empty_bodies;
  Id ctx = q.context == no_id ? empty_heap() : q.context;
  Id g0 = refine_gen_guard(ctx, q.guard);
  if (g0 == top()) return {SatVerdict::K::Sat, {}, ""};
  if (g0 == bot()) return {SatVerdict::K::Unsat, {}, ""};

  // Lazily instantiated witness search: assign one demanded input cell at a
  // time. Integers come from the small candidate set, locations are null or
  // a fresh address, so explored shapes are acyclic and disjoint.
  std::set<Int> vals_set;
  for (int v = -2; v <= 2; ++v) vals_set.insert(v);
  {
    std::set<Int> consts;
    collect_constants(g0, consts);
    for (auto& [key, body] : bodies.ordered()) collect_constants(body, consts);
    for (const Int& c : consts) {
      vals_set.insert(c - 1);
      vals_set.insert(c);
      vals_set.insert(c + 1);
    }
  }
  std::vector<Int> vals(vals_set.begin(), vals_set.end());
  const int max_fresh = 3;

  bool inexact = false;
  size_t leaves = 0;
  std::optional<std::map<Id, GroundValue>> witness;

  std::function<bool(GroundStore&, int)> explore = [&](GroundStore& st,
                                                       int fresh_used) -> bool {
    if (++leaves > kStoreCap) {
      inexact = true;
      return true;
    }
    Residual r = residual_of(g0, st, bodies, q.depth);
    switch (r.k) {
      case Residual::K::True:
        witness = st.entries();
        return true;
      case Residual::K::False:
        return false;
      case Residual::K::Pending:
        inexact = true;
        return false;
      case Residual::K::NeedCell: {
        if (r.cell_sort == Sort::Arith) {
          for (const Int& v : vals) {
            GroundStore st2 = st;
            st2.set(r.cell_key, gv_int(v));
            if (explore(st2, fresh_used)) return true;
          }
          return false;
        }
        {
          GroundStore st2 = st;
          st2.set(r.cell_key, gv_loc(mk_null()));
          if (explore(st2, fresh_used)) return true;
        }
        if (fresh_used < max_fresh) {
          GroundStore st2 = st;
          st2.set(r.cell_key, gv_loc(mk_addr(Int(0x100 + fresh_used))));
          if (explore(st2, fresh_used + 1)) return true;
        }
        return false;
      }
    }
    return false;
  };
  GroundStore root;
  explore(root, 0);
  if (witness) return {SatVerdict::K::Sat, *witness, ""};
  if (inexact)
    return {SatVerdict::K::Unknown, {},
            "depth-bounded unfolding left an undecided frontier"};
  return {SatVerdict::K::Unsat, {}, ""};
}

Oracle::V BoundedOracle::sat(Id guard) const {
  SatVerdict v = query(guard);
  switch (v.kind) {
    case SatVerdict::K::Sat: return V::Sat;
    case SatVerdict::K::Unsat: return V::Unsat;
    default: return V::Unknown;
  }
}

SatVerdict BoundedOracle::query(Id guard) const {
  SatQuery q;
  q.bodies = bodies_;
  q.guard = guard;
  q.depth = depth_;
  return symheap::sat(q);
}

// ------------------------------------------------------------- SMT-LIB2

namespace {

struct SmtEmitter {
  std::map<Id, std::string> int_consts;  // arith cells
  std::map<Id, std::string> loc_consts;  // loc atoms incl. loc cells
  std::vector<std::pair<std::string, bool>> decl_order;  // name, is_loc
  std::vector<std::string> distinct_locs;
  bool saw_null = false;

  std::string loc_name(Id t) {
    auto it = loc_consts.find(t);
    if (it != loc_consts.end()) return it->second;
    std::string name;
    const Node& n = node(t);
    switch (n.kind) {
      case Kind::NullLoc:
        saw_null = true;
        return "null";
      case Kind::Var:
        name = "var_" + n.sym;
        break;
      case Kind::Addr:
        name = "addr_" + n.num.str() + (n.bits ? "_" + std::to_string(n.bits) : "");
        break;
      case Kind::Field:
        name = "loc" + std::to_string(loc_consts.size());
        break;
      case Kind::Cell:
        name = "cell_loc" + std::to_string(loc_consts.size());
        break;
      default:
        name = "loc" + std::to_string(loc_consts.size());
        break;
    }
    loc_consts[t] = name;
    decl_order.push_back({name, true});
    if (n.kind != Kind::Cell) distinct_locs.push_back(name);
    return name;
  }

  std::string int_name(Id cell) {
    auto it = int_consts.find(cell);
    if (it != int_consts.end()) return it->second;
    std::string name = "c" + std::to_string(int_consts.size());
    int_consts[cell] = name;
    decl_order.push_back({name, false});
    return name;
  }

  std::string lin(Id L) {
    const Node& n = node(L);
    std::vector<std::string> parts;
    for (auto& [atom, coeff] : n.lin) {
      std::string a = int_name(atom);
      if (coeff == 1) parts.push_back(a);
      else parts.push_back("(* " + num(coeff) + " " + a + ")");
    }
    if (n.num != 0 || parts.empty()) parts.push_back(num(n.num));
    if (parts.size() == 1) return parts[0];
    std::string s = "(+";
    for (auto& p : parts) s += " " + p;
    return s + ")";
  }

  static std::string num(const Int& v) {
    if (v < 0) return "(- " + Int(-v).str() + ")";
    return v.str();
  }

  std::string guard(Id g) {
    const Node& n = node(g);
    switch (n.kind) {
      case Kind::Top: return "true";
      case Kind::Bot: return "false";
      case Kind::Not: return "(not " + guard(n.a) + ")";
      case Kind::And: {
        std::string s = "(and";
        for (Id k : n.kids) s += " " + guard(k);
        return s + ")";
      }
      case Kind::Or: {
        std::string s = "(or";
        for (Id k : n.kids) s += " " + guard(k);
        return s + ")";
      }
      case Kind::EqA: return "(= " + lin(n.a) + " 0)";
      case Kind::LtA: return "(< " + lin(n.a) + " 0)";
      case Kind::EqL: return "(= " + loc_name(n.a) + " " + loc_name(n.b) + ")";
      default: return "false";
    }
  }
};

bool has_pending_cells(Id g) {
  std::vector<Id> cells;
  collect_cells(g, cells);
  for (Id c : cells)
    if (!is_empty_heap(node(c).a)) return true;
  return false;
}

}  // namespace

std::string emit_smtlib(const SatQuery& q) {
  static const BodyTable empty_bodies;
  const BodyTable& bodies = q.bodies ? *q.bodies : empty_bodies;
  Id ctx = q.context == no_id ? empty_heap() : q.context;
  Id g0 = refine_gen_guard(ctx, q.guard);
  SyntacticOracle so;
  ReduceOptions opts;
  opts.max_steps = 20000 + 4000 * std::max(q.depth, 0);
  opts.max_unfolds_per_rec = q.depth;
  ReduceResult r = reduce_any(g0, bodies, so, opts);
  bool under = has_pending_cells(r.heap) || r.status != ReduceResult::Status::Normal;

  SmtEmitter em;
  std::string body = em.guard(r.heap);

  std::ostringstream os;
  os << "; symheap guard query\n";
  if (under)
    os << "; under-approximate: a recursion frontier remained after "
       << q.depth << " unfoldings\n";
  os << "(set-logic QF_UFLIA)\n";
  os << "(declare-sort Loc 0)\n";
  if (em.saw_null || !em.distinct_locs.empty()) os << "(declare-const null Loc)\n";
  for (auto& [name, is_loc] : em.decl_order)
    os << "(declare-const " << name << (is_loc ? " Loc)\n" : " Int)\n");
  if (!em.distinct_locs.empty()) {
    os << "(assert (distinct null";
    for (auto& n : em.distinct_locs) os << " " << n;
    os << "))\n";
  }
  os << "(assert " << body << ")\n";
  os << "(check-sat)\n";
  return os.str();
}

}  // namespace symheap
