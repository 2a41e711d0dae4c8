#include "symheap/transpile.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace symheap {

namespace {

FE fe(FExpr e) { return std::make_shared<FExpr>(std::move(e)); }

FE fe_kind(FExpr::K k, std::vector<FE> kids = {}) {
  FExpr e;
  e.k = k;
  e.kids = std::move(kids);
  return fe(std::move(e));
}

FE fe_int(Int v) {
  FExpr e;
  e.k = FExpr::K::IntLit;
  e.ival = std::move(v);
  return fe(std::move(e));
}

FE fe_bool(bool b) {
  FExpr e;
  e.k = FExpr::K::BoolLit;
  e.flag = b;
  return fe(std::move(e));
}

std::string hexbits(uint64_t b) {
  std::ostringstream os;
  os << std::hex << b;
  return os.str();
}

}  // namespace

std::string EncodingEnv::base_name(Id heap) {
  auto it = base_names_.find(heap);
  if (it != base_names_.end()) return it->second;
  const Node& n = node(heap);
  std::string name;
  switch (n.kind) {
    case Kind::HeapDef:
      name = n.arms.empty() ? "eps" : "h" + std::to_string(++counter_);
      break;
    case Kind::HeapRec:
      name = "rec" + n.num.str() + "_d" + hexbits(n.bits);
      break;
    case Kind::HeapCompose:
      name = base_name(n.a) + "_o_" + base_name(n.b);
      break;
    case Kind::HeapMerge:
      name = "m" + std::to_string(++counter_);
      break;
    case Kind::HeapWrite:
      name = "w" + std::to_string(++counter_);
      break;
    default:
      throw std::runtime_error("encode: not a heap");
  }
  base_names_[heap] = name;
  return name;
}

std::string EncodingEnv::find_fn(Id heap, Sort s) {
  if (!sort_split_) s = Sort::Arith;  // one sort-agnostic family
  auto key = std::make_pair(heap, s);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  std::string name = "find_" + base_name(heap);
  memo_[key] = name;
  size_t slot = defs_.size();
  defs_.push_back({name, s, nullptr});  // reserve before recursion
  FE body = inline_find(heap, s);
  defs_[slot].body = body;
  return name;
}

FE EncodingEnv::inline_find(Id heap, Sort s) {
  const Node& n = node(heap);
  FE ctx = fe_kind(FExpr::K::CtxBase);
  FE x = fe_kind(FExpr::K::ParamX);
  auto call_to = [&](Id h) {
    FExpr e;
    e.k = FExpr::K::Call;
    e.sym = find_fn(h, s);
    e.sort = s;
    e.kids = {ctx, x};
    return fe(std::move(e));
  };
  auto default_read = [&]() {
    FExpr e;
    e.k = FExpr::K::CtxApply;
    e.sort = s;
    e.kids = {ctx, x};
    return fe(std::move(e));
  };
  switch (n.kind) {
    case Kind::HeapDef: {
      FE acc = default_read();
      for (auto itr = n.arms.rbegin(); itr != n.arms.rend(); ++itr) {
        auto& [k, v] = *itr;
        if (sort_split_ && sort_of(v) != s) continue;
        FExpr eq;
        eq.k = FExpr::K::EqL;
        eq.kids = {x, encode_term(k, ctx)};
        acc = fe_kind(FExpr::K::If, {fe(std::move(eq)), encode_term(v, ctx), acc});
      }
      return acc;
    }
    case Kind::HeapCompose: {
      FExpr part;
      part.k = FExpr::K::CtxPartial;
      part.heap = n.a;
      part.sym = find_fn(n.a, s);
      if (sort_split_) find_fn(n.a, s == Sort::Arith ? Sort::Loc : Sort::Arith);
      part.kids = {ctx};
      FExpr call;
      call.k = FExpr::K::Call;
      call.sym = find_fn(n.b, s);
      call.sort = s;
      call.kids = {fe(std::move(part)), x};
      return fe(std::move(call));
    }
    case Kind::HeapMerge: {
      if (n.arms.empty()) {
        FExpr f;
        f.k = FExpr::K::Fail;
        f.sym = "no described behaviour";
        return fe(std::move(f));
      }
      FE acc = call_to(n.arms.back().second);
      for (auto itr = n.arms.rbegin() + 1; itr != n.arms.rend(); ++itr)
        acc = fe_kind(FExpr::K::If,
                      {encode_guard(itr->first, ctx), call_to(itr->second), acc});
      return acc;
    }
    case Kind::HeapWrite: {
      auto& [k, v] = n.arms[0];
      if (sort_split_ && sort_of(v) != s) return call_to(n.a);
      FExpr eq;
      eq.k = FExpr::K::EqL;
      eq.kids = {x, encode_term(k, ctx)};
      return fe_kind(FExpr::K::If,
                     {fe(std::move(eq)), encode_term(v, ctx), call_to(n.a)});
    }
    case Kind::HeapRec: {
      auto body = bodies_->get(static_cast<uint32_t>(n.num), n.bits);
      if (!body)
        throw std::runtime_error("encode: recursion symbol without a body");
      return inline_find(*body, s);
    }
    default:
      throw std::runtime_error("encode: not a heap");
  }
}

FE EncodingEnv::encode_term(Id t, FE ctx) {
  const Node& n = node(t);
  switch (n.kind) {
    case Kind::IntLin: {
      FE acc = nullptr;
      for (auto& [atom, coeff] : n.lin) {
        FE cell = encode_term(atom, ctx);
        FE mono = cell;
        if (coeff != 1) {
          FExpr m;
          m.k = FExpr::K::MulC;
          m.ival = coeff;
          m.kids = {cell};
          mono = fe(std::move(m));
        }
        acc = acc ? fe_kind(FExpr::K::Add, {acc, mono}) : mono;
      }
      if (!acc) return fe_int(n.num);
      if (n.num != 0) acc = fe_kind(FExpr::K::Add, {acc, fe_int(n.num)});
      return acc;
    }
    case Kind::NullLoc:
      return fe_kind(FExpr::K::NullLit);
    case Kind::Addr: {
      FExpr e;
      e.k = FExpr::K::AddrLit;
      e.ival = n.num;
      e.bits = n.bits;
      return fe(std::move(e));
    }
    case Kind::Var: {
      FExpr e;
      e.k = FExpr::K::VarLoc;
      e.sym = n.sym;
      return fe(std::move(e));
    }
    case Kind::Field: {
      FExpr e;
      e.k = FExpr::K::MkField;
      e.sym = n.sym;
      e.kids = {encode_term(n.a, ctx)};
      return fe(std::move(e));
    }
    case Kind::Cell: {
      FE key = encode_term(n.b, ctx);
      if (is_empty_heap(n.a)) {
        FExpr e;
        e.k = FExpr::K::CtxApply;
        e.sort = n.sort;
        e.kids = {ctx, key};
        return fe(std::move(e));
      }
      FExpr e;
      e.k = FExpr::K::Call;
      e.sym = find_fn(n.a, n.sort);
      e.sort = n.sort;
      e.kids = {ctx, key};
      return fe(std::move(e));
    }
    case Kind::Union: {
      if (n.arms.empty()) {
        FExpr f;
        f.k = FExpr::K::Fail;
        f.sym = "empty union";
        return fe(std::move(f));
      }
      FE acc = encode_term(n.arms.back().second, ctx);
      for (auto itr = n.arms.rbegin() + 1; itr != n.arms.rend(); ++itr)
        acc = fe_kind(FExpr::K::If, {encode_guard(itr->first, ctx),
                                     encode_term(itr->second, ctx), acc});
      return acc;
    }
    default:
      throw std::runtime_error("encode: not a term");
  }
  throw std::runtime_error("encode: not a term");
}

FE EncodingEnv::encode_guard(Id g, FE ctx) {
  const Node& n = node(g);
  switch (n.kind) {
    case Kind::Top:
      return fe_bool(true);
    case Kind::Bot:
      return fe_bool(false);
    case Kind::Not:
      return fe_kind(FExpr::K::Not, {encode_guard(n.a, ctx)});
    case Kind::And:
    case Kind::Or: {
      FE acc = nullptr;
      for (Id k : n.kids) {
        FE e = encode_guard(k, ctx);
        acc = acc ? fe_kind(n.kind == Kind::And ? FExpr::K::And : FExpr::K::Or,
                            {acc, e})
                  : e;
      }
      return acc;
    }
    case Kind::EqA:
      return fe_kind(FExpr::K::EqI, {encode_term(n.a, ctx), fe_int(0)});
    case Kind::LtA:
      return fe_kind(FExpr::K::LtI, {encode_term(n.a, ctx), fe_int(0)});
    case Kind::EqL:
      return fe_kind(FExpr::K::EqL, {encode_term(n.a, ctx), encode_term(n.b, ctx)});
    default:
      throw std::runtime_error("encode: not a guard");
  }
}

FuncIR EncodingEnv::finish(FE main, bool is_assert) {
  FuncIR p;
  p.defs = defs_;
  p.main = std::move(main);
  p.main_is_assert = is_assert;
  p.sort_split = sort_split_;
  return p;
}

bool EncodingEnv::has_def(const std::string& name) const {
  return std::any_of(defs_.begin(), defs_.end(),
                     [&](const FDef& d) { return d.name == name; });
}

FuncIR encode_guard_query(Id guard, const BodyTable& bodies, bool sort_split) {
  EncodingEnv env(bodies, sort_split);
  FE main = env.encode_guard(guard, fe_kind(FExpr::K::CtxBase));
  return env.finish(std::move(main), true);
}

FuncIR encode_value_query(Id heap, Id x, Sort s, const BodyTable& bodies,
                          bool sort_split) {
  EncodingEnv env(bodies, sort_split);
  Id term = read_g(heap, x, s);
  FE main = env.encode_term(term, fe_kind(FExpr::K::CtxBase));
  return env.finish(std::move(main), false);
}

FuncIR encode_effect(Id heap, const BodyTable& bodies, bool sort_split) {
  EncodingEnv env(bodies, sort_split);
  env.find_fn(heap, Sort::Arith);
  if (sort_split) env.find_fn(heap, Sort::Loc);
  return env.finish(fe_bool(false), true);
}

// -------------------------------------------------------------- interpret

namespace {

struct IValue {
  enum class K { I, B, L, Ctx } k{};
  Int i;
  bool b = false;
  Id loc = no_id;
  // context values: base table or a partial application chain
  const FContext* base = nullptr;
  std::string part_fn;
  std::shared_ptr<IValue> inner;
};

struct OutOfFuelSignal {};

struct Interp {
  const FuncIR& p;
  std::map<std::pair<std::string, Sort>, const FDef*> defs;
  long fuel;

  explicit Interp(const FuncIR& prog, long f) : p(prog), fuel(f) {
    for (const FDef& d : p.defs) defs[{d.name, d.result}] = &d;
  }

  const FDef& lookup(const std::string& name, Sort s) {
    if (!p.sort_split) s = Sort::Arith;
    auto it = defs.find({name, s});
    if (it == defs.end()) throw FirError("undefined function " + name);
    return *it->second;
  }

  IValue resolve(const IValue& ctx, Id loc, Sort s) {
    if (ctx.k != IValue::K::Ctx) throw FirError("context value expected");
    if (ctx.base) {
      auto it = ctx.base->table.find(loc);
      if (it == ctx.base->table.end())
        throw FirError("undefined behaviour: input cell " + print(loc) + " queried");
      const GroundValue& v = it->second;
      if (v.sort != s) throw FirError("input cell sort clash at " + print(loc));
      if (s == Sort::Arith) return IValue{IValue::K::I, v.i};
      IValue r{IValue::K::L};
      r.loc = v.loc;
      return r;
    }
    return call(lookup(ctx.part_fn, s), *ctx.inner, loc);
  }

  IValue call(const FDef& d, const IValue& ctx, Id loc) {
    if (--fuel <= 0) throw OutOfFuelSignal{};
    IValue x{IValue::K::L};
    x.loc = loc;
    return eval(d.body, ctx, &x);
  }

  IValue eval(const FE& e, const IValue& ctx, const IValue* x) {
    switch (e->k) {
      case FExpr::K::IntLit:
        return IValue{IValue::K::I, e->ival};
      case FExpr::K::BoolLit: {
        IValue v{IValue::K::B};
        v.b = e->flag;
        return v;
      }
      case FExpr::K::NullLit: {
        IValue v{IValue::K::L};
        v.loc = mk_null();
        return v;
      }
      case FExpr::K::AddrLit: {
        IValue v{IValue::K::L};
        v.loc = mk_addr(e->ival, e->bits);
        return v;
      }
      case FExpr::K::VarLoc: {
        IValue v{IValue::K::L};
        v.loc = mk_var(e->sym);
        return v;
      }
      case FExpr::K::MkField: {
        IValue b = eval(e->kids[0], ctx, x);
        if (b.k != IValue::K::L) throw FirError("field of a non-location");
        IValue v{IValue::K::L};
        v.loc = mk_field(b.loc, e->sym);
        return v;
      }
      case FExpr::K::Add:
      case FExpr::K::Sub: {
        IValue a = eval(e->kids[0], ctx, x);
        IValue b = eval(e->kids[1], ctx, x);
        if (a.k != IValue::K::I || b.k != IValue::K::I) throw FirError("int expected");
        return IValue{IValue::K::I, e->k == FExpr::K::Add ? Int(a.i + b.i) : Int(a.i - b.i)};
      }
      case FExpr::K::Neg: {
        IValue a = eval(e->kids[0], ctx, x);
        if (a.k != IValue::K::I) throw FirError("int expected");
        return IValue{IValue::K::I, -a.i};
      }
      case FExpr::K::MulC: {
        IValue a = eval(e->kids[0], ctx, x);
        if (a.k != IValue::K::I) throw FirError("int expected");
        return IValue{IValue::K::I, e->ival * a.i};
      }
      case FExpr::K::EqI:
      case FExpr::K::LtI: {
        IValue a = eval(e->kids[0], ctx, x);
        IValue b = eval(e->kids[1], ctx, x);
        if (a.k != IValue::K::I || b.k != IValue::K::I) throw FirError("int expected");
        IValue v{IValue::K::B};
        v.b = e->k == FExpr::K::EqI ? a.i == b.i : a.i < b.i;
        return v;
      }
      case FExpr::K::EqL: {
        IValue a = eval(e->kids[0], ctx, x);
        IValue b = eval(e->kids[1], ctx, x);
        if (a.k != IValue::K::L || b.k != IValue::K::L)
          throw FirError("location expected");
        IValue v{IValue::K::B};
        v.b = a.loc == b.loc;
        return v;
      }
      case FExpr::K::And:
      case FExpr::K::Or: {
        IValue a = eval(e->kids[0], ctx, x);
        if (a.k != IValue::K::B) throw FirError("bool expected");
        if (e->k == FExpr::K::And && !a.b) return a;
        if (e->k == FExpr::K::Or && a.b) return a;
        IValue b = eval(e->kids[1], ctx, x);
        if (b.k != IValue::K::B) throw FirError("bool expected");
        return b;
      }
      case FExpr::K::Not: {
        IValue a = eval(e->kids[0], ctx, x);
        if (a.k != IValue::K::B) throw FirError("bool expected");
        a.b = !a.b;
        return a;
      }
      case FExpr::K::If: {
        IValue c = eval(e->kids[0], ctx, x);
        if (c.k != IValue::K::B) throw FirError("bool expected");
        return eval(c.b ? e->kids[1] : e->kids[2], ctx, x);
      }
      case FExpr::K::ParamX:
        if (!x) throw FirError("location parameter used outside a definition");
        return *x;
      case FExpr::K::CtxBase:
        return ctx;
      case FExpr::K::CtxPartial: {
        IValue v{IValue::K::Ctx};
        v.part_fn = e->sym;
        v.inner = std::make_shared<IValue>(eval(e->kids[0], ctx, x));
        return v;
      }
      case FExpr::K::CtxApply: {
        IValue c = eval(e->kids[0], ctx, x);
        IValue l = eval(e->kids[1], ctx, x);
        if (l.k != IValue::K::L) throw FirError("location expected");
        return resolve(c, l.loc, e->sort);
      }
      case FExpr::K::Call: {
        IValue c = eval(e->kids[0], ctx, x);
        IValue l = eval(e->kids[1], ctx, x);
        if (l.k != IValue::K::L) throw FirError("location expected");
        return call(lookup(e->sym, e->sort), c, l.loc);
      }
      case FExpr::K::Fail:
        throw FirError("evaluation reached a hole: " + e->sym);
    }
    throw FirError("bad expression");
  }
};

}  // namespace

FirOutcome fir_interpret(const FuncIR& p, const FContext& inputs, long fuel) {
  Interp in(p, fuel);
  IValue base{IValue::K::Ctx};
  base.base = &inputs;
  try {
    IValue r = in.eval(p.main, base, nullptr);
    if (p.main_is_assert) {
      if (r.k != IValue::K::B) throw FirError("assert expects a boolean");
      return {r.b ? FirOutcome::K::AssertFailed : FirOutcome::K::SafePass, {}};
    }
    if (r.k == IValue::K::I) return {FirOutcome::K::Value, gv_int(r.i)};
    if (r.k == IValue::K::L) return {FirOutcome::K::Value, gv_loc(r.loc)};
    throw FirError("main returned a function");
  } catch (const OutOfFuelSignal&) {
    return {FirOutcome::K::OutOfFuel, {}};
  }
}

// ------------------------------------------------------ static checks

void check_order_discipline(const FuncIR& p) {
  std::function<void(const FE&)> walk = [&](const FE& e) {
    for (size_t i = 0; i < e->kids.size(); ++i) {
      const FE& c = e->kids[i];
      bool is_ctx = c->k == FExpr::K::CtxBase || c->k == FExpr::K::CtxPartial;
      bool ok_slot = (e->k == FExpr::K::Call || e->k == FExpr::K::CtxApply ||
                      e->k == FExpr::K::CtxPartial) &&
                     i == 0;
      if (is_ctx && !ok_slot)
        throw std::runtime_error(
            "order violation: a context function flows into a value position");
      walk(c);
    }
  };
  for (const FDef& d : p.defs) walk(d.body);
  walk(p.main);
}

bool tail_recursive_only(const FuncIR& p) {
  // call graph over base names
  std::map<std::string, std::set<std::string>> calls;
  std::function<void(const std::string&, const FE&)> collect =
      [&](const std::string& from, const FE& e) {
        if (e->k == FExpr::K::Call) calls[from].insert(e->sym);
        if (e->k == FExpr::K::CtxPartial) calls[from].insert(e->sym);
        for (const FE& c : e->kids) collect(from, c);
      };
  for (const FDef& d : p.defs) collect(d.name, d.body);

  auto reaches = [&](const std::string& a, const std::string& b) {
    std::set<std::string> seen;
    std::vector<std::string> st{a};
    while (!st.empty()) {
      std::string v = st.back();
      st.pop_back();
      if (!seen.insert(v).second) continue;
      if (v == b) return true;
      for (auto& w : calls[v]) st.push_back(w);
    }
    return false;
  };

  bool ok = true;
  std::function<void(const FDef&, const FE&, bool)> walk = [&](const FDef& d,
                                                               const FE& e,
                                                               bool tail) {
    if (e->k == FExpr::K::Call && !tail) {
      if (reaches(e->sym, d.name)) ok = false;  // cycle through a non-tail call
    }
    if (e->k == FExpr::K::If) {
      walk(d, e->kids[0], false);
      walk(d, e->kids[1], tail);
      walk(d, e->kids[2], tail);
      return;
    }
    for (const FE& c : e->kids) walk(d, c, false);
  };
  for (const FDef& d : p.defs) walk(d, d.body, true);
  return ok;
}

// ------------------------------------------------------------- printing

namespace {

struct Printer {
  const FuncIR& p;

  std::string suffix(Sort s) const {
    if (!p.sort_split) return "";
    return s == Sort::Arith ? "_int" : "_ptr";
  }

  std::string ctx_args(const FE& c, Sort s) const {
    if (c->k == FExpr::K::CtxBase) {
      if (!p.sort_split) return "ctx";
      return "cint cptr";
    }
    if (c->k == FExpr::K::CtxPartial) {
      if (!p.sort_split)
        return "(" + c->sym + " " + ctx_args(c->kids[0], s) + ")";
      return "(" + c->sym + "_int " + ctx_args(c->kids[0], s) + ") (" + c->sym +
             "_ptr " + ctx_args(c->kids[0], s) + ")";
    }
    return "?ctx";
  }

  std::string one_ctx(const FE& c, Sort s) const {
    if (c->k == FExpr::K::CtxBase) {
      if (!p.sort_split) return "ctx";
      return s == Sort::Arith ? "cint" : "cptr";
    }
    if (c->k == FExpr::K::CtxPartial)
      return "(" + c->sym + suffix(s) + " " + ctx_args(c->kids[0], s) + ")";
    return "?ctx";
  }

  std::string pe(const FE& e) const {
    switch (e->k) {
      case FExpr::K::IntLit:
        return e->ival < 0 ? "(" + e->ival.str() + ")" : e->ival.str();
      case FExpr::K::BoolLit:
        return e->flag ? "True" : "False";
      case FExpr::K::NullLit:
        return "0";
      case FExpr::K::AddrLit:
        return e->bits ? e->ival.str() + "'" + std::to_string(e->bits) : e->ival.str();
      case FExpr::K::VarLoc:
        return "loc_" + e->sym;
      case FExpr::K::MkField:
        return "(" + pe(e->kids[0]) + ", " + e->sym + ")";
      case FExpr::K::Add:
        return "(" + pe(e->kids[0]) + " + " + pe(e->kids[1]) + ")";
      case FExpr::K::Sub:
        return "(" + pe(e->kids[0]) + " - " + pe(e->kids[1]) + ")";
      case FExpr::K::Neg:
        return "(- " + pe(e->kids[0]) + ")";
      case FExpr::K::MulC:
        return "(" + pe(e->kids[0]) + " * " + e->ival.str() + ")";
      case FExpr::K::EqI:
      case FExpr::K::EqL:
        return "(" + pe(e->kids[0]) + " == " + pe(e->kids[1]) + ")";
      case FExpr::K::LtI:
        return "(" + pe(e->kids[0]) + " < " + pe(e->kids[1]) + ")";
      case FExpr::K::And:
        return "(" + pe(e->kids[0]) + " && " + pe(e->kids[1]) + ")";
      case FExpr::K::Or:
        return "(" + pe(e->kids[0]) + " || " + pe(e->kids[1]) + ")";
      case FExpr::K::Not:
        return "(not " + pe(e->kids[0]) + ")";
      case FExpr::K::If:
        return "if " + pe(e->kids[0]) + " then " + pe(e->kids[1]) + " else " +
               pe(e->kids[2]);
      case FExpr::K::ParamX:
        return "x";
      case FExpr::K::CtxBase:
        return p.sort_split ? "cint cptr" : "ctx";
      case FExpr::K::CtxPartial:
        return ctx_args(e, Sort::Arith);
      case FExpr::K::CtxApply:
        return one_ctx(e->kids[0], e->sort) + " " + pe(e->kids[1]);
      case FExpr::K::Call:
        return e->sym + suffix(e->sort) + " " + ctx_args(e->kids[0], e->sort) +
               " " + pe(e->kids[1]);
      case FExpr::K::Fail:
        return "error \"" + e->sym + "\"";
    }
    return "?";
  }
};

}  // namespace

std::string pretty_print(const FuncIR& p) {
  Printer pr{p};
  std::ostringstream os;
  os << "-- heap effect as a pure second-order program\n";
  if (p.main_is_assert)
    os << "main = assert (not (" << pr.pe(p.main) << "))\n";
  else
    os << "main = " << pr.pe(p.main) << "\n";
  for (const FDef& d : p.defs) {
    std::string params = p.sort_split ? "cint cptr x" : "ctx x";
    os << d.name << pr.suffix(d.result) << " " << params << " = " << pr.pe(d.body)
       << "\n";
  }
  return os.str();
}

}  // namespace symheap
