#include "symheap/engine.hpp"

#include <algorithm>
#include <cassert>

#include "symheap/heap.hpp"

namespace symheap {

Sort SortTable::var_sort(const std::string& n) const {
  auto it = vars.find(n);
  return it == vars.end() ? Sort::Arith : it->second;
}
Sort SortTable::field_sort(const std::string& n) const {
  auto it = fields.find(n);
  return it == fields.end() ? Sort::Arith : it->second;
}

namespace {

// one-pass unification with conflict detection; names start unconstrained
struct SortInfer {
  std::map<std::string, Sort> vars, fields;

  void bind(std::map<std::string, Sort>& m, const std::string& n, Sort s,
            const char* what) {
    auto it = m.find(n);
    if (it == m.end()) {
      m[n] = s;
      return;
    }
    if (it->second != s)
      throw std::runtime_error(std::string("type clash: ") + what + " " + n +
                               " used both as pointer and as integer");
  }

  // returns the sort of e when determined
  std::optional<Sort> expr(const Expr& e) {
    switch (e.k) {
      case Expr::K::IntLit:
      case Expr::K::BoolLit:
        return Sort::Arith;
      case Expr::K::NullLit:
        return Sort::Loc;
      case Expr::K::New:
        for (auto& [f, init] : e.inits) {
          auto s = expr(*init);
          if (s) bind(fields, f, *s, "field");
        }
        return Sort::Loc;
      case Expr::K::Unop:
        expr(*e.lhs);
        want(*e.lhs, Sort::Arith);
        return Sort::Arith;
      case Expr::K::Binop: {
        auto a = expr(*e.lhs);
        auto b = expr(*e.rhs);
        if (e.op == "+" || e.op == "-" || e.op == "<" || e.op == "<=" ||
            e.op == ">" || e.op == ">=" || e.op == "and" || e.op == "or") {
          want(*e.lhs, Sort::Arith);
          want(*e.rhs, Sort::Arith);
          return Sort::Arith;
        }
        // equality: sides agree
        if (a && !b) want(*e.rhs, *a);
        if (b && !a) want(*e.lhs, *b);
        return Sort::Arith;  // comparison result is boolean
      }
      case Expr::K::Loc: {
        if (e.fields.empty()) {
          auto it = vars.find(e.ident);
          if (it != vars.end()) return it->second;
          return std::nullopt;
        }
        bind(vars, e.ident, Sort::Loc, "variable");
        for (size_t i = 0; i + 1 < e.fields.size(); ++i)
          bind(fields, e.fields[i], Sort::Loc, "field");
        auto it = fields.find(e.fields.back());
        if (it != fields.end()) return it->second;
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  void want(const Expr& e, Sort s) {
    if (e.k == Expr::K::Loc) {
      if (e.fields.empty()) {
        bind(vars, e.ident, s, "variable");
      } else {
        bind(vars, e.ident, Sort::Loc, "variable");
        for (size_t i = 0; i + 1 < e.fields.size(); ++i)
          bind(fields, e.fields[i], Sort::Loc, "field");
        bind(fields, e.fields.back(), s, "field");
      }
    }
  }
};

}  // namespace

SortTable infer_sorts(const Program& p) {
  SortInfer si;
  // iterate to a fixpoint: later statements can determine earlier sorts
  for (int round = 0; round < 4; ++round) {
    for (const Statement& st : p.statements) {
      switch (st.k) {
        case Statement::K::Assign: {
          auto vs = si.expr(*st.value);
          if (st.target.fields.empty()) {
            if (vs) si.bind(si.vars, st.target.ident, *vs, "variable");
          } else {
            si.bind(si.vars, st.target.ident, Sort::Loc, "variable");
            for (size_t i = 0; i + 1 < st.target.fields.size(); ++i)
              si.bind(si.fields, st.target.fields[i], Sort::Loc, "field");
            if (vs) si.bind(si.fields, st.target.fields.back(), *vs, "field");
          }
          break;
        }
        case Statement::K::Goto:
          for (auto& [g, lbl] : st.arms) si.expr(*g);
          break;
        default:
          break;
      }
    }
  }
  return SortTable{si.vars, si.fields};
}

// --------------------------------------------------------------- engine

Engine::Engine(const Program& p, const Cfg& cfg, EngineOptions opts)
    : p_(p),
      cfg_(cfg),
      opts_(opts),
      sorts_(infer_sorts(p)),
      oracle_(bodies_, opts.oracle_depth),
      next_alloc_(opts.alloc_base) {}

void Engine::record_error(ErrorEntry::Kind k, Id pc, uint32_t instr, int line) {
  Oracle::V v = oracle_.sat(pc);
  if (v == Oracle::V::Unsat) return;
  report_.errors.push_back({k, pc, instr, line, v == Oracle::V::Unknown});
}

void Engine::null_check(Id base, Id pc, uint32_t instr, bool emit) {
  if (!emit) return;
  if (sort_of(base) != Sort::Loc)
    throw std::runtime_error("type clash: dereference of a non-pointer");
  Id g = g_and(pc, g_eq(base, mk_null()));
  if (g == bot()) return;
  record_error(ErrorEntry::Kind::NullDeref, g, instr, p_.statements[instr].line);
}

Id Engine::truthy(Id value) const {
  if (sort_of(value) != Sort::Arith)
    throw std::runtime_error("type clash: boolean expected");
  return g_not(g_eq(value, mk_int(0)));
}

std::pair<Id, Id> Engine::eval_expr(Id sigma, Id pc, const Expr& e, uint32_t instr,
                                    bool emit_errors, bool in_cycle) {
  switch (e.k) {
    case Expr::K::IntLit:
    case Expr::K::BoolLit:
      return {sigma, mk_int(e.ival)};
    case Expr::K::NullLit:
      return {sigma, mk_null()};
    case Expr::K::Loc: {
      Id cur = read_g(sigma, mk_var(e.ident), sorts_.var_sort(e.ident));
      for (size_t i = 0; i < e.fields.size(); ++i) {
        null_check(cur, pc, instr, emit_errors);
        cur = read_g(sigma, mk_field(cur, e.fields[i]),
                     sorts_.field_sort(e.fields[i]));
      }
      return {sigma, cur};
    }
    case Expr::K::Unop: {
      auto [s1, v] = eval_expr(sigma, pc, *e.lhs, instr, emit_errors, in_cycle);
      if (e.op == "-") return {s1, a_neg(v)};
      if (e.op == "not") return {s1, ite_term(g_not(truthy(v)), mk_int(1), mk_int(0))};
      throw std::runtime_error("unknown unary operator " + e.op);
    }
    case Expr::K::Binop: {
      auto [s1, a] = eval_expr(sigma, pc, *e.lhs, instr, emit_errors, in_cycle);
      auto [s2, b] = eval_expr(s1, pc, *e.rhs, instr, emit_errors, in_cycle);
      auto encode = [&](Id g) { return ite_term(g, mk_int(1), mk_int(0)); };
      if (e.op == "+") return {s2, a_add(a, b)};
      if (e.op == "-") return {s2, a_sub(a, b)};
      if (e.op == "=") return {s2, encode(g_eq(a, b))};
      if (e.op == "<>") return {s2, encode(g_not(g_eq(a, b)))};
      if (e.op == "<") return {s2, encode(g_lt(a, b))};
      if (e.op == ">") return {s2, encode(g_lt(b, a))};
      if (e.op == "<=") return {s2, encode(g_not(g_lt(b, a)))};
      if (e.op == ">=") return {s2, encode(g_not(g_lt(a, b)))};
      if (e.op == "and") return {s2, encode(g_and(truthy(a), truthy(b)))};
      if (e.op == "or") return {s2, encode(g_or(truthy(a), truthy(b)))};
      throw std::runtime_error("unknown operator " + e.op);
    }
    case Expr::K::New: {
      if (in_cycle && !epoch_addresses())
        throw std::runtime_error(
            "allocation inside a cyclic region requires epoch addressing "
            "(--epoch-addresses on)");
      Id addr = mk_addr(next_alloc_, 0, in_cycle);
      next_alloc_ += 1;
      Id s = sigma;
      for (auto& [f, init] : e.inits) {
        auto [s1, v] = eval_expr(s, pc, *init, instr, emit_errors, in_cycle);
        s = write_g(s1, mk_field(addr, f), v);
      }
      return {s, addr};
    }
  }
  throw std::runtime_error("bad expression");
}

Id Engine::exec_region(uint32_t l0, uint64_t d0) {
  const bool region = cfg_.is_recursive(l0);
  const bool emit = !region;  // only the start walk reports errors
  const size_t n = p_.statements.size();

  struct St {
    Id pc, sigma;
  };
  std::map<std::tuple<int, uint32_t, uint64_t>, St> work;
  auto push = [&](uint32_t l, Id pc, Id sigma, uint64_t d) {
    auto key = std::make_tuple(cfg_.finish_time[l], l, d);
    auto it = work.find(key);
    if (it == work.end()) {
      work.emplace(key, St{pc, sigma});
    } else {
      it->second = St{g_or(it->second.pc, pc),
                      merge_g({{it->second.pc, it->second.sigma}, {pc, sigma}})};
    }
  };

  std::vector<std::pair<Id, Id>> result_arms;
  push(l0, top(), empty_heap(), d0);

  while (!work.empty()) {
    auto it = work.begin();
    auto [ft, l, d] = it->first;
    St st = it->second;
    work.erase(it);
    const Statement& ins = p_.statements[l];
    std::vector<std::tuple<uint32_t, Id, Id>> next;

    switch (ins.k) {
      case Statement::K::Halt:
        if (!region) result_arms.emplace_back(st.pc, st.sigma);
        break;
      case Statement::K::Fail:
        if (emit) record_error(ErrorEntry::Kind::Fail, st.pc, l, ins.line);
        break;
      case Statement::K::Assign: {
        auto [s1, value] = eval_expr(st.sigma, st.pc, *ins.value, l, emit, region);
        if (ins.target.fields.empty()) {
          Id s2 = write_g(s1, mk_var(ins.target.ident), value);
          if (l + 1 < n) next.emplace_back(l + 1, st.pc, s2);
        } else {
          // evaluate the base object of the written field
          Expr base_expr;
          base_expr.k = Expr::K::Loc;
          base_expr.ident = ins.target.ident;
          base_expr.fields.assign(ins.target.fields.begin(),
                                  ins.target.fields.end() - 1);
          auto [s2, base] = eval_expr(s1, st.pc, base_expr, l, emit, region);
          Id gnull = g_eq(base, mk_null());
          Id ok = g_and(st.pc, g_not(gnull));
          if (oracle_.sat(ok) != Oracle::V::Unsat) {
            Id s3 = write_g(s2, mk_field(base, ins.target.fields.back()), value);
            if (l + 1 < n) next.emplace_back(l + 1, ok, s3);
          }
          Id bad = g_and(st.pc, gnull);
          if (emit && bad != bot())
            record_error(ErrorEntry::Kind::NullDeref, bad, l, ins.line);
        }
        break;
      }
      case Statement::K::Goto: {
        Id guard_succ = top();
        Id sigma = st.sigma;
        for (auto& [ge, lbl] : ins.arms) {
          auto [s1, gv] = eval_expr(sigma, st.pc, *ge, l, emit, region);
          sigma = s1;
          Id g = truthy(gv);
          Id taken = g_and({st.pc, g, guard_succ});
          if (oracle_.sat(taken) != Oracle::V::Unsat)
            next.emplace_back(p_.label_table.at(lbl), taken, sigma);
          guard_succ = g_and(guard_succ, g_not(g));
        }
        Id fall = g_and(st.pc, guard_succ);
        if (l + 1 < n && oracle_.sat(fall) != Oracle::V::Unsat)
          next.emplace_back(l + 1, fall, sigma);
        break;
      }
    }

    for (auto& [l2, pc2, s2] : next) {
      if (l2 == l0) {
        // a completed cycle: compose with this region's recursion symbol
        result_arms.emplace_back(pc2, compose_g(s2, mk_heap_rec(l0, d0)));
        continue;
      }
      if ((d >> l2) & 1) continue;  // already summarized on this path
      uint64_t d2 = d;
      Id s3 = s2;
      if (cfg_.is_recursive(l2)) {
        d2 = d | (1ull << l2);
        if (!bodies_.get(l2, d2)) {
          Id body = exec_region(l2, d2);
          bodies_.set(l2, d2, body);
          report_.body_constructions.push_back({{l2, d2}, 1});
        }
        s3 = compose_g(s2, mk_heap_rec(l2, d2));
      }
      push(l2, pc2, s3, d2);
    }
  }

  Id pc_r = bot();
  for (auto& [pc, h] : result_arms) pc_r = g_or(pc_r, pc);
  if (region) {
    auto arms = result_arms;
    arms.emplace_back(g_not(pc_r), empty_heap());  // the empty-path case
    return merge_g(std::move(arms));
  }
  return merge_g(std::move(result_arms));
}

VerificationReport Engine::run() {
  report_ = VerificationReport{};
  for (const std::string& w : cfg_.warnings) report_.warnings.push_back(w);
  report_.result_heap = exec_region(cfg_.start, 0);
  report_.bodies = bodies_;
  return std::move(report_);
}

VerificationReport verify(const Program& p, EngineOptions opts) {
  Cfg cfg = build_cfg(p);
  Engine eng(p, cfg, opts);
  return eng.run();
}

}  // namespace symheap
