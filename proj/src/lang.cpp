#include "symheap/lang.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <set>
#include <sstream>

namespace symheap {

namespace {

const std::set<std::string> kKeywords = {"goto", "fail", "halt", "new",
                                         "null", "true", "false",
                                         "and",  "or",   "not"};

struct Token {
  enum class K { Ident, Number, Sym, End } k;
  std::string text;
  Int value;
  int line, col;
};

struct SrcLexer {
  std::string src;
  size_t pos = 0;
  int line = 1, col = 1;
  std::vector<Token> tokens;

  [[noreturn]] void err(const std::string& m) { throw ParseError(m, line, col); }

  void run() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '\n') { ++line; col = 1; ++pos; continue; }
      if (std::isspace(static_cast<unsigned char>(c))) { ++col; ++pos; continue; }
      if (c == '/' && pos + 1 < src.size() && src[pos + 1] == '/') {
        while (pos < src.size() && src[pos] != '\n') ++pos;
        continue;
      }
      int tl = line, tc = col;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t p = pos;
        while (p < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[p])) || src[p] == '_'))
          ++p;
        std::string id = src.substr(pos, p - pos);
        col += static_cast<int>(p - pos);
        pos = p;
        tokens.push_back({Token::K::Ident, id, 0, tl, tc});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t p = pos;
        while (p < src.size() && std::isdigit(static_cast<unsigned char>(src[p]))) ++p;
        Int v(src.substr(pos, p - pos));
        col += static_cast<int>(p - pos);
        pos = p;
        tokens.push_back({Token::K::Number, "", v, tl, tc});
        continue;
      }
      auto two = src.substr(pos, 2);
      for (const char* s : {":=", "->", "<>", "<=", ">="}) {
        if (two == s) {
          tokens.push_back({Token::K::Sym, s, 0, tl, tc});
          pos += 2; col += 2;
          goto next;
        }
      }
      if (std::string("{}(),.:=<>+-").find(c) != std::string::npos) {
        tokens.push_back({Token::K::Sym, std::string(1, c), 0, tl, tc});
        ++pos; ++col;
        continue;
      }
      if (c == ';') { tokens.push_back({Token::K::Sym, ",", 0, tl, tc}); ++pos; ++col; continue; }
      err(std::string("unexpected character '") + c + "'");
    next:;
    }
    tokens.push_back({Token::K::End, "", 0, line, col});
  }
};

struct Parser {
  std::vector<Token> ts;
  size_t i = 0;
  std::set<std::string> vars_used;

  const Token& cur() const { return ts[i]; }
  const Token& peek(size_t k = 1) const { return ts[std::min(i + k, ts.size() - 1)]; }
  [[noreturn]] void err(const std::string& m) { throw ParseError(m, cur().line, cur().col); }

  bool eat_sym(const std::string& s) {
    if (cur().k == Token::K::Sym && cur().text == s) { ++i; return true; }
    return false;
  }
  void expect_sym(const std::string& s) {
    if (!eat_sym(s)) err("expected '" + s + "'");
  }
  bool at_ident(const std::string& s) const {
    return cur().k == Token::K::Ident && cur().text == s;
  }
  std::string take_ident(const char* what) {
    if (cur().k != Token::K::Ident) err(std::string("expected ") + what);
    std::string s = cur().text;
    ++i;
    return s;
  }

  ExprPtr make(Expr e) { return std::make_shared<Expr>(std::move(e)); }

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr l = parse_and();
    while (at_ident("or")) {
      int ln = cur().line, cl = cur().col;
      ++i;
      Expr e; e.k = Expr::K::Binop; e.op = "or"; e.lhs = l; e.rhs = parse_and();
      e.line = ln; e.col = cl;
      l = make(std::move(e));
    }
    return l;
  }
  ExprPtr parse_and() {
    ExprPtr l = parse_not();
    while (at_ident("and")) {
      int ln = cur().line, cl = cur().col;
      ++i;
      Expr e; e.k = Expr::K::Binop; e.op = "and"; e.lhs = l; e.rhs = parse_not();
      e.line = ln; e.col = cl;
      l = make(std::move(e));
    }
    return l;
  }
  ExprPtr parse_not() {
    if (at_ident("not")) {
      int ln = cur().line, cl = cur().col;
      ++i;
      Expr e; e.k = Expr::K::Unop; e.op = "not"; e.lhs = parse_not();
      e.line = ln; e.col = cl;
      return make(std::move(e));
    }
    return parse_cmp();
  }
  ExprPtr parse_cmp() {
    ExprPtr l = parse_add();
    for (const char* op : {"=", "<>", "<=", ">=", "<", ">"}) {
      if (cur().k == Token::K::Sym && cur().text == op) {
        int ln = cur().line, cl = cur().col;
        ++i;
        Expr e; e.k = Expr::K::Binop; e.op = op; e.lhs = l; e.rhs = parse_add();
        e.line = ln; e.col = cl;
        return make(std::move(e));
      }
    }
    return l;
  }
  ExprPtr parse_add() {
    ExprPtr l = parse_unary();
    while (cur().k == Token::K::Sym && (cur().text == "+" || cur().text == "-")) {
      std::string op = cur().text;
      int ln = cur().line, cl = cur().col;
      ++i;
      Expr e; e.k = Expr::K::Binop; e.op = op; e.lhs = l; e.rhs = parse_unary();
      e.line = ln; e.col = cl;
      l = make(std::move(e));
    }
    return l;
  }
  ExprPtr parse_unary() {
    if (cur().k == Token::K::Sym && cur().text == "-") {
      int ln = cur().line, cl = cur().col;
      ++i;
      Expr e; e.k = Expr::K::Unop; e.op = "-"; e.lhs = parse_unary();
      e.line = ln; e.col = cl;
      return make(std::move(e));
    }
    return parse_primary();
  }
  ExprPtr parse_primary() {
    int ln = cur().line, cl = cur().col;
    if (cur().k == Token::K::Number) {
      Expr e; e.k = Expr::K::IntLit; e.ival = cur().value; e.line = ln; e.col = cl;
      ++i;
      return make(std::move(e));
    }
    if (eat_sym("(")) {
      ExprPtr e = parse_expr();
      expect_sym(")");
      return e;
    }
    if (at_ident("true") || at_ident("false")) {
      Expr e; e.k = Expr::K::BoolLit; e.ival = at_ident("true") ? 1 : 0;
      e.line = ln; e.col = cl;
      ++i;
      return make(std::move(e));
    }
    if (at_ident("null")) {
      ++i;
      Expr e; e.k = Expr::K::NullLit; e.line = ln; e.col = cl;
      return make(std::move(e));
    }
    if (at_ident("new")) {
      ++i;
      expect_sym("{");
      Expr e; e.k = Expr::K::New; e.line = ln; e.col = cl;
      do {
        std::string f = take_ident("field name");
        expect_sym("=");
        e.inits.emplace_back(f, parse_expr());
      } while (eat_sym(","));
      expect_sym("}");
      return make(std::move(e));
    }
    if (cur().k == Token::K::Ident) {
      if (kKeywords.count(cur().text)) err("keyword '" + cur().text + "' used as identifier");
      Expr e; e.k = Expr::K::Loc; e.ident = cur().text; e.line = ln; e.col = cl;
      ++i;
      while (cur().k == Token::K::Sym && cur().text == "." &&
             peek().k == Token::K::Ident) {
        ++i;
        e.fields.push_back(take_ident("field name"));
      }
      vars_used.insert(e.ident);
      return make(std::move(e));
    }
    err("expected expression");
  }

  Program parse() {
    Program p;
    std::vector<std::pair<std::string, int>> goto_targets;  // label, line
    while (cur().k != Token::K::End) {
      Statement st;
      st.line = cur().line;
      st.col = cur().col;
      // label prefixes: ident ':'
      while (cur().k == Token::K::Ident && !kKeywords.count(cur().text) &&
             peek().k == Token::K::Sym && peek().text == ":") {
        std::string lbl = cur().text;
        if (p.label_table.count(lbl))
          throw ParseError("duplicate label " + lbl, cur().line, cur().col);
        p.label_table[lbl] = static_cast<uint32_t>(p.statements.size());
        st.labels.push_back(lbl);
        i += 2;
      }
      st.line = cur().line;
      st.col = cur().col;
      if (at_ident("halt")) {
        ++i;
        st.k = Statement::K::Halt;
      } else if (at_ident("fail")) {
        ++i;
        st.k = Statement::K::Fail;
      } else if (at_ident("goto")) {
        ++i;
        st.k = Statement::K::Goto;
        expect_sym("{");
        do {
          ExprPtr g = parse_expr();
          expect_sym("->");
          std::string lbl = take_ident("label");
          goto_targets.emplace_back(lbl, st.line);
          st.arms.emplace_back(g, lbl);
        } while (eat_sym(","));
        expect_sym("}");
      } else if (cur().k == Token::K::Ident) {
        if (kKeywords.count(cur().text)) err("unexpected keyword '" + cur().text + "'");
        st.k = Statement::K::Assign;
        st.target.ident = take_ident("location");
        st.target.line = st.line;
        st.target.col = st.col;
        vars_used.insert(st.target.ident);
        while (cur().k == Token::K::Sym && cur().text == "." &&
               peek().k == Token::K::Ident) {
          ++i;
          st.target.fields.push_back(take_ident("field name"));
        }
        expect_sym(":=");
        st.value = parse_expr();
      } else {
        err("expected statement");
      }
      p.statements.push_back(std::move(st));
    }
    if (p.statements.empty()) throw ParseError("empty program", 1, 1);
    bool has_halt = std::any_of(p.statements.begin(), p.statements.end(),
                                [](const Statement& s) { return s.k == Statement::K::Halt; });
    if (!has_halt) throw ParseError("program contains no halt", 1, 1);
    for (auto& [lbl, line] : goto_targets)
      if (!p.label_table.count(lbl))
        throw ParseError("undefined label " + lbl, line, 1);
    for (auto& [lbl, idx] : p.label_table)
      if (vars_used.count(lbl))
        throw ParseError("name " + lbl + " used both as label and identifier", 1, 1);
    return p;
  }
};

}  // namespace

Program parse_program(const std::string& source) {
  SrcLexer lx{source};
  lx.run();
  Parser p{std::move(lx.tokens)};
  return p.parse();
}

Program parse_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

// -------------------------------------------------------------------- CFG

std::pair<std::vector<int>, uint64_t> finish_times_and_rv(const Digraph& g) {
  std::vector<int> state(g.n, 0);
  std::vector<uint32_t> postorder;
  // iterative DFS preserving successor order
  auto dfs = [&](uint32_t root) {
    if (state[root]) return;
    std::vector<std::pair<uint32_t, size_t>> stack{{root, 0}};
    state[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < g.succ[v].size()) {
        uint32_t w = g.succ[v][next++];
        if (!state[w]) {
          state[w] = 1;
          stack.push_back({w, 0});
        }
      } else {
        postorder.push_back(v);
        state[v] = 2;
        stack.pop_back();
      }
    }
  };
  dfs(g.start);
  for (uint32_t v = 0; v < g.n; ++v) dfs(v);
  std::vector<int> time(g.n, 0);
  for (size_t k = 0; k < postorder.size(); ++k)
    time[postorder[k]] = static_cast<int>(postorder.size() - 1 - k);
  uint64_t rv = 0;
  for (uint32_t u = 0; u < g.n; ++u)
    for (uint32_t v : g.succ[u])
      if (time[u] >= time[v]) rv |= 1ull << v;
  return {time, rv};
}

Cfg build_cfg(const Program& p) {
  size_t n = p.statements.size();
  if (n > 64)
    throw std::runtime_error("program exceeds the 64-instruction limit of the "
                             "recursion bitmask");
  Cfg cfg;
  cfg.vertex_count = n;
  cfg.succ.assign(n, {});
  auto add_edge = [&](uint32_t u, uint32_t v) {
    auto& s = cfg.succ[u];
    if (std::find(s.begin(), s.end(), v) != s.end()) return;
    s.push_back(v);
    cfg.edges.emplace_back(u, v);
  };
  for (uint32_t idx = 0; idx < n; ++idx) {
    const Statement& st = p.statements[idx];
    switch (st.k) {
      case Statement::K::Halt:
      case Statement::K::Fail:
        cfg.exits.push_back(idx);
        break;
      case Statement::K::Assign:
        if (idx + 1 < n) add_edge(idx, idx + 1);
        break;
      case Statement::K::Goto: {
        for (auto& [g, lbl] : st.arms) {
          uint32_t t = p.label_table.at(lbl);
          if (t == 0)
            throw std::runtime_error("goto targets the start instruction (label " + lbl + ")");
          add_edge(idx, t);
        }
        if (idx + 1 < n) add_edge(idx, idx + 1);  // taken when no arm matches
        break;
      }
    }
  }
  for (auto& [u, v] : cfg.edges)
    if (v == cfg.start)
      throw std::runtime_error("start instruction has an incoming edge");

  Digraph g{n, cfg.succ, cfg.start};
  auto [time, rv] = finish_times_and_rv(g);
  cfg.finish_time = std::move(time);
  cfg.rv_mask = rv;
  for (uint32_t v = 0; v < n; ++v)
    if ((rv >> v) & 1) cfg.recursive_vertices.push_back(v);

  // reachability diagnostics
  std::vector<bool> reach(n, false);
  std::vector<uint32_t> work{cfg.start};
  reach[cfg.start] = true;
  while (!work.empty()) {
    uint32_t v = work.back();
    work.pop_back();
    for (uint32_t w : cfg.succ[v])
      if (!reach[w]) { reach[w] = true; work.push_back(w); }
  }
  std::vector<uint32_t> dead;
  bool dead_halt = false;
  for (uint32_t v = 0; v < n; ++v)
    if (!reach[v]) {
      dead.push_back(v);
      if (p.statements[v].k == Statement::K::Halt) dead_halt = true;
    }
  if (!dead.empty()) {
    std::string w = "unreachable instructions:";
    for (uint32_t v : dead) w += " " + std::to_string(v);
    if (!dead_halt) w += " (no halt among them)";
    cfg.warnings.push_back(w);
  }
  return cfg;
}

// ------------------------------------------------------ concrete runner

namespace {

struct NullDerefSignal {
  uint32_t instruction;
};

struct Runner {
  const Program& p;
  ConcreteState st;
  uint32_t cur_instr = 0;

  [[noreturn]] void hard(const std::string& m) {
    throw std::runtime_error("concrete run: " + m + " (instruction " +
                             std::to_string(cur_instr) + ")");
  }

  GroundValue load(Id loc) {
    auto it = st.store.find(loc);
    if (it == st.store.end()) hard("read of uninitialized location " + print(loc));
    return it->second;
  }

  Id resolve_path(const std::string& ident, const std::vector<std::string>& fields,
                  size_t upto) {
    Id loc = mk_var(ident);
    for (size_t k = 0; k < upto; ++k) {
      GroundValue v = load(loc);
      if (v.sort != Sort::Loc) hard("field access through a non-pointer");
      if (kind(v.loc) == Kind::NullLoc) throw NullDerefSignal{cur_instr};
      loc = mk_field(v.loc, fields[k]);
    }
    return loc;
  }

  GroundValue eval(const Expr& e) {
    switch (e.k) {
      case Expr::K::IntLit:
      case Expr::K::BoolLit:
        return gv_int(e.ival);
      case Expr::K::NullLit:
        return gv_loc(mk_null());
      case Expr::K::Loc: {
        Id loc = resolve_path(e.ident, e.fields, e.fields.size());
        return load(loc);
      }
      case Expr::K::Unop: {
        GroundValue v = eval(*e.lhs);
        if (v.sort != Sort::Arith) hard("arith operand expected");
        if (e.op == "-") return gv_int(-v.i);
        if (e.op == "not") return gv_int(v.i == 0 ? 1 : 0);
        hard("unknown unary operator " + e.op);
      }
      case Expr::K::Binop: {
        GroundValue a = eval(*e.lhs);
        GroundValue b = eval(*e.rhs);
        auto ints = [&]() {
          if (a.sort != Sort::Arith || b.sort != Sort::Arith)
            hard("arith operands expected for " + e.op);
        };
        if (e.op == "+") { ints(); return gv_int(a.i + b.i); }
        if (e.op == "-") { ints(); return gv_int(a.i - b.i); }
        if (e.op == "<") { ints(); return gv_int(a.i < b.i ? 1 : 0); }
        if (e.op == "<=") { ints(); return gv_int(a.i <= b.i ? 1 : 0); }
        if (e.op == ">") { ints(); return gv_int(a.i > b.i ? 1 : 0); }
        if (e.op == ">=") { ints(); return gv_int(a.i >= b.i ? 1 : 0); }
        if (e.op == "and") { ints(); return gv_int(a.i != 0 && b.i != 0 ? 1 : 0); }
        if (e.op == "or") { ints(); return gv_int(a.i != 0 || b.i != 0 ? 1 : 0); }
        if (e.op == "=" || e.op == "<>") {
          bool eq;
          if (a.sort == Sort::Arith && b.sort == Sort::Arith) eq = a.i == b.i;
          else if (a.sort == Sort::Loc && b.sort == Sort::Loc) eq = a.loc == b.loc;
          else hard("comparison of pointer and integer");
          if (e.op == "<>") eq = !eq;
          return gv_int(eq ? 1 : 0);
        }
        hard("unknown operator " + e.op);
      }
      case Expr::K::New: {
        Id addr = mk_addr(st.next_address);
        st.next_address += 1;
        for (auto& [f, init] : e.inits) {
          GroundValue v = eval(*init);
          st.store[mk_field(addr, f)] = v;
        }
        return gv_loc(addr);
      }
    }
    hard("bad expression");
  }

  RunResult run(long fuel) {
    size_t n = p.statements.size();
    while (fuel-- > 0) {
      if (st.pc_index >= n) hard("control fell off the end of the program");
      cur_instr = st.pc_index;
      const Statement& s = p.statements[st.pc_index];
      try {
        switch (s.k) {
          case Statement::K::Halt:
            return {RunResult::K::Halted, st, st.pc_index};
          case Statement::K::Fail:
            return {RunResult::K::Failed, st, st.pc_index};
          case Statement::K::Assign: {
            GroundValue v = eval(*s.value);
            Id loc = resolve_path(s.target.ident, s.target.fields, s.target.fields.size());
            st.store[loc] = v;
            st.pc_index += 1;
            break;
          }
          case Statement::K::Goto: {
            bool taken = false;
            for (auto& [ge, lbl] : s.arms) {
              GroundValue g = eval(*ge);
              if (g.sort != Sort::Arith) hard("goto guard is not boolean");
              if (g.i != 0) {
                st.pc_index = p.label_table.at(lbl);
                taken = true;
                break;
              }
            }
            if (!taken) st.pc_index += 1;
            break;
          }
        }
      } catch (const NullDerefSignal& sig) {
        return {RunResult::K::NullDeref, st, sig.instruction};
      }
    }
    return {RunResult::K::OutOfFuel, st, st.pc_index};
  }
};

}  // namespace

RunResult concrete_run(const Program& p, ConcreteState s0, long fuel) {
  Runner r{p, std::move(s0)};
  return r.run(fuel);
}

}  // namespace symheap
