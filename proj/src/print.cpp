#include "symheap/term.hpp"

#include <cctype>
#include <sstream>

namespace symheap {

namespace {

std::string hex(const Int& v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

// splits a linear term into printable monomials
struct Mono {
  bool neg;
  std::string text;
};

std::vector<Mono> monomials(const Node& n) {
  std::vector<Mono> ms;
  for (auto& [atom, coeff] : n.lin) {
    Int c = coeff < 0 ? Int(-coeff) : coeff;
    std::string t = (c == 1) ? print(atom) : c.str() + "*" + print(atom);
    ms.push_back({coeff < 0, t});
  }
  if (n.num != 0 || ms.empty()) {
    Int c = n.num < 0 ? Int(-n.num) : n.num;
    ms.push_back({n.num < 0, c.str()});
  }
  return ms;
}

std::string join_monos(const std::vector<Mono>& ms) {
  std::string out;
  for (size_t i = 0; i < ms.size(); ++i) {
    if (i == 0) out += ms[i].neg ? "-" : "";
    else out += ms[i].neg ? " - " : " + ";
    out += ms[i].text;
  }
  return out;
}

// prints L relop 0 as "P relop N" with both sides nonnegative
std::string sided(const Node& lin, const char* rel) {
  std::vector<Mono> pos, neg;
  for (auto& m : monomials(lin)) {
    if (m.text == "0" && lin.lin.size() > 0 && lin.num == 0) continue;
    (m.neg ? neg : pos).push_back({false, m.text});
  }
  std::string l = pos.empty() ? "0" : join_monos(pos);
  std::string r = neg.empty() ? "0" : join_monos(neg);
  return l + " " + rel + " " + r;
}

std::string maybe_paren(Id g) {
  Kind k = kind(g);
  if (k == Kind::And || k == Kind::Or) return "(" + print(g) + ")";
  return print(g);
}

}  // namespace

std::string print(Id id) {
  const Node& n = node(id);
  switch (n.kind) {
    case Kind::IntLin:
      return join_monos(monomials(n));
    case Kind::NullLoc:
      return "null";
    case Kind::Addr: {
      std::string s = "0x" + hex(n.num);
      if (n.bits) s += "@" + std::to_string(n.bits);
      return s;
    }
    case Kind::Var:
      return n.sym;
    case Kind::Field:
      return print(n.a) + "." + n.sym;
    case Kind::Cell:
      if (is_empty_heap(n.a)) return "LI(" + print(n.b) + ")";
      return "LI(" + print(n.a) + ", " + print(n.b) + ")";
    case Kind::Union: {
      std::string s = "union(";
      for (size_t i = 0; i < n.arms.size(); ++i) {
        if (i) s += ", ";
        s += "⟨" + print(n.arms[i].first) + ", " + print(n.arms[i].second) + "⟩";
      }
      return s + ")";
    }
    case Kind::Top:
      return "⊤";
    case Kind::Bot:
      return "⊥";
    case Kind::EqA:
      return sided(node(n.a), "=");
    case Kind::LtA:
      return sided(node(n.a), "<");
    case Kind::EqL:
      return print(n.a) + " = " + print(n.b);
    case Kind::Not: {
      const Node& in = node(n.a);
      if (in.kind == Kind::EqL) return print(in.a) + " ≠ " + print(in.b);
      if (in.kind == Kind::EqA) return sided(node(in.a), "≠");
      return "¬(" + print(n.a) + ")";
    }
    case Kind::And: {
      std::string s;
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) s += " ∧ ";
        s += maybe_paren(n.kids[i]);
      }
      return s;
    }
    case Kind::Or: {
      std::string s;
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) s += " ∨ ";
        s += maybe_paren(n.kids[i]);
      }
      return s;
    }
    case Kind::HeapDef:
      if (n.arms.empty()) return "ε";
      return "{" + print_heap_entries(id) + "}";
    case Kind::HeapCompose: {
      auto side = [](Id h) {
        Kind k = kind(h);
        if (k == Kind::HeapCompose) return "(" + print(h) + ")";
        return print(h);
      };
      return side(n.a) + " ∘ " + side(n.b);
    }
    case Kind::HeapMerge: {
      std::string s = "merge(";
      for (size_t i = 0; i < n.arms.size(); ++i) {
        if (i) s += ", ";
        s += "⟨" + print(n.arms[i].first) + ", " + print(n.arms[i].second) + "⟩";
      }
      return s + ")";
    }
    case Kind::HeapWrite:
      return "write(" + print(n.a) + ", " + print(n.arms[0].first) + ", " +
             print(n.arms[0].second) + ")";
    case Kind::HeapRec: {
      std::string s = "Rec(" + n.num.str() + ", {";
      bool first = true;
      for (int i = 0; i < 64; ++i)
        if (n.bits & (1ull << i)) {
          if (!first) s += ", ";
          s += std::to_string(i);
          first = false;
        }
      return s + "})";
    }
  }
  return "?";
}

std::string print_heap_entries(Id heapdef) {
  const Node& n = node(heapdef);
  std::string s;
  for (size_t i = 0; i < n.arms.size(); ++i) {
    if (i) s += ", ";
    s += print(n.arms[i].first) + " ↦ " + print(n.arms[i].second);
  }
  return s;
}

// ------------------------------------------------------------------ parser

namespace {

struct Lexer {
  std::string src;
  size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }
  bool eat(const std::string& tok) {
    skip_ws();
    if (src.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  bool peek(const std::string& tok) {
    skip_ws();
    return src.compare(pos, tok.size(), tok) == 0;
  }
  void expect(const std::string& tok) {
    if (!eat(tok)) throw std::runtime_error("parse: expected '" + tok + "' at offset " + std::to_string(pos));
  }
  bool at_end() {
    skip_ws();
    return pos >= src.size();
  }
  std::optional<std::string> ident() {
    skip_ws();
    size_t p = pos;
    if (p >= src.size()) return std::nullopt;
    if (!std::isalpha(static_cast<unsigned char>(src[p])) && src[p] != '_') return std::nullopt;
    while (p < src.size() && (std::isalnum(static_cast<unsigned char>(src[p])) || src[p] == '_')) ++p;
    std::string s = src.substr(pos, p - pos);
    pos = p;
    return s;
  }
  std::optional<Int> number() {
    skip_ws();
    size_t p = pos;
    if (p >= src.size() || !std::isdigit(static_cast<unsigned char>(src[p]))) return std::nullopt;
    while (p < src.size() && std::isdigit(static_cast<unsigned char>(src[p]))) ++p;
    Int v(src.substr(pos, p - pos));
    pos = p;
    return v;
  }
};

// Terms are parsed into a small untyped tree first, then the cell sorts are
// resolved from context (a bare LI(x) is arith unless it is used as a loc).
struct P {
  Lexer lx;

  Id parse_guard_top() {
    Id g = parse_or();
    if (!lx.at_end()) throw std::runtime_error("parse: trailing input");
    return g;
  }

  Id parse_or() {
    std::vector<Id> gs{parse_and()};
    while (lx.eat("∨")) gs.push_back(parse_and());
    return g_or(std::move(gs));
  }
  Id parse_and() {
    std::vector<Id> gs{parse_gunary()};
    while (lx.eat("∧")) gs.push_back(parse_gunary());
    return g_and(std::move(gs));
  }
  Id parse_gunary() {
    if (lx.eat("¬")) {
      lx.expect("(");
      Id g = parse_or();
      lx.expect(")");
      return g_not(g);
    }
    if (lx.eat("⊤")) return top();
    if (lx.eat("⊥")) return bot();
    if (lx.peek("(")) {
      // either a parenthesized guard or a parenthesized term of a comparison
      size_t save = lx.pos;
      try {
        lx.eat("(");
        Id g = parse_or();
        lx.expect(")");
        return g;
      } catch (const std::exception&) {
        lx.pos = save;
      }
    }
    return parse_cmp();
  }
  Id parse_cmp() {
    Id l = parse_term_prec();
    if (lx.eat("≠")) return g_not(mk_eq(l, parse_term_prec()));
    if (lx.eat("=")) return mk_eq(l, parse_term_prec());
    if (lx.eat("<")) return g_lt(as_arith(l), as_arith(parse_term_prec()));
    if (lx.eat("≥")) {
      Id r = parse_term_prec();
      return g_not(g_lt(as_arith(l), as_arith(r)));
    }
    throw std::runtime_error("parse: comparison expected");
  }
  Id mk_eq(Id l, Id r) {
    if (sort_of(l) != sort_of(r)) {
      l = coerce(l, sort_of(r));
      r = coerce(r, sort_of(l));
    }
    return g_eq(l, r);
  }

  static bool is_bare_cell(Id t) {
    const Node& n = node(t);
    if (n.kind == Kind::Cell) return true;
    return n.kind == Kind::IntLin && n.num == 0 && n.lin.size() == 1 &&
           n.lin[0].second == 1 && kind(n.lin[0].first) == Kind::Cell;
  }

  // sort coercion for bare cells parsed with a provisional sort; arith
  // cells sit inside one-atom linear sums
  Id coerce(Id t, Sort want) {
    if (sort_of(t) == want) return t;
    const Node& n = node(t);
    if (n.kind == Kind::Cell) return mk_cell(n.a, n.b, want);
    if (n.kind == Kind::IntLin && want == Sort::Loc && n.num == 0 &&
        n.lin.size() == 1 && n.lin[0].second == 1) {
      const Node& atom = node(n.lin[0].first);
      if (atom.kind == Kind::Cell) return mk_cell(atom.a, atom.b, Sort::Loc);
    }
    return t;
  }
  Id as_arith(Id t) { return coerce(t, Sort::Arith); }

  Id parse_term_top() {
    Id t = parse_term_prec();
    if (!lx.at_end()) throw std::runtime_error("parse: trailing input");
    return t;
  }

  Id parse_term_prec() {
    Id t = parse_primary();
    while (true) {
      if (lx.eat("+")) {
        Id r = parse_primary();
        t = a_add(as_arith(t), as_arith(r));
      } else if (lx.peek("-") && !lx.peek("->")) {
        lx.eat("-");
        Id r = parse_primary();
        t = a_sub(as_arith(t), as_arith(r));
      } else {
        break;
      }
    }
    return t;
  }

  Id parse_primary() {
    if (lx.eat("-")) return a_neg(as_arith(parse_primary()));
    if (lx.eat("(")) {
      Id t = parse_term_prec();
      lx.expect(")");
      return postfix(t);
    }
    if (lx.peek("0x")) {
      lx.eat("0x");
      std::string digits;
      while (!lx.at_end() && std::isxdigit(static_cast<unsigned char>(lx.src[lx.pos])))
        digits += lx.src[lx.pos++];
      if (digits.empty()) throw std::runtime_error("parse: bad address");
      Int v = 0;
      for (char c : digits) {
        v *= 16;
        v += std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : std::tolower(c) - 'a' + 10;
      }
      uint64_t epoch = 0;
      if (lx.eat("@")) {
        auto e = lx.number();
        if (!e) throw std::runtime_error("parse: bad epoch");
        epoch = static_cast<uint64_t>(*e);
      }
      return postfix(mk_addr(v, epoch));
    }
    if (auto v = lx.number()) {
      if (lx.eat("*")) {
        Id t = parse_primary();
        return a_scale(*v, as_arith(t));
      }
      return mk_int(*v);
    }
    if (lx.eat("union(")) {
      std::vector<std::pair<Id, Id>> arms;
      if (!lx.peek(")")) {
        do {
          lx.expect("⟨");
          Id g = parse_or();
          lx.expect(",");
          Id v = parse_term_prec();
          lx.expect("⟩");
          arms.emplace_back(g, v);
        } while (lx.eat(","));
      }
      lx.expect(")");
      // a bare cell leaves the arm sort open; any decisive arm wins
      Sort s = Sort::Arith;
      for (auto& [g, v] : arms) {
        if (is_bare_cell(v)) continue;
        s = sort_of(v);
        break;
      }
      for (auto& [g, v] : arms) v = coerce(v, s);
      return postfix(mk_union(std::move(arms), s));
    }
    if (lx.eat("LI(")) {
      Id h = empty_heap();
      Id x = parse_term_prec();
      if (lx.eat(",")) {
        // LI(heap, x): only the unit-heap spelling is accepted here
        if (kind(x) != Kind::HeapDef) throw std::runtime_error("parse: LI source must be a heap");
        h = x;
        x = parse_term_prec();
      }
      lx.expect(")");
      // provisional sort; coerced by context
      return postfix(mk_cell(h, coerce(x, Sort::Loc), Sort::Arith));
    }
    if (lx.eat("ε")) return empty_heap();
    if (lx.eat("{")) return parse_heap_body();
    if (auto id = lx.ident()) {
      if (*id == "null") return mk_null();
      return postfix(mk_var(*id));
    }
    throw std::runtime_error("parse: unexpected input at offset " + std::to_string(lx.pos));
  }

  Id postfix(Id t) {
    while (lx.peek(".")) {
      size_t save = lx.pos;
      lx.eat(".");
      auto f = lx.ident();
      if (!f) { lx.pos = save; break; }
      t = mk_field(coerce(t, Sort::Loc), *f);
    }
    return t;
  }

  Id parse_heap_body() {
    std::vector<std::pair<Id, Id>> entries;
    if (!lx.peek("}")) {
      do {
        Id k = coerce(parse_term_prec(), Sort::Loc);
        lx.expect("↦");
        Id v = parse_term_prec();
        entries.emplace_back(k, v);
      } while (lx.eat(",") || lx.eat(";"));
    }
    lx.expect("}");
    return mk_heap_def(std::move(entries));
  }
};

}  // namespace

Id parse_term(const std::string& text) {
  P p{Lexer{text}};
  return p.parse_term_top();
}

Id parse_guard(const std::string& text) {
  P p{Lexer{text}};
  return p.parse_guard_top();
}

Id parse_heap(const std::string& text) {
  P p{Lexer{text}};
  Id t = p.parse_term_prec();
  if (!p.lx.at_end()) throw std::runtime_error("parse: trailing input");
  if (sort_of(t) != Sort::Heap) throw std::runtime_error("parse: heap expected");
  return t;
}

}  // namespace symheap
