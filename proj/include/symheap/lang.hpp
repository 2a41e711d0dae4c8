#pragma once

#include <memory>

#include "symheap/term.hpp"

namespace symheap {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class K { IntLit, BoolLit, NullLit, Loc, Binop, Unop, New };
  K k{};
  Int ival;
  std::string ident;                 // Loc: base variable
  std::vector<std::string> fields;   // Loc: field chain
  std::string op;
  ExprPtr lhs, rhs;
  std::vector<std::pair<std::string, ExprPtr>> inits;  // New
  int line = 0, col = 0;
};

struct LocPath {
  std::string ident;
  std::vector<std::string> fields;
  int line = 0, col = 0;
};

struct Statement {
  enum class K { Assign, Goto, Fail, Halt };
  K k{};
  std::vector<std::string> labels;
  LocPath target;
  ExprPtr value;
  std::vector<std::pair<ExprPtr, std::string>> arms;
  int line = 0, col = 0;
};

struct Program {
  std::vector<Statement> statements;
  std::map<std::string, uint32_t> label_table;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& m, int l, int c)
      : std::runtime_error(m + " at " + std::to_string(l) + ":" + std::to_string(c)),
        line(l), col(c) {}
  int line, col;
};

Program parse_program(const std::string& source);
Program parse_program_file(const std::string& path);

// ------------------------------------------------------------------ CFG

struct Cfg {
  uint32_t start = 0;
  size_t vertex_count = 0;
  std::vector<std::pair<uint32_t, uint32_t>> edges;  // creation order, deduped
  std::vector<std::vector<uint32_t>> succ;
  std::vector<uint32_t> exits;
  // Reverse-postorder exit times: the start has time 0, and an edge (u, v)
  // closes a cycle exactly when time(u) >= time(v).
  std::vector<int> finish_time;
  std::vector<uint32_t> recursive_vertices;
  uint64_t rv_mask = 0;
  std::vector<std::string> warnings;

  bool is_recursive(uint32_t v) const { return v < 64 && (rv_mask >> v) & 1; }
};

Cfg build_cfg(const Program& p);

// Standalone recursive-vertex computation for arbitrary graphs (used by the
// path-description suites on random graphs).
struct Digraph {
  size_t n = 0;
  std::vector<std::vector<uint32_t>> succ;
  uint32_t start = 0;
};
std::pair<std::vector<int>, uint64_t> finish_times_and_rv(const Digraph& g);

// --------------------------------------------------- concrete execution

struct ConcreteState {
  uint32_t pc_index = 0;
  std::map<Id, GroundValue> store;  // ground loc id -> value
  Int next_address = 1;
};

struct RunResult {
  enum class K { Halted, Failed, NullDeref, OutOfFuel } kind{};
  ConcreteState state;
  uint32_t instruction = 0;
};

// Deterministic small-step run. Reads of locations absent from the store and
// dynamic type clashes are hard errors (std::runtime_error).
RunResult concrete_run(const Program& p, ConcreteState s0, long fuel = 100000);

}  // namespace symheap
