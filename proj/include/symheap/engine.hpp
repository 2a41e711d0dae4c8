#pragma once

#include "symheap/genheap.hpp"
#include "symheap/lang.hpp"
#include "symheap/solver.hpp"

namespace symheap {

// Value sorts of program variables and object fields, unified from every
// use site. Conflicting uses are type clashes and rejected up front.
struct SortTable {
  std::map<std::string, Sort> vars;
  std::map<std::string, Sort> fields;
  Sort var_sort(const std::string& n) const;
  Sort field_sort(const std::string& n) const;
};
SortTable infer_sorts(const Program& p);

struct ErrorEntry {
  enum class Kind { Fail, NullDeref } kind;
  Id pc;
  uint32_t instruction;
  int line;
  bool oracle_unknown;  // kept because the oracle could not refute it
};

struct VerificationReport {
  std::vector<ErrorEntry> errors;
  Id result_heap = no_id;
  BodyTable bodies;
  std::vector<std::pair<std::pair<uint32_t, uint64_t>, int>> body_constructions;
  std::vector<std::string> warnings;
  bool safe() const { return errors.empty(); }
};

struct EngineOptions {
  int oracle_depth = 6;
  Int alloc_base = 1;  // first address handed out by `new`
};

class Engine {
 public:
  Engine(const Program& p, const Cfg& cfg, EngineOptions opts = {});

  // Runs the compositional walk from the start vertex and fills the report.
  VerificationReport run();

  // Region walk: from the start vertex it yields the final heap, from a
  // recursive vertex the body of the recursion symbol.
  Id exec_region(uint32_t l0, uint64_t d0);

  // Symbolic evaluation of a source expression in state (sigma, pc).
  // Returns the updated heap and the value term.
  std::pair<Id, Id> eval_expr(Id sigma, Id pc, const Expr& e, uint32_t instr,
                              bool emit_errors, bool in_cycle);

  const BodyTable& bodies() const { return bodies_; }
  const SortTable& sorts() const { return sorts_; }
  VerificationReport& report() { return report_; }

 private:
  void record_error(ErrorEntry::Kind k, Id pc, uint32_t instr, int line);
  void null_check(Id base, Id pc, uint32_t instr, bool emit);
  Id truthy(Id value) const;

  const Program& p_;
  const Cfg& cfg_;
  EngineOptions opts_;
  SortTable sorts_;
  BodyTable bodies_;
  BoundedOracle oracle_;
  VerificationReport report_;
  Int next_alloc_;
};

VerificationReport verify(const Program& p, EngineOptions opts = {});

}  // namespace symheap
