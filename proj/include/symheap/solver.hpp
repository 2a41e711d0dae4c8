#pragma once

#include "symheap/genheap.hpp"

namespace symheap {

struct SatQuery {
  const BodyTable* bodies = nullptr;
  Id context = no_id;  // generalized heap; defaults to the unit heap
  Id guard = no_id;
  int depth = 6;  // per-recursion-symbol unfold budget
};

struct SatVerdict {
  enum class K { Sat, Unsat, Unknown } kind;
  std::map<Id, GroundValue> witness;  // ground store for Sat
  std::string reason;                 // why Unknown
};

SatVerdict sat(const SatQuery& q);

// Quantifier-free SMT-LIB2 over integers plus an uninterpreted location
// sort. Residual recursion symbols after the depth-bounded unfolding make
// the script under-approximate; a leading comment says so.
std::string emit_smtlib(const SatQuery& q);

// Adapter used by the reduction rules and the execution engine. Holds a
// reference to a (growing) body table.
class BoundedOracle : public Oracle {
 public:
  BoundedOracle(const BodyTable& bodies, int depth)
      : bodies_(&bodies), depth_(depth) {}
  V sat(Id guard) const override;
  SatVerdict query(Id guard) const;
  int depth() const { return depth_; }

 private:
  const BodyTable* bodies_;
  int depth_;
};

// Enumeration of candidate ground input stores for a query; exposed for the
// acceptance harness, which reuses it to sweep program inputs.
struct InputProfile {
  std::vector<std::pair<std::string, Sort>> vars;    // name -> value sort
  std::vector<std::pair<std::string, Sort>> fields;  // field -> value sort
  std::vector<Int> int_candidates;
  int max_nodes = 3;
};

InputProfile profile_of(Id guard, const BodyTable& bodies);

// Calls fn for every candidate store; stops early when fn returns false.
void for_each_store(const InputProfile& prof,
                    const std::function<bool(GroundStore&)>& fn);

// Evaluates a guard under a ground store with depth-bounded reduction.
// nullopt means the store could not decide the guard (inexact frontier).
std::optional<bool> eval_guard_under(Id guard, const GroundStore& store,
                                     const BodyTable& bodies, int depth);

}  // namespace symheap
