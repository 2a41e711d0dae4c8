#pragma once

#include "symheap/term.hpp"

namespace symheap {

// Recursion symbols are identified by (vertex, visited-set) pairs; the table
// maps them to the generalized heap describing the cyclic region.
class BodyTable {
 public:
  void set(uint32_t vertex, uint64_t visited, Id body);
  std::optional<Id> get(uint32_t vertex, uint64_t visited) const;
  const std::vector<std::pair<std::pair<uint32_t, uint64_t>, Id>>& ordered() const {
    return ordered_;
  }

 private:
  std::map<std::pair<uint32_t, uint64_t>, Id> map_;
  std::vector<std::pair<std::pair<uint32_t, uint64_t>, Id>> ordered_;
};

struct Oracle {
  enum class V { Sat, Unsat, Unknown };
  virtual V sat(Id guard) const = 0;
  virtual ~Oracle() = default;
};

// Decides only syntactically trivial guards; reduction inside the bounded
// backend uses this to avoid recursion into the solver.
struct SyntacticOracle : Oracle {
  V sat(Id guard) const override;
};

// Smart constructors: unit laws and definite collapsing only. The Fig.-9
// style rewrite rules live in reduce_step and are never applied here, so
// tests can build explicit redexes with the *_raw builders.
Id compose_g(Id h1, Id h2);
Id write_g(Id h, Id key, Id value);
Id merge_g(std::vector<std::pair<Id, Id>> arms);
Id read_g(Id h, Id x, Sort vsort);

// Refinement with a generalized context: cells defer to LI(ctx ∘ src, x)
// when the composed source is not definite.
Id refine_gen(Id ctx, Id e);
Id refine_gen_guard(Id ctx, Id g);

struct TraceEntry {
  const char* rule;
  Id before;
  Id after;
};

struct StepOutcome {
  bool reduced = false;
  Id heap = no_id;
  const char* rule = nullptr;
};

StepOutcome reduce_step(Id h, const BodyTable& bodies, const Oracle& oracle);

struct ReduceOptions {
  int max_steps = 100000;
  int max_unfolds_per_rec = -1;  // negative: unbounded
  bool alt_strategy = false;     // outermost-first; used by the confluence suite
  bool keep_trace = false;
};

struct ReduceResult {
  enum class Status { Normal, Fuel, UnfoldBudget } status;
  Id heap;
  int steps = 0;
  std::vector<TraceEntry> trace;
};

ReduceResult reduce(Id h, const BodyTable& bodies, const Oracle& oracle,
                    ReduceOptions opts = {});

// Same engine applied to a term or guard: cell sources reduce in place and
// definite ones expand into reads.
ReduceResult reduce_any(Id x, const BodyTable& bodies, const Oracle& oracle,
                        ReduceOptions opts = {});

// true when the heap is a definite heap whose entries are all ground
bool is_ground_heap(Id h);

}  // namespace symheap
