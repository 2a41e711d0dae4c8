#pragma once

#include "symheap/term.hpp"

namespace symheap {

const std::vector<std::pair<Id, Id>>& heap_entries(Id heapdef);

// Reading a location: matches x against every key of the heap, with a lazy
// cell of the unit heap as the fallback arm. vsort selects which entries can
// type-correctly match.
Id heap_read(Id h, Id x, Sort vsort);

// Refinement fills lazy cells of an expression with values from a context
// heap. One Refiner per composition pass, so fresh address epochs stay
// consistent across all occurrences of the same address.
class Refiner {
 public:
  explicit Refiner(Id ctx_heap) : ctx_(ctx_heap) {}
  Id term(Id e);
  Id guard(Id g);

 private:
  Id ctx_;
  std::map<Id, Id> memo_;
};

Id refine(Id ctx_heap, Id e);
Id refine_guard(Id ctx_heap, Id g);

Id heap_compose(Id h1, Id h2);
Id heap_find(Id h, Id x, Id ctx, Id dflt, Sort vsort);
Id heap_merge(const std::vector<std::pair<Id, Id>>& arms);
Id heap_write(Id h, Id key, Id value);

// Test oracles.
SemResult heap_read_equiv(Id h1, Id h2, int budget = 64);
std::optional<std::string> check_heap_invariant(Id h, int samples = 200);

// When enabled (default), refining an address allocated inside a cyclic
// region yields a fresh epoch, one per refinement pass.
void set_epoch_addresses(bool on);
bool epoch_addresses();

}  // namespace symheap
