#pragma once

#include <random>
#include <string>

#include "symheap/heap.hpp"
#include "symheap/lang.hpp"

namespace symheap::testing {

inline std::string corpus(const std::string& name) {
  return std::string(CORPUS_DIR) + "/" + name;
}

// Random generator with a fixed variable/field schema so generated heaps are
// type-consistent: x, y hold integers; p, q hold pointers; Key is an integer
// field, Next a pointer field.
struct Gen {
  std::mt19937_64 rng;

  explicit Gen(uint64_t seed) : rng(seed) {}

  int pick(int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); }
  Int small_int() { return Int(pick(9) - 4); }

  Id int_var() { return mk_var(pick(2) ? "x" : "y"); }
  Id ptr_var() { return mk_var(pick(2) ? "p" : "q"); }

  // location terms denoting cells that hold integers / pointers
  Id int_key(int depth) {
    if (depth <= 0 || pick(3) == 0) return int_var();
    return mk_field(base_loc(depth - 1), "Key");
  }
  Id ptr_key(int depth) {
    if (depth <= 0 || pick(3) == 0) return ptr_var();
    return mk_field(base_loc(depth - 1), "Next");
  }
  // a location value usable as the base of a field access
  Id base_loc(int depth) {
    switch (pick(3)) {
      case 0: return mk_addr(Int(1 + pick(3)));
      case 1: return mk_cell(empty_heap(), ptr_var(), Sort::Loc);
      default:
        if (depth > 0) return mk_cell(empty_heap(), ptr_key(depth - 1), Sort::Loc);
        return mk_cell(empty_heap(), ptr_var(), Sort::Loc);
    }
  }

  Id arith(int depth) {
    switch (depth <= 0 ? pick(2) : pick(5)) {
      case 0: return mk_int(small_int());
      case 1: return mk_cell(empty_heap(), int_key(depth), Sort::Arith);
      case 2: return a_add(arith(depth - 1), arith(depth - 1));
      case 3: return a_neg(arith(depth - 1));
      default: return ite_term(guard(depth - 1), arith(depth - 1), arith(depth - 1));
    }
  }

  Id loc_value(int depth) {
    switch (depth <= 0 ? pick(3) : pick(5)) {
      case 0: return mk_null();
      case 1: return mk_addr(Int(1 + pick(3)));
      case 2: return mk_cell(empty_heap(), ptr_key(std::max(0, depth - 1)), Sort::Loc);
      case 3: return ite_term(guard(depth - 1), loc_value(depth - 1), loc_value(depth - 1));
      default: return mk_cell(empty_heap(), ptr_var(), Sort::Loc);
    }
  }

  Id guard(int depth) {
    switch (depth <= 0 ? pick(3) : pick(6)) {
      case 0: return g_eq(arith(0), arith(0));
      case 1: return g_lt(arith(0), arith(0));
      case 2: return g_eq(loc_value(0), loc_value(0));
      case 3: return g_not(guard(depth - 1));
      case 4: return g_and(guard(depth - 1), guard(depth - 1));
      default: return g_or(guard(depth - 1), guard(depth - 1));
    }
  }

  Id term(int depth) { return pick(2) ? arith(depth) : loc_value(depth); }

  // definite heaps built by writes, so the heap invariant holds by
  // construction
  Id heap(int entries, int depth = 2) {
    Id h = empty_heap();
    for (int i = 0; i < entries; ++i) {
      if (pick(2)) {
        Id key = pick(2) ? int_var() : int_key(depth);
        h = heap_write(h, key, arith(depth));
      } else {
        Id key = pick(2) ? ptr_var() : ptr_key(depth);
        h = heap_write(h, key, loc_value(depth));
      }
    }
    return h;
  }

  // pairwise-disjoint guard list of the given size
  std::vector<Id> disjoint_guards(int n, int depth = 1) {
    std::vector<Id> gs;
    Id rest = top();
    for (int i = 0; i + 1 < n; ++i) {
      Id g = guard(depth);
      gs.push_back(g_and(rest, g));
      rest = g_and(rest, g_not(g));
    }
    gs.push_back(rest);
    return gs;
  }

  GroundStore store(uint64_t salt, int span = 2, int pool = 2) {
    GroundStore s;
    s.enable_sampling(rng() ^ salt, span, pool);
    return s;
  }
};

}  // namespace symheap::testing
