#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace symheap {

using Int = boost::multiprecision::cpp_int;
using Id = uint32_t;
inline constexpr Id no_id = 0xffffffffu;

enum class Sort : uint8_t { Arith, Loc, Guard, Heap };

// Node kinds. Enum order doubles as the rank used by structural_compare,
// so guard literals sort before connectives and unions sort last.
enum class Kind : uint8_t {
  // arith terms
  IntLin,   // num + sum(lin[i].second * atom lin[i].first); atoms are arith cells
  // loc terms
  NullLoc,
  Addr,     // num = allocation id, bits = epoch, flag = allocated in a cyclic region
  Var,      // sym = program variable name (a variable cell)
  Field,    // a = base loc, sym = field name
  Cell,     // a = source heap, b = loc; LI(H, x)
  Union,    // arms = (guard, value); sort tells arith/loc
  // guards
  Top,
  Bot,
  EqA,      // a = linear term L; guard is L = 0
  LtA,      // a = linear term L; guard is L < 0
  EqL,      // a, b = loc terms, structurally ordered
  Not,      // a = literal guard
  And,      // kids sorted
  Or,       // kids sorted
  // heaps
  HeapDef,     // arms = (key, value) in insertion order; empty = the unit heap
  HeapCompose, // a, b
  HeapMerge,   // arms = (guard, heap)
  HeapWrite,   // a = heap, b = key, c via arms[0] = (key, value)... see ctor
  HeapRec,     // num = vertex, bits = visited-set bitmask over recursive-vertex ordinals
};

struct Node {
  Kind kind{};
  Sort sort{};
  Id a = no_id, b = no_id;
  Int num;
  uint64_t bits = 0;
  bool flag = false;
  std::string sym;
  std::vector<Id> kids;
  std::vector<std::pair<Id, Id>> arms;
  std::vector<std::pair<Id, Int>> lin;

  bool operator==(const Node& o) const;
};

class Arena {
 public:
  Id intern(Node n);
  const Node& node(Id id) const { return nodes_[id]; }
  size_t size() const { return nodes_.size(); }
  uint64_t fresh_epoch() { return ++epoch_; }

 private:
  std::deque<Node> nodes_;
  std::unordered_map<size_t, std::vector<Id>> buckets_;
  uint64_t epoch_ = 0;
  std::mutex mu_;
};

Arena& arena();
inline const Node& node(Id id) { return arena().node(id); }
inline Kind kind(Id id) { return node(id).kind; }
inline Sort sort_of(Id id) { return node(id).sort; }

// Total structural order, independent of interning history.
int structural_compare(Id x, Id y);
inline bool structural_less(Id x, Id y) { return structural_compare(x, y) < 0; }

// ---- guard constructors (always produce union-free normal forms) ----
Id top();
Id bot();
Id g_not(Id g);
Id g_and(std::vector<Id> gs);
Id g_or(std::vector<Id> gs);
inline Id g_and(Id a, Id b) { return g_and(std::vector<Id>{a, b}); }
inline Id g_or(Id a, Id b) { return g_or(std::vector<Id>{a, b}); }
Id g_eq(Id lhs, Id rhs);      // dispatches on operand sort
Id g_lt(Id lhs, Id rhs);      // arith only
bool implies(Id g1, Id g2);   // conservative syntactic/congruence check

// ---- arith constructors ----
Id mk_int(Int v);
Id mk_lin(std::vector<std::pair<Id, Int>> atoms, Int constant);
Id a_add(Id x, Id y);
Id a_sub(Id x, Id y);
Id a_neg(Id x);
Id a_scale(const Int& k, Id x);

// ---- loc constructors ----
Id mk_null();
Id mk_addr(Int alloc, uint64_t epoch = 0, bool in_cycle = false);
Id mk_var(const std::string& name);
Id mk_field(Id base, const std::string& field);

// ---- cells and unions ----
Id mk_cell(Id source_heap, Id loc, Sort value_sort);  // LI(H, x); expands definite sources
Id mk_union(std::vector<std::pair<Id, Id>> arms, Sort value_sort);
Id ite_term(Id cond, Id then_v, Id else_v);

// ---- raw heap node builders (no reduction applied; see genheap.hpp) ----
Id mk_heap_def(std::vector<std::pair<Id, Id>> entries);
Id empty_heap();  // the unit heap
Id mk_heap_compose_raw(Id h1, Id h2);
Id mk_heap_merge_raw(std::vector<std::pair<Id, Id>> arms);
Id mk_heap_write_raw(Id h, Id key, Id value);
Id mk_heap_rec(uint32_t vertex, uint64_t visited_bits);

bool is_definite(Id h);
bool is_empty_heap(Id h);

// true when the term/guard contains no cells and no unions
bool is_ground(Id t);
// every cell below t, including inside guard operands and cell keys
void collect_cells(Id t, std::vector<Id>& out);

// ---- printing ----
std::string print(Id id);                 // terms, guards, heaps
std::string print_heap_entries(Id heapdef);

// ---- parsing of the printed notation (test fixtures) ----
// Accepts terms, guards and definite-heap literals. Throws std::runtime_error.
Id parse_term(const std::string& text);
Id parse_guard(const std::string& text);
Id parse_heap(const std::string& text);

// ---- ground evaluation ----
struct EvalUnknown : std::runtime_error {
  explicit EvalUnknown(const std::string& m) : std::runtime_error(m) {}
};

struct GroundValue {
  Sort sort;  // Arith or Loc
  Int i;      // valid when Arith
  Id loc;     // ground loc node when Loc
  bool operator==(const GroundValue& o) const;
};
GroundValue gv_int(Int v);
GroundValue gv_loc(Id l);
std::string print_ground(const GroundValue& v);

class GroundStore {
 public:
  // Fixed assignments: key is a ground loc id (Var / Field over Addr).
  void set(Id ground_loc, GroundValue v) { env_[ground_loc] = v; }
  bool has(Id ground_loc) const { return env_.count(ground_loc) != 0; }
  const std::map<Id, GroundValue>& entries() const { return env_; }

  // Sampling mode: unseen cells get deterministic pseudo-random values.
  void enable_sampling(uint64_t seed, int int_span = 2, int addr_pool = 3);

  GroundValue lookup(Id ground_loc, Sort want);
  GroundValue lookup_opaque(Id heap, Id ground_loc, Sort want);

 private:
  GroundValue invent(Sort want);
  std::map<Id, GroundValue> env_;
  std::map<std::pair<Id, Id>, GroundValue> opaque_;
  bool sampling_ = false;
  uint64_t rng_ = 0;
  int int_span_ = 2;
  int addr_pool_ = 3;
};

GroundValue eval_ground(Id term, GroundStore& s);
bool eval_guard_ground(Id guard, GroundStore& s);

// ---- semantic equality ----
struct SemResult {
  enum class Verdict { Equal, NotEqual, Unknown } verdict;
  std::map<Id, GroundValue> witness;  // populated for NotEqual
};
SemResult sem_equal(Id a, Id b, int budget = 64);
SemResult sem_equal_guard(Id a, Id b, int budget = 64);

// Disjointness audit for a union: under n sampled stores, simultaneously
// true guards must protect equal values. Returns a description of the first
// violation, if any.
std::optional<std::string> audit_union(Id u, int samples = 1000, uint64_t seed = 1);

}  // namespace symheap
