#pragma once

#include <memory>

#include "symheap/genheap.hpp"

namespace symheap {

// Second-order functional IR: definitions take first-order context
// functions and a location; contexts are either the input oracle or partial
// applications of other find functions.
struct FExpr;
using FE = std::shared_ptr<const FExpr>;

struct FExpr {
  enum class K {
    IntLit,     // ival
    NullLit,
    AddrLit,    // ival, bits = epoch
    VarLoc,     // sym: a named program location passed as a plain value
    MkField,    // kids[0] = base address expr, sym = field
    Add, Sub, Neg, MulC,      // MulC: ival * kids[0]
    BoolLit,    // flag
    EqI, LtI, EqL, And, Or, Not,
    If,         // kids[0] ? kids[1] : kids[2]
    ParamX,     // the location parameter of the enclosing definition
    CtxBase,    // the context-function parameter / the input oracle in main
    CtxPartial, // find_<heap> partially applied to kids[0] (a context)
    CtxApply,   // kids[0] = context, kids[1] = location; sort = result sort
    Call,       // sym = function base name; kids[0] = context, kids[1] = loc
    Fail,       // unreachable merge default / undefined behaviour
  };
  K k{};
  Int ival;
  uint64_t bits = 0;
  bool flag = false;
  std::string sym;
  Sort sort = Sort::Arith;
  Id heap = no_id;  // CtxPartial: which find family the closure wraps
  std::vector<FE> kids;
};

struct FDef {
  std::string name;  // base name; printing appends _int/_ptr when splitting
  Sort result;
  FE body;
};

struct FuncIR {
  std::vector<FDef> defs;
  FE main;
  bool main_is_assert = false;
  bool sort_split = true;
};

class EncodingEnv {
 public:
  explicit EncodingEnv(const BodyTable& bodies, bool sort_split = true)
      : bodies_(&bodies), sort_split_(sort_split) {}

  // base name of the find function specialized to this heap (and sort)
  std::string find_fn(Id heap, Sort s);
  FE encode_term(Id t, FE ctx);
  FE encode_guard(Id g, FE ctx);

  FuncIR finish(FE main, bool is_assert);
  bool has_def(const std::string& base_name_with_sort) const;

 private:
  FE inline_find(Id heap, Sort s);
  std::string base_name(Id heap);

  const BodyTable* bodies_;
  bool sort_split_;
  std::map<std::pair<Id, Sort>, std::string> memo_;
  std::map<Id, std::string> base_names_;
  std::vector<FDef> defs_;
  int counter_ = 0;
};

// Encodes "is guard g reachable-satisfiable" as assert(not g).
FuncIR encode_guard_query(Id guard, const BodyTable& bodies, bool sort_split = true);
// Encodes the value of location x in the effect described by heap.
FuncIR encode_value_query(Id heap, Id x, Sort s, const BodyTable& bodies,
                          bool sort_split = true);
// Encodes the whole find family of a heap; main is a trivially safe assert.
FuncIR encode_effect(Id heap, const BodyTable& bodies, bool sort_split = true);

// ------------------------------------------------------------ interpreter

struct FContext {
  // the input oracle: ground loc -> value; absent cells are hard errors
  std::map<Id, GroundValue> table;
};

struct FirOutcome {
  enum class K { SafePass, AssertFailed, Value, OutOfFuel } k;
  GroundValue value{Sort::Arith, 0, no_id};
};

struct FirError : std::runtime_error {
  explicit FirError(const std::string& m) : std::runtime_error(m) {}
};

FirOutcome fir_interpret(const FuncIR& p, const FContext& inputs, long fuel = 100000);

// All context parameter positions receive first-order values; throws on a
// violation.
void check_order_discipline(const FuncIR& p);
// Every call to a function in the same recursive component sits in tail
// position.
bool tail_recursive_only(const FuncIR& p);

std::string pretty_print(const FuncIR& p);
std::string fir_to_json(const FuncIR& p);

}  // namespace symheap
