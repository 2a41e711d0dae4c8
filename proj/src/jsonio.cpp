#include "symheap/jsonio.hpp"

#include <json.hpp>

#include <limits>

namespace symheap {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

std::string cfg_to_json(const Cfg& cfg) {
  ordered j;
  std::vector<uint32_t> vertices;
  for (uint32_t v = 0; v < cfg.vertex_count; ++v) vertices.push_back(v);
  j["vertices"] = vertices;
  ordered edges = ordered::array();
  for (auto& [u, v] : cfg.edges) edges.push_back({u, v});
  j["edges"] = edges;
  j["start"] = cfg.start;
  j["rv"] = cfg.recursive_vertices;
  j["finish_times"] = cfg.finish_time;
  if (!cfg.warnings.empty()) j["warnings"] = cfg.warnings;
  return j.dump(2);
}

std::string heap_to_json(Id heapdef) {
  ordered j = ordered::array();
  for (auto& [k, v] : node(heapdef).arms) {
    ordered e;
    e["key"] = print(k);
    e["value"] = print(v);
    j.push_back(e);
  }
  return j.dump(2);
}

std::string report_to_json(const VerificationReport& r, const Program& p) {
  ordered j;
  j["safe"] = r.safe();
  ordered errs = ordered::array();
  for (const ErrorEntry& e : r.errors) {
    ordered o;
    o["kind"] = e.kind == ErrorEntry::Kind::Fail ? "fail" : "null-deref";
    o["instruction"] = e.instruction;
    o["line"] = e.line;
    o["pc_text"] = print(e.pc);
    if (e.oracle_unknown) o["oracle"] = "unknown";
    errs.push_back(o);
  }
  j["errors"] = errs;
  ordered bodies = ordered::array();
  for (auto& [key, body] : r.bodies.ordered()) {
    ordered b;
    b["vertex"] = key.first;
    std::vector<uint32_t> d;
    for (int i = 0; i < 64; ++i)
      if (key.second & (1ull << i)) d.push_back(i);
    b["D"] = d;
    b["heap_text"] = print(body);
    bodies.push_back(b);
  }
  j["bodies"] = bodies;
  if (r.result_heap != no_id) j["result_heap"] = print(r.result_heap);
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j.dump(2);
}

std::string report_to_text(const VerificationReport& r) {
  std::string out = r.safe() ? "safe\n" : "unsafe\n";
  for (const ErrorEntry& e : r.errors) {
    out += std::string("  error: ") +
           (e.kind == ErrorEntry::Kind::Fail ? "fail reachable" : "null dereference") +
           " at instruction " + std::to_string(e.instruction) + " (line " +
           std::to_string(e.line) + ") when " + print(e.pc);
    if (e.oracle_unknown) out += "  [oracle: unknown]";
    out += "\n";
  }
  for (const std::string& w : r.warnings) out += "  warning: " + w + "\n";
  return out;
}

std::string trace_to_json(const std::vector<TraceEntry>& trace) {
  ordered j = ordered::array();
  for (const TraceEntry& t : trace) {
    ordered e;
    e["rule"] = t.rule;
    e["before-hash"] = t.before;
    e["after-hash"] = t.after;
    j.push_back(e);
  }
  return j.dump(2);
}

std::string paths_to_json(const PathDesc& d, uint32_t from, uint32_t to) {
  ordered j;
  j["pi_equations"] =
      std::vector<std::string>{"Π(" + std::to_string(from) + ", " +
                               std::to_string(to) + ", {}) = " + d.print_root()};
  j["rec_defs"] = d.print_rec_defs();
  return j.dump(2);
}

namespace {

GroundValue value_from_json(const json& v) {
  if (v.is_number_integer()) return gv_int(Int(v.get<long long>()));
  if (v.is_boolean()) return gv_int(v.get<bool>() ? 1 : 0);
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s == "null") return gv_loc(mk_null());
    if (s.rfind("0x", 0) == 0) return gv_loc(parse_term(s));
    return gv_int(Int(s));
  }
  throw std::runtime_error("state json: unsupported value " + v.dump());
}

}  // namespace

namespace {

const char* fexpr_kind_name(FExpr::K k) {
  switch (k) {
    case FExpr::K::IntLit: return "int";
    case FExpr::K::NullLit: return "null";
    case FExpr::K::AddrLit: return "addr";
    case FExpr::K::VarLoc: return "var-loc";
    case FExpr::K::MkField: return "field-loc";
    case FExpr::K::Add: return "add";
    case FExpr::K::Sub: return "sub";
    case FExpr::K::Neg: return "neg";
    case FExpr::K::MulC: return "mul-const";
    case FExpr::K::BoolLit: return "bool";
    case FExpr::K::EqI: return "eq-int";
    case FExpr::K::LtI: return "lt-int";
    case FExpr::K::EqL: return "eq-loc";
    case FExpr::K::And: return "and";
    case FExpr::K::Or: return "or";
    case FExpr::K::Not: return "not";
    case FExpr::K::If: return "if";
    case FExpr::K::ParamX: return "param";
    case FExpr::K::CtxBase: return "ctx";
    case FExpr::K::CtxPartial: return "ctx-partial";
    case FExpr::K::CtxApply: return "ctx-apply";
    case FExpr::K::Call: return "call";
    case FExpr::K::Fail: return "fail";
  }
  return "?";
}

ordered fexpr_to_json(const FE& e) {
  ordered j;
  j["kind"] = fexpr_kind_name(e->k);
  if (e->k == FExpr::K::IntLit || e->k == FExpr::K::AddrLit ||
      e->k == FExpr::K::MulC)
    j["value"] = e->ival.str();
  if (e->k == FExpr::K::BoolLit) j["value"] = e->flag;
  if (!e->sym.empty()) j["name"] = e->sym;
  if (e->k == FExpr::K::CtxApply || e->k == FExpr::K::Call)
    j["sort"] = e->sort == Sort::Arith ? "int" : "ptr";
  if (!e->kids.empty()) {
    ordered ks = ordered::array();
    for (const FE& c : e->kids) ks.push_back(fexpr_to_json(c));
    j["args"] = ks;
  }
  return j;
}

}  // namespace

std::string fir_to_json(const FuncIR& p) {
  ordered j;
  j["sort_split"] = p.sort_split;
  j["main_is_assert"] = p.main_is_assert;
  j["main"] = fexpr_to_json(p.main);
  ordered defs = ordered::array();
  for (const FDef& d : p.defs) {
    ordered o;
    o["name"] = d.name;
    o["result"] = d.result == Sort::Arith ? "int" : "ptr";
    o["body"] = fexpr_to_json(d.body);
    defs.push_back(o);
  }
  j["defs"] = defs;
  return j.dump(2);
}

std::map<Id, GroundValue> parse_state_json(const std::string& text) {
  json j = json::parse(text);
  if (!j.is_object()) throw std::runtime_error("state json: object expected");
  std::map<Id, GroundValue> store;
  for (auto& [key, val] : j.items()) {
    Id loc = parse_term(key);
    if (sort_of(loc) != Sort::Loc)
      throw std::runtime_error("state json: key is not a location: " + key);
    store[loc] = value_from_json(val);
  }
  return store;
}

std::string state_to_json(const std::map<Id, GroundValue>& store) {
  ordered j;
  for (auto& [loc, v] : store) {
    if (v.sort == Sort::Arith) {
      // big integers fall back to strings
      if (v.i >= Int(std::numeric_limits<long long>::min()) &&
          v.i <= Int(std::numeric_limits<long long>::max()))
        j[print(loc)] = static_cast<long long>(v.i);
      else
        j[print(loc)] = v.i.str();
    } else {
      j[print(loc)] = print(v.loc);
    }
  }
  return j.dump(2);
}

}  // namespace symheap
