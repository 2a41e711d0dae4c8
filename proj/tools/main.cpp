#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "symheap/heap.hpp"
#include "symheap/jsonio.hpp"

using namespace symheap;

namespace {

struct CommonOpts {
  std::string input_path;
  std::string oracle = "bounded:6";
  std::string format = "text";
  std::string epoch = "on";
  long fuel = 100000;
  int jobs = 1;
};

int parse_oracle_depth(const std::string& spec, std::string* dump_dir) {
  if (spec.rfind("bounded:", 0) == 0) return std::stoi(spec.substr(8));
  if (spec == "bounded") return 6;
  if (spec.rfind("smtlib-dump:", 0) == 0) {
    if (dump_dir) *dump_dir = spec.substr(12);
    return 6;
  }
  throw CLI::ValidationError("--oracle", "expected bounded:<depth> or smtlib-dump:<dir>");
}

std::map<Id, GroundValue> load_state(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_state_json(ss.str());
}

void apply_epoch_flag(const std::string& v) {
  if (v == "on") set_epoch_addresses(true);
  else if (v == "off") set_epoch_addresses(false);
  else throw CLI::ValidationError("--epoch-addresses", "expected on|off");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compositional symbolic execution for the heap demo language"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string file;
  std::string state_path;
  std::string out_path;
  int guard_index = -1;
  uint32_t from = 0;
  bool to_set = false;
  uint32_t to = 0;
  bool no_split = false;

  auto add_common = [&](CLI::App* cmd, bool needs_file = true) {
    if (needs_file) cmd->add_option("file", file, "demo-language source (.dl)")->required();
    cmd->add_option("--oracle", o.oracle, "bounded:<depth> | smtlib-dump:<dir>");
    cmd->add_option("--fuel", o.fuel, "step budget for runs and reductions");
    cmd->add_option("--format", o.format, "text | json");
    cmd->add_option("--epoch-addresses", o.epoch, "on | off");
    cmd->add_option("--jobs", o.jobs, "reserved; the current build runs serially");
  };

  CLI::App* cverify = app.add_subcommand("verify", "check fail/null-dereference reachability");
  add_common(cverify);

  CLI::App* crun = app.add_subcommand("run", "concrete execution on an input state");
  add_common(crun);
  crun->add_option("--input", state_path, "input state JSON");

  bool want_trace = false;
  CLI::App* creduce = app.add_subcommand("reduce", "reduce input-state ∘ program-effect");
  add_common(creduce);
  creduce->add_option("--input", state_path, "input state JSON");
  creduce->add_flag("--trace", want_trace, "include the rule trace (json format)");

  CLI::App* cdump = app.add_subcommand("dump-cfg", "control-flow graph as JSON");
  add_common(cdump);

  CLI::App* cpaths = app.add_subcommand("dump-paths", "path-set recurrences");
  add_common(cpaths);
  cpaths->add_option("--from", from, "source vertex (default: start)");
  CLI::Option* to_opt = cpaths->add_option("--to", to, "target vertex (default: first halt)");

  CLI::App* ctrans = app.add_subcommand("transpile", "encode a guard as a pure program");
  add_common(ctrans);
  ctrans->add_option("--guard", guard_index, "index of the engine-emitted guard; -1 for the whole effect");
  ctrans->add_option("--out", out_path, "write the printed program to this file");
  ctrans->add_flag("--no-sort-split", no_split, "untyped single-family output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    apply_epoch_flag(o.epoch);
    std::string dump_dir;
    int depth = parse_oracle_depth(o.oracle, &dump_dir);
    bool json_out = o.format == "json";

    if (cverify->parsed()) {
      Program p = parse_program_file(file);
      EngineOptions eo;
      eo.oracle_depth = depth;
      VerificationReport r = verify(p, eo);
      if (!dump_dir.empty()) {
        std::filesystem::create_directories(dump_dir);
        int i = 0;
        for (const ErrorEntry& e : r.errors) {
          SatQuery q;
          q.bodies = &r.bodies;
          q.guard = e.pc;
          q.depth = depth;
          std::ofstream out(dump_dir + "/guard" + std::to_string(i++) + ".smt2");
          out << emit_smtlib(q);
        }
      }
      std::cout << (json_out ? report_to_json(r, p) : report_to_text(r));
      if (json_out) std::cout << "\n";
      return r.safe() ? 0 : 1;
    }

    if (crun->parsed()) {
      Program p = parse_program_file(file);
      ConcreteState s0;
      s0.store = load_state(state_path);
      for (auto& [loc, v] : s0.store)
        if (v.sort == Sort::Loc && kind(v.loc) == Kind::Addr)
          if (node(v.loc).num >= s0.next_address) s0.next_address = node(v.loc).num + 1;
      RunResult r = concrete_run(p, std::move(s0), o.fuel);
      switch (r.kind) {
        case RunResult::K::Halted:
          std::cout << (json_out ? state_to_json(r.state.store) + "\n"
                                 : "halted\n" + state_to_json(r.state.store) + "\n");
          return 0;
        case RunResult::K::Failed:
          std::cout << "fail reached at instruction " << r.instruction << "\n";
          return 1;
        case RunResult::K::NullDeref:
          std::cout << "null dereference at instruction " << r.instruction << "\n";
          return 1;
        case RunResult::K::OutOfFuel:
          std::cout << "out of fuel\n";
          return 2;
      }
    }

    if (creduce->parsed()) {
      Program p = parse_program_file(file);
      EngineOptions eo;
      eo.oracle_depth = depth;
      VerificationReport r = verify(p, eo);
      std::vector<std::pair<Id, Id>> entries;
      for (auto& [loc, v] : load_state(state_path))
        entries.emplace_back(loc, v.sort == Sort::Arith ? mk_int(v.i) : v.loc);
      Id sigma0 = mk_heap_def(std::move(entries));
      Id h = mk_heap_compose_raw(sigma0, r.result_heap);
      SyntacticOracle so;
      ReduceOptions ro;
      ro.max_steps = static_cast<int>(o.fuel);
      ro.keep_trace = want_trace;
      ReduceResult rr = reduce(h, r.bodies, so, ro);
      if (json_out) {
        std::cout << "{ \"status\": \""
                  << (rr.status == ReduceResult::Status::Normal ? "normal" : "fuel")
                  << "\", \"steps\": " << rr.steps << ",\n\"heap\": \"" << print(rr.heap)
                  << "\",\n\"trace\": " << trace_to_json(rr.trace) << " }\n";
      } else {
        std::cout << "steps: " << rr.steps << "\n" << print(rr.heap) << "\n";
      }
      return rr.status == ReduceResult::Status::Normal ? 0 : 2;
    }

    if (cdump->parsed()) {
      Program p = parse_program_file(file);
      Cfg cfg = build_cfg(p);
      std::cout << cfg_to_json(cfg) << "\n";
      return 0;
    }

    if (cpaths->parsed()) {
      Program p = parse_program_file(file);
      Cfg cfg = build_cfg(p);
      if (!*to_opt) {
        for (uint32_t v = 0; v < cfg.vertex_count; ++v)
          if (p.statements[v].k == Statement::K::Halt) { to = v; break; }
      }
      PathDesc d = describe_paths(cfg, from == 0 ? cfg.start : from, to);
      if (json_out) {
        std::cout << paths_to_json(d, from == 0 ? cfg.start : from, to) << "\n";
      } else {
        std::cout << "Π(" << (from == 0 ? cfg.start : from) << ", " << to
                  << ", {}) = " << d.print_root() << "\n";
        for (auto& line : d.print_rec_defs()) std::cout << line << "\n";
      }
      return 0;
    }

    if (ctrans->parsed()) {
      Program p = parse_program_file(file);
      EngineOptions eo;
      eo.oracle_depth = depth;
      VerificationReport r = verify(p, eo);
      FuncIR prog;
      if (guard_index >= 0) {
        if (guard_index >= static_cast<int>(r.errors.size()))
          throw std::runtime_error("no emitted guard with index " +
                                   std::to_string(guard_index));
        prog = encode_guard_query(r.errors[guard_index].pc, r.bodies, !no_split);
      } else {
        prog = encode_effect(r.result_heap, r.bodies, !no_split);
      }
      check_order_discipline(prog);
      std::string text = json_out ? fir_to_json(prog) + "\n" : pretty_print(prog);
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << text;
      } else {
        std::cout << text;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
