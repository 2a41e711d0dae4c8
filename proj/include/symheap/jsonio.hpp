#pragma once

#include <string>

#include "symheap/engine.hpp"
#include "symheap/pathdesc.hpp"
#include "symheap/transpile.hpp"

namespace symheap {

std::string cfg_to_json(const Cfg& cfg);
std::string heap_to_json(Id heapdef);
std::string report_to_json(const VerificationReport& r, const Program& p);
std::string report_to_text(const VerificationReport& r);
std::string trace_to_json(const std::vector<TraceEntry>& trace);
std::string paths_to_json(const PathDesc& d, uint32_t from, uint32_t to);

// input state files: {"p": "0x1", "0x1.Key": 10, "0x2.Next": "null"}
std::map<Id, GroundValue> parse_state_json(const std::string& text);
std::string state_to_json(const std::map<Id, GroundValue>& store);

}  // namespace symheap
