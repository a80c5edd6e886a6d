#pragma once

#include <string>

#include "silkstage/stage.hpp"

namespace silkstage::stage {

// JSONL: one header line, one line per tick, then an optional error line.
// Doubles survive the round trip bit-exactly, so a loaded trace replays
// with zero mismatches.
std::string trace_to_jsonl(const Trace& trace);
Trace trace_from_jsonl(const std::string& text);

void save_trace(const std::string& path, const Trace& trace);
Trace load_trace(const std::string& path); // throws TraceParseError

} // namespace silkstage::stage
