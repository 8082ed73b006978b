#pragma once

#include <string>
#include <vector>

#include "fflab/properties.hpp"
#include "fflab/simnet.hpp"

namespace fflab {

// Line-delimited canonical text: `section|fields...` with integers only and a
// fixed field order, byte-identical for identical runs.
std::string serialize_trace(const Trace& trace);

std::string serialize_verdicts(const std::vector<Verdict>& verdicts);
std::string serialize_metrics(const LatencyReport& report);

void write_file(const std::string& path, const std::string& content);

}  // namespace fflab
