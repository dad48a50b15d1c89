#pragma once

#include <filesystem>
#include <iosfwd>

#include "vecsim/scenario.hpp"

namespace vecsim {

// Line-oriented scenario trace: '#' header lines carrying the radio
// constants, server count and seed, then one CSV record per task. Numbers
// are written with 17 significant digits so a read-back is bit-exact.
void write_trace(std::ostream& out, const Scenario& scenario);
Scenario read_trace(std::istream& in);

void write_trace_file(const std::filesystem::path& path, const Scenario& scenario);
Scenario read_trace_file(const std::filesystem::path& path);

}  // namespace vecsim
