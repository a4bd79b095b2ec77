#pragma once

#include <string>
#include <vector>

namespace evoflow {

// Entry point of the command-line tool: ingest, train, sample, bench-det,
// eval, baselines. Returns the process exit status; errors are reported on
// stderr and yield a nonzero status.
int run_command(const std::vector<std::string>& args);

}  // namespace evoflow
