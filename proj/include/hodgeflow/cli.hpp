#pragma once

#include <string>
#include <vector>

namespace hodgeflow {

// Batch front end. Subcommands: density-table, classify, bore, minimize,
// stability, theorem-check. Reports go to stdout as JSON (CSV for
// density-table) or to --out; field dumps land in --dump-dir; --no-timestamp
// makes reports byte-reproducible.
//
// Exit codes: 0 success; 2 invalid flags, config, or model inputs; 3 the run
// finished but did not converge or the checked prediction did not hold;
// 1 internal error.
int run_cli(std::vector<std::string> args);
int run_cli(int argc, char** argv);

}  // namespace hodgeflow
