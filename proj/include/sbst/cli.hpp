#pragma once

namespace sbst {

// Entry point for the sbstc command-line tool. Returns the process exit
// code: 0 success, 1 usage error, 2 domain error (bad program/netlist,
// non-halting run, unwritable output).
int run_cli(int argc, const char* const* argv);

}  // namespace sbst
