#pragma once

#include "sbst/compactor.hpp"

namespace sbst {

// Compaction by instruction removal: walk the admissible instructions in
// program order, tentatively delete one, fault-simulate the trial, and
// reinsert when the detected-fault count drops. Detected counts are
// compared exactly (not as rounded percentages). fault_sim_invocations in
// the result counts one per trial; the setup and final verification
// simulations are not trials.
std::pair<CompactionResult, CompactionReport> compact_a0(
    const Program& p, const Netlist& n, const AdmissibleRegion& region,
    const std::vector<BasicBlock>& bbs, const SimOptions& opt);

// Convenience overload that computes the region itself.
std::pair<CompactionResult, CompactionReport> compact_a0(const Program& p,
                                                         const Netlist& n,
                                                         const SimOptions& opt);

}  // namespace sbst
