#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sbst/cfg.hpp"
#include "sbst/faultsim.hpp"

namespace sbst {

enum class InstrLabel { Essential, NotEssential };

struct LabeledProgram {
    Program program;
    std::vector<InstrLabel> labels;  // one per instruction index
};

struct CompactionResult {
    Program compacted;
    std::set<int> removed_block_ids;
    int original_size_instr = 0;
    int compacted_size_instr = 0;
    int original_duration_cc = 0;
    int compacted_duration_cc = 0;
    // Counts only the compaction-phase fault simulations. The proposed
    // method performs exactly one; the verification run is not included.
    int fault_sim_invocations = 0;
    FaultSimReport fsr_original;
    FaultSimReport fsr_compacted;
};

struct CompactionReport {
    std::string program;
    std::string algorithm;  // "proposed" or "a0"
    int size_instr_original = 0;
    int size_instr_compacted = 0;
    double size_reduction_pct = 0.0;
    int duration_cc_original = 0;
    int duration_cc_compacted = 0;
    double duration_reduction_pct = 0.0;
    int total_faults = 0;
    int detected_original = 0;
    int detected_compacted = 0;
    double fc_original_pct = 0.0;
    double fc_compacted_pct = 0.0;
    double diff_fc_pct = 0.0;  // == fc_compacted_pct - fc_original_pct
    int fault_sim_invocations = 0;
    double compaction_time_seconds = 0.0;
};

struct CompactionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 100 x (1 - compacted/original); 0 when original == 0.
double reduction_pct(long long original, long long compacted);

// Marks instruction pc(k) essential for every trace cycle k with a
// positive first-detection count. A detecting cycle whose decoded text
// disagrees with the program is a hard "inconsistent trace" error.
LabeledProgram label_instructions(const Program& p, const TraceReport& trace,
                                  const FaultSimReport& fsr);

// Drops every admissible block containing no essential instruction.
// Blocks outside the region survive verbatim; relative order preserved.
std::pair<Program, std::set<int>> reduce_program(
    const LabeledProgram& lp, const AdmissibleRegion& region,
    const std::vector<BasicBlock>& bbs);

// Copy of p restricted to instructions with keep[i] != 0. Labels on kept
// instructions are re-indexed; labels on removed instructions are dropped
// (it is an internal error if such a label is still referenced).
Program subprogram(const Program& p, const std::vector<char>& keep);

// Full pipeline: partition, admissible region, golden trace, one fault
// simulation, label, reduce, reassemble (emit + reparse), then a separate
// verification fault simulation for the report.
std::pair<CompactionResult, CompactionReport> compact(const Program& p,
                                                      const Netlist& n,
                                                      const SimOptions& opt);

// Fault-simulates both programs and fills a report; no compaction.
CompactionReport verify(const Program& original, const Program& compacted,
                        const Netlist& n, const SimOptions& opt);

// Report assembly shared by compact/verify/baseline.
CompactionReport make_report(std::string program, std::string algorithm,
                             int size_orig, int size_comp, int dur_orig,
                             int dur_comp, const FaultSimReport& fsr_orig,
                             const FaultSimReport& fsr_comp, int invocations,
                             double seconds);

std::string report_to_json(const CompactionReport& r);
CompactionReport report_from_json(const std::string& text);
std::string report_to_text(const CompactionReport& r);

}  // namespace sbst
