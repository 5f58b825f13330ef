#include "sbst/baseline.hpp"

#include <chrono>

namespace sbst {

std::pair<CompactionResult, CompactionReport> compact_a0(
    const Program& p, const Netlist& n, const AdmissibleRegion& region,
    const std::vector<BasicBlock>& bbs, const SimOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    validate_control_flow(p);

    TraceReport golden = run(p, n, nullptr, opt.max_cycles);
    if (golden.terminated != Termination::Halt)
        throw CompactionError("program did not halt within the cycle limit");

    auto faults = enumerate_faults(n);
    FaultSimReport fsr_orig = simulate_all(p, n, faults, opt, &golden);
    size_t baseline_detected = fsr_orig.detections.size();

    std::vector<int> candidates = admissible_instruction_indices(bbs, region);
    std::vector<char> keep(p.instructions.size(), 1);
    int trials = 0;
    for (int idx : candidates) {
        keep[idx] = 0;
        ++trials;
        Program trial = subprogram(p, keep);
        TraceReport tr = run(trial, n, nullptr, opt.max_cycles);
        if (tr.terminated != Termination::Halt) {
            // treat a non-halting trial as coverage-reducing
            keep[idx] = 1;
            continue;
        }
        FaultSimReport fsr = simulate_all(trial, n, faults, opt, &tr);
        if (fsr.detections.size() < baseline_detected)
            keep[idx] = 1;  // reinsert
        else
            baseline_detected = fsr.detections.size();
    }

    Program compacted =
        parse_program(emit_program(subprogram(p, keep)), p.word_width, p.name);
    validate_control_flow(compacted);
    auto t1 = std::chrono::steady_clock::now();
    double seconds = std::chrono::duration<double>(t1 - t0).count();

    TraceReport golden_c = run(compacted, n, nullptr, opt.max_cycles);
    FaultSimReport fsr_c = simulate_all(compacted, n, faults, opt, &golden_c);

    CompactionResult result;
    result.compacted = compacted;
    for (const BasicBlock& bb : bbs) {
        bool any_kept = false;
        for (int i = bb.start; i <= bb.end; ++i)
            if (keep[i]) any_kept = true;
        if (!any_kept) result.removed_block_ids.insert(bb.id);
    }
    result.original_size_instr = p.size();
    result.compacted_size_instr = compacted.size();
    result.original_duration_cc = golden.duration_cc();
    result.compacted_duration_cc = golden_c.duration_cc();
    result.fault_sim_invocations = trials;
    result.fsr_original = fsr_orig;
    result.fsr_compacted = fsr_c;

    CompactionReport report = make_report(
        p.name, "a0", p.size(), compacted.size(), golden.duration_cc(),
        golden_c.duration_cc(), fsr_orig, fsr_c, trials, seconds);
    return {std::move(result), std::move(report)};
}

std::pair<CompactionResult, CompactionReport> compact_a0(
    const Program& p, const Netlist& n, const SimOptions& opt) {
    auto bbs = partition_basic_blocks(p);
    auto region = find_admissible_region(p, bbs);
    return compact_a0(p, n, region, bbs, opt);
}

}  // namespace sbst
