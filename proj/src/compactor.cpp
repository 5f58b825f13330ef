#include "sbst/compactor.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>

namespace sbst {

namespace {

std::string format2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

double reduction_pct(long long original, long long compacted) {
    if (original == 0) return 0.0;
    return 100.0 * (1.0 - static_cast<double>(compacted) /
                              static_cast<double>(original));
}

LabeledProgram label_instructions(const Program& p, const TraceReport& trace,
                                  const FaultSimReport& fsr) {
    LabeledProgram lp{p, std::vector<InstrLabel>(p.instructions.size(),
                                                 InstrLabel::NotEssential)};
    for (const auto& [cc, count] : fsr.per_cycle) {
        if (count <= 0) continue;
        if (cc < 1 || cc > trace.duration_cc())
            throw CompactionError("inconsistent trace: detecting cycle " +
                                  std::to_string(cc) +
                                  " is outside the trace");
        const TraceRecord& rec = trace.records[cc - 1];
        if (rec.pc < 0 || rec.pc >= p.size() ||
            canonical_text(p.instructions[rec.pc]) != rec.di)
            throw CompactionError(
                "inconsistent trace: decoded instruction at cc " +
                std::to_string(cc) + " does not match the program");
        lp.labels[rec.pc] = InstrLabel::Essential;
    }
    return lp;
}

Program subprogram(const Program& p, const std::vector<char>& keep) {
    if (keep.size() != p.instructions.size())
        throw CompactionError("keep mask size mismatch");
    Program out;
    out.name = p.name;
    out.word_width = p.word_width;

    std::set<std::string> referenced;
    std::vector<int> kept_before(p.size() + 1, 0);
    for (int i = 0; i < p.size(); ++i) {
        kept_before[i + 1] = kept_before[i] + (keep[i] ? 1 : 0);
        if (keep[i]) {
            out.instructions.push_back(p.instructions[i]);
            if (!p.instructions[i].target.empty())
                referenced.insert(p.instructions[i].target);
        }
    }
    for (const auto& [name, idx] : p.labels) {
        if (keep[idx]) {
            out.labels[name] = kept_before[idx];
        } else if (referenced.count(name)) {
            throw CompactionError(
                "internal: removed instruction carries referenced label '" +
                name + "'");
        }
    }
    return out;
}

std::pair<Program, std::set<int>> reduce_program(
    const LabeledProgram& lp, const AdmissibleRegion& region,
    const std::vector<BasicBlock>& bbs) {
    const Program& p = lp.program;
    if (lp.labels.size() != p.instructions.size())
        throw CompactionError("label vector size mismatch");

    std::set<int> removed;
    std::vector<char> keep(p.instructions.size(), 1);
    for (const BasicBlock& bb : bbs) {
        if (!region.contains(bb.id)) continue;
        bool essential = false;
        for (int i = bb.start; i <= bb.end; ++i)
            if (lp.labels[i] == InstrLabel::Essential) {
                essential = true;
                break;
            }
        if (essential) continue;
        if (bb.is_branch_target)
            throw CompactionError(
                "internal: admissible block is a branch target");
        removed.insert(bb.id);
        for (int i = bb.start; i <= bb.end; ++i) keep[i] = 0;
    }
    return {subprogram(p, keep), removed};
}

std::pair<CompactionResult, CompactionReport> compact(const Program& p,
                                                      const Netlist& n,
                                                      const SimOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    validate_control_flow(p);
    auto bbs = partition_basic_blocks(p);
    auto region = find_admissible_region(p, bbs);

    TraceReport golden = run(p, n, nullptr, opt.max_cycles);
    if (golden.terminated != Termination::Halt)
        throw CompactionError("program did not halt within the cycle limit");

    auto faults = enumerate_faults(n);
    int invocations = 0;
    FaultSimReport fsr = simulate_all(p, n, faults, opt, &golden,
                                      &invocations);
    LabeledProgram lp = label_instructions(p, golden, fsr);
    auto [reduced, removed] = reduce_program(lp, region, bbs);

    // reassemble through text so the artifact is exactly what we measured
    Program compacted =
        parse_program(emit_program(reduced), p.word_width, p.name);
    validate_control_flow(compacted);
    auto t1 = std::chrono::steady_clock::now();
    double seconds = std::chrono::duration<double>(t1 - t0).count();

    TraceReport golden_c = run(compacted, n, nullptr, opt.max_cycles);
    if (golden_c.terminated != Termination::Halt)
        throw CompactionError("compacted program did not halt");
    FaultSimReport fsr_c = simulate_all(compacted, n, faults, opt, &golden_c);

    CompactionResult result;
    result.compacted = compacted;
    result.removed_block_ids = removed;
    result.original_size_instr = p.size();
    result.compacted_size_instr = compacted.size();
    result.original_duration_cc = golden.duration_cc();
    result.compacted_duration_cc = golden_c.duration_cc();
    result.fault_sim_invocations = invocations;
    result.fsr_original = fsr;
    result.fsr_compacted = fsr_c;

    CompactionReport report = make_report(
        p.name, "proposed", p.size(), compacted.size(), golden.duration_cc(),
        golden_c.duration_cc(), fsr, fsr_c, invocations, seconds);
    return {std::move(result), std::move(report)};
}

CompactionReport verify(const Program& original, const Program& compacted,
                        const Netlist& n, const SimOptions& opt) {
    validate_control_flow(original);
    validate_control_flow(compacted);
    TraceReport g_o = run(original, n, nullptr, opt.max_cycles);
    if (g_o.terminated != Termination::Halt)
        throw CompactionError("original program did not halt");
    TraceReport g_c = run(compacted, n, nullptr, opt.max_cycles);
    if (g_c.terminated != Termination::Halt)
        throw CompactionError("compacted program did not halt");

    auto faults = enumerate_faults(n);
    FaultSimReport fsr_o = simulate_all(original, n, faults, opt, &g_o);
    FaultSimReport fsr_c = simulate_all(compacted, n, faults, opt, &g_c);
    return make_report(original.name, "verify", original.size(),
                       compacted.size(), g_o.duration_cc(), g_c.duration_cc(),
                       fsr_o, fsr_c, 0, 0.0);
}

CompactionReport make_report(std::string program, std::string algorithm,
                             int size_orig, int size_comp, int dur_orig,
                             int dur_comp, const FaultSimReport& fsr_orig,
                             const FaultSimReport& fsr_comp, int invocations,
                             double seconds) {
    CompactionReport r;
    r.program = std::move(program);
    r.algorithm = std::move(algorithm);
    r.size_instr_original = size_orig;
    r.size_instr_compacted = size_comp;
    r.size_reduction_pct = reduction_pct(size_orig, size_comp);
    r.duration_cc_original = dur_orig;
    r.duration_cc_compacted = dur_comp;
    r.duration_reduction_pct = reduction_pct(dur_orig, dur_comp);
    r.total_faults = fsr_orig.total_faults;
    r.detected_original = static_cast<int>(fsr_orig.detections.size());
    r.detected_compacted = static_cast<int>(fsr_comp.detections.size());
    r.fc_original_pct = fault_coverage(fsr_orig);
    r.fc_compacted_pct = fault_coverage(fsr_comp);
    r.diff_fc_pct = r.fc_compacted_pct - r.fc_original_pct;
    r.fault_sim_invocations = invocations;
    r.compaction_time_seconds = seconds;
    return r;
}

std::string report_to_json(const CompactionReport& r) {
    nlohmann::ordered_json j;
    j["program"] = r.program;
    j["algorithm"] = r.algorithm;
    j["size_instr_original"] = r.size_instr_original;
    j["size_instr_compacted"] = r.size_instr_compacted;
    j["size_reduction_pct"] = r.size_reduction_pct;
    j["duration_cc_original"] = r.duration_cc_original;
    j["duration_cc_compacted"] = r.duration_cc_compacted;
    j["duration_reduction_pct"] = r.duration_reduction_pct;
    j["total_faults"] = r.total_faults;
    j["detected_original"] = r.detected_original;
    j["detected_compacted"] = r.detected_compacted;
    j["fc_original_pct"] = r.fc_original_pct;
    j["fc_compacted_pct"] = r.fc_compacted_pct;
    j["diff_fc_pct"] = r.diff_fc_pct;
    j["fault_sim_invocations"] = r.fault_sim_invocations;
    // timing lives under meta so scientific fields stay byte-reproducible
    j["meta"] = {{"compaction_time_seconds", r.compaction_time_seconds}};
    return j.dump(2) + "\n";
}

CompactionReport report_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CompactionReport r;
    r.program = j.at("program").get<std::string>();
    r.algorithm = j.at("algorithm").get<std::string>();
    r.size_instr_original = j.at("size_instr_original").get<int>();
    r.size_instr_compacted = j.at("size_instr_compacted").get<int>();
    r.size_reduction_pct = j.at("size_reduction_pct").get<double>();
    r.duration_cc_original = j.at("duration_cc_original").get<int>();
    r.duration_cc_compacted = j.at("duration_cc_compacted").get<int>();
    r.duration_reduction_pct = j.at("duration_reduction_pct").get<double>();
    r.total_faults = j.at("total_faults").get<int>();
    r.detected_original = j.at("detected_original").get<int>();
    r.detected_compacted = j.at("detected_compacted").get<int>();
    r.fc_original_pct = j.at("fc_original_pct").get<double>();
    r.fc_compacted_pct = j.at("fc_compacted_pct").get<double>();
    r.diff_fc_pct = j.at("diff_fc_pct").get<double>();
    r.fault_sim_invocations = j.at("fault_sim_invocations").get<int>();
    if (j.contains("meta") && j["meta"].contains("compaction_time_seconds"))
        r.compaction_time_seconds =
            j["meta"]["compaction_time_seconds"].get<double>();
    return r;
}

std::string report_to_text(const CompactionReport& r) {
    char row[256];
    std::snprintf(row, sizeof(row),
                  "%10d | %6.2f | %11d | %10.2f | %+9.2f | %13.2f s",
                  r.size_instr_compacted, r.size_reduction_pct,
                  r.duration_cc_compacted, r.duration_reduction_pct,
                  r.diff_fc_pct, r.compaction_time_seconds);
    std::ostringstream out;
    out << "program: " << r.program << "  (algorithm: " << r.algorithm
        << ", fault_sim_invocations: " << r.fault_sim_invocations
        << ", FC " << format2(r.fc_original_pct) << "% -> "
        << format2(r.fc_compacted_pct) << "%)\n"
        << "Size instr | Size % | Duration cc | Duration % | Diff FC % | "
           "Compaction time\n"
        << row << "\n";
    return out.str();
}

}  // namespace sbst
