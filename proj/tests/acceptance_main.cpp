// Acceptance harness: eight end-to-end criteria, one pass/fail line each.
// Exit code 0 iff every criterion holds. Tolerances and runtime budgets are
// pinned here, not configurable.
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sbst/baseline.hpp"
#include "sbst/compactor.hpp"
#include "sbst/tpgen.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace sbst;
using testutil::random_halting_program;

namespace {

int g_workers = 1;

SimOptions fast_opts() {
    SimOptions opt;
    opt.workers = g_workers;
    return opt;
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void note(const std::string& s) {
        if (!detail.empty()) detail += "; ";
        detail += s;
    }
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            note("FAIL " + what);
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
}

std::string fmt(double v, int prec = 2) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

const char* kSingleAnd =
    "input a0 b0\n"
    "output r0\n"
    "gate g1 AND r0 a0 b0\n";

const char* kFullAdder =
    "input a0 a1 b0\n"
    "output r0 r1\n"
    "gate g1 XOR t a0 b0\n"
    "gate g2 XOR r0 t a1\n"
    "gate g3 AND u a0 b0\n"
    "gate g4 AND v t a1\n"
    "gate g5 OR r1 u v\n";

// One unit op per input pattern, each stored to its own address.
Program exhaustive_unit_program(const Netlist& n, int word_width,
                                const std::string& name) {
    const int a_span = 1 << n.a_bits;
    const int b_span = 1 << n.b_bits;
    std::ostringstream src;
    int addr = 0;
    for (int a = 0; a < a_span; ++a)
        for (int b = 0; b < b_span; ++b) {
            src << "li r1, " << a << "\n";
            src << "li r2, " << b << "\n";
            src << "unit r3, r1, r2\n";
            src << "sw r3, " << addr++ << "(r0)\n";
        }
    src << "halt\n";
    return parse_program(src.str(), word_width, name);
}

// Branchy unit-mode program: forward branches only, so it always halts.
Program random_unit_program(SplitMix64& rng, int word_width,
                            const std::string& name) {
    const int body = 6 + static_cast<int>(rng.below(14));
    std::vector<std::string> label_at(body + 1);
    int next = 0;
    for (int i = 1; i <= body; ++i)
        if (rng.below(4) == 0) label_at[i] = "m" + std::to_string(next++);

    std::ostringstream src;
    const std::uint64_t span = std::uint64_t{1} << word_width;
    for (int i = 0; i < body; ++i) {
        if (!label_at[i].empty()) src << label_at[i] << ":\n";
        auto forward = [&]() -> std::string {
            for (int j = i + 1; j <= body; ++j)
                if (!label_at[j].empty()) return label_at[j];
            return "";
        };
        switch (rng.below(10)) {
            case 0:
            case 1:
            case 2:
                src << "li r" << 1 + rng.below(3) << ", " << rng.below(span)
                    << "\n";
                break;
            case 3:
            case 4:
            case 5:
                src << "unit r" << 1 + rng.below(3) << ", r" << rng.below(4)
                    << ", r" << rng.below(4) << "\n";
                break;
            case 6:
                src << "sw r" << rng.below(4) << ", " << rng.below(16)
                    << "(r0)\n";
                break;
            case 7:
                src << "lw r" << 1 + rng.below(3) << ", " << rng.below(16)
                    << "(r0)\n";
                break;
            case 8: {
                std::string t = forward();
                if (t.empty())
                    src << "nop\n";
                else if (rng.below(3) == 0)
                    src << "j " << t << "\n";
                else
                    src << (rng.below(2) == 0 ? "beq" : "bne") << " r"
                        << rng.below(4) << ", r" << rng.below(4) << ", " << t
                        << "\n";
                break;
            }
            default:
                src << "nop\n";
                break;
        }
    }
    if (!label_at[body].empty()) src << label_at[body] << ":\n";
    src << "halt\n";
    return parse_program(src.str(), word_width, name);
}

std::set<int> detected_ids(const FaultSimReport& fsr) {
    std::set<int> ids;
    for (const auto& [id, cc] : fsr.detections) ids.insert(id);
    return ids;
}

int admissible_count(const Program& p) {
    auto bbs = partition_basic_blocks(p);
    auto region = find_admissible_region(p, bbs);
    return static_cast<int>(admissible_instruction_indices(bbs, region).size());
}

bool is_subsequence(const std::vector<Instruction>& small,
                    const std::vector<Instruction>& big) {
    size_t j = 0;
    for (size_t i = 0; i < big.size() && j < small.size(); ++i)
        if (big[i] == small[j]) ++j;
    return j == small.size();
}

bool targets_resolve(const Program& p) {
    for (const Instruction& ins : p.instructions)
        if (!ins.target.empty() && p.labels.count(ins.target) == 0)
            return false;
    return true;
}

// ---- fixture corpus (shared by criteria 1 and 7) ----

struct Entry {
    std::string name;
    Program p;
    Netlist n;
};

struct CompactedEntry {
    const Entry* e;
    CompactionResult proposed;
    CompactionReport proposed_report;
    CompactionResult a0;
    CompactionReport a0_report;
    double a0_seconds = 0.0;
};

std::vector<Entry> build_corpus() {
    Netlist and1 = load_netlist(kSingleAnd);
    Netlist fa = load_netlist(kFullAdder);
    Netlist alu8 = build_reference_alu(8);
    Netlist alu4 = build_reference_alu(4);
    Netlist alu2 = build_reference_alu(2);

    std::vector<Entry> corpus;
    corpus.push_back({"and5",
                      parse_program("li r1, 1\n"
                                    "work: li r2, 1\n"
                                    "unit r3, r1, r2\n"
                                    "sw r3, 0(r0)\n"
                                    "end: halt\n",
                                    8, "and5"),
                      and1});
    corpus.push_back({"branchy",
                      parse_program("li r1, 1\n"
                                    "li r2, 2\n"
                                    "slt r3, r1, r2\n"
                                    "bne r3, r0, fin\n"
                                    "li r4, 3\n"
                                    "sw r4, 7(r0)\n"
                                    "fin: halt\n",
                                    2, "branchy"),
                      alu2});
    corpus.push_back({"loopy",
                      parse_program("li r1, 3\n"
                                    "li r2, 1\n"
                                    "top: sub r1, r1, r2\n"
                                    "bne r1, r0, top\n"
                                    "sw r1, 0(r0)\n"
                                    "halt\n",
                                    2, "loopy"),
                      alu2});

    GenConfig cfg;
    cfg.n_blocks = 10;
    cfg.block_lo = 3;
    cfg.block_hi = 6;
    cfg.seed = 7;
    cfg.name = "rbb10";
    corpus.push_back({"rbb10", gen_random_program(cfg, alu8), alu8});

    // exactly 200 instructions: 15 prologue + 46 blocks of 4 + halt
    cfg = GenConfig{};
    cfg.n_blocks = 46;
    cfg.block_lo = 4;
    cfg.block_hi = 4;
    cfg.seed = 11;
    cfg.name = "rbb46x4";
    corpus.push_back({"rbb46x4", gen_random_program(cfg, alu8), alu8});

    cfg = GenConfig{};
    cfg.n_blocks = 20;
    cfg.block_lo = 3;
    cfg.block_hi = 6;
    cfg.seed = 3;
    cfg.independent = true;
    cfg.name = "ind20";
    corpus.push_back({"ind20", gen_random_program(cfg, alu8), alu8});

    cfg = GenConfig{};
    cfg.word_width = 4;
    cfg.seed = 5;
    cfg.sample_budget = 64;
    cfg.name = "atpg4";
    corpus.push_back({"atpg4", gen_atpg_program(alu4, cfg), alu4});

    corpus.push_back({"fa8", exhaustive_unit_program(fa, 8, "fa8"), fa});

    SplitMix64 rng(2026);
    for (int i = 0; i < 2; ++i) {
        Program p = random_halting_program(rng, 8);
        p.name = "prop" + std::to_string(i + 1);
        corpus.push_back({p.name, p, alu8});
    }
    return corpus;
}

// ---- criteria ----

Outcome crit_single_invocation(const std::vector<CompactedEntry>& compacted) {
    Outcome o;
    double fixture_seconds = 0.0;
    for (const CompactedEntry& ce : compacted) {
        o.expect(ce.proposed_report.fault_sim_invocations == 1,
                 ce.e->name + ": proposed invocations " +
                     std::to_string(ce.proposed_report.fault_sim_invocations));
        int adm = admissible_count(ce.e->p);
        o.expect(ce.a0_report.fault_sim_invocations == adm,
                 ce.e->name + ": a0 invocations " +
                     std::to_string(ce.a0_report.fault_sim_invocations) +
                     " != admissible " + std::to_string(adm));
        if (ce.e->name == "rbb46x4") {
            fixture_seconds = ce.a0_seconds;
            o.expect(ce.e->p.size() == 200, "fixture is not 200 instructions");
            o.expect(fixture_seconds < 60.0,
                     "a0 on the 200-instruction fixture took " +
                         fmt(fixture_seconds) + " s (budget 60)");
            o.note("a0 on 200-instruction fixture: " +
                   std::to_string(ce.a0_report.fault_sim_invocations) +
                   " trials in " + fmt(fixture_seconds) + " s");
        }
    }
    o.note(std::to_string(compacted.size()) + " corpus programs at 1 each");
    return o;
}

Outcome crit_fc_preserved() {
    Outcome o;
    Netlist alu8 = build_reference_alu(8);
    auto t0 = std::chrono::steady_clock::now();
    double min_fc = 1e9, max_fc = -1e9;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GenConfig cfg;
        cfg.n_blocks = 500;
        cfg.block_lo = 3;
        cfg.block_hi = 6;
        cfg.seed = seed;
        cfg.independent = true;
        cfg.name = "ind" + std::to_string(seed);
        Program p = gen_random_program(cfg, alu8);
        auto [result, report] = compact(p, alu8, fast_opts());
        o.expect(report.total_faults >= 1000 && report.total_faults <= 10000,
                 cfg.name + ": fault count " +
                     std::to_string(report.total_faults) +
                     " outside [1000,10000]");
        o.expect(report.diff_fc_pct == 0.0,
                 cfg.name + ": diff FC " + fmt(report.diff_fc_pct, 6));
        o.expect(detected_ids(result.fsr_original) ==
                     detected_ids(result.fsr_compacted),
                 cfg.name + ": detected-fault sets differ");
        min_fc = std::min(min_fc, report.fc_original_pct);
        max_fc = std::max(max_fc, report.fc_original_pct);
    }
    double secs = seconds_since(t0);
    o.expect(secs < 600.0, "took " + fmt(secs) + " s (budget 600)");
    o.note("20 programs, FC " + fmt(min_fc) + "-" + fmt(max_fc) +
           "%, diff 0.00 exactly, " + fmt(secs) + " s");
    return o;
}

Outcome crit_large_reduction() {
    Outcome o;
    Netlist alu8 = build_reference_alu(8);
    GenConfig cfg;
    cfg.n_blocks = 2000;
    cfg.block_lo = 3;
    cfg.block_hi = 6;
    cfg.seed = 42;
    cfg.name = "rbb2000";
    auto t0 = std::chrono::steady_clock::now();
    Program p = gen_random_program(cfg, alu8);
    auto [result, report] = compact(p, alu8, fast_opts());
    (void)result;
    double secs = seconds_since(t0);
    o.expect(report.size_reduction_pct >= 50.0,
             "size reduction " + fmt(report.size_reduction_pct) + "% < 50%");
    o.expect(report.duration_reduction_pct >= 50.0,
             "duration reduction " + fmt(report.duration_reduction_pct) +
                 "% < 50%");
    o.expect(secs < 900.0, "took " + fmt(secs) + " s (budget 900)");
    o.note(std::to_string(report.size_instr_original) + " -> " +
           std::to_string(report.size_instr_compacted) + " instr (" +
           fmt(report.size_reduction_pct) + "%), " +
           std::to_string(report.duration_cc_original) + " -> " +
           std::to_string(report.duration_cc_compacted) + " cc (" +
           fmt(report.duration_reduction_pct) + "%), FC diff " +
           fmt(report.diff_fc_pct) + ", " + fmt(secs) + " s");
    return o;
}

Outcome crit_reduction_arithmetic() {
    Outcome o;
    struct Row {
        long long original, compacted;
        double expected;
    };
    const Row rows[] = {
        {206306, 12581, 93.90},
        {439954, 21660, 95.08},
        {5780, 3864, 33.15},
    };
    std::string got;
    for (const Row& r : rows) {
        double v = reduction_pct(r.original, r.compacted);
        o.expect(std::abs(v - r.expected) < 0.01,
                 std::to_string(r.original) + "->" +
                     std::to_string(r.compacted) + " gave " + fmt(v, 4) +
                     ", want " + fmt(r.expected));
        if (!got.empty()) got += ", ";
        got += fmt(v, 4) + "%";
    }
    o.note("computed " + got);
    return o;
}

Outcome crit_oracle_equivalence() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();

    std::vector<std::pair<std::string, std::string>> nets;
    for (const char* kind :
         {"AND", "OR", "NAND", "NOR", "XOR", "XNOR"}) {
        nets.emplace_back(kind, std::string("input a0 b0\noutput r0\n"
                                            "gate g1 ") +
                                    kind + " r0 a0 b0\n");
    }
    for (const char* kind : {"NOT", "BUF"}) {
        nets.emplace_back(kind, std::string("input a0\noutput r0\n"
                                            "gate g1 ") +
                                    kind + " r0 a0\n");
    }
    nets.emplace_back("full-adder", kFullAdder);

    int checked = 0;
    for (const auto& [name, text] : nets) {
        Netlist n = load_netlist(text);
        Program p = exhaustive_unit_program(n, 8, name);
        auto faults = enumerate_faults(n);
        auto fsr = simulate_all(p, n, faults, fast_opts());
        for (const Fault& f : faults) {
            bool bus = fsr.detections.count(f.id) == 1;
            bool oracle_says = !oracle::detecting_patterns(n, f).empty();
            o.expect(bus == oracle_says,
                     name + " fault " + fault_site(n, f) + " " +
                         polarity_name(f.polarity) + ": bus " +
                         std::to_string(bus) + " oracle " +
                         std::to_string(oracle_says));
            ++checked;
        }
    }
    double secs = seconds_since(t0);
    o.expect(secs < 10.0, "took " + fmt(secs) + " s (budget 10)");
    o.note(std::to_string(nets.size()) + " netlists, " +
           std::to_string(checked) + " faults, " + fmt(secs) + " s");
    return o;
}

Outcome crit_label_reduce_oracle() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();

    std::vector<std::pair<Program, Netlist>> cases;
    Netlist alu1 = build_reference_alu(1);
    SplitMix64 rng(31);
    for (int i = 0; i < 20; ++i) {
        Program p = random_halting_program(rng, 1);
        p.name = "op" + std::to_string(i);
        cases.emplace_back(p, alu1);
    }
    Netlist fa = load_netlist(kFullAdder);
    SplitMix64 rng2(32);
    for (int i = 0; i < 12; ++i)
        cases.emplace_back(
            random_unit_program(rng2, 2, "un" + std::to_string(i)), fa);

    for (const auto& [p, n] : cases) {
        o.expect(p.size() <= 30, p.name + ": program too large for the oracle");
        o.expect(static_cast<int>(n.gates.size()) <= 40,
                 p.name + ": netlist too large for the oracle");
        auto bbs = partition_basic_blocks(p);
        auto region = find_admissible_region(p, bbs);
        TraceReport golden = run(p, n);
        auto faults = enumerate_faults(n);
        auto fsr = simulate_all(p, n, faults, fast_opts(), &golden);
        LabeledProgram lp = label_instructions(p, golden, fsr);
        auto [reduced, removed] = reduce_program(lp, region, bbs);

        oracle::BruteReduction brute =
            oracle::brute_label_reduce(p, n, kDefaultMaxCycles);
        for (int i = 0; i < p.size(); ++i)
            o.expect((lp.labels[i] == InstrLabel::Essential) ==
                         (brute.essential[i] != 0),
                     p.name + ": essential flag differs at " +
                         std::to_string(i));
        o.expect(removed == brute.removed_blocks,
                 p.name + ": removed block sets differ");
        std::vector<char> keep(p.instructions.size(), 0);
        for (int idx : brute.kept_indices) keep[idx] = 1;
        o.expect(reduced == subprogram(p, keep),
                 p.name + ": reduced programs differ");
    }
    double secs = seconds_since(t0);
    o.expect(secs < 60.0, "took " + fmt(secs) + " s (budget 60)");
    o.note(std::to_string(cases.size()) + " program/netlist pairs, " +
           fmt(secs) + " s");
    return o;
}

Outcome crit_structural_safety(const std::vector<CompactedEntry>& compacted) {
    Outcome o;
    for (const CompactedEntry& ce : compacted) {
        const Program& p = ce.e->p;
        const Netlist& n = ce.e->n;
        auto bbs = partition_basic_blocks(p);
        auto region = find_admissible_region(p, bbs);
        auto adm = admissible_instruction_indices(bbs, region);
        std::set<int> adm_set(adm.begin(), adm.end());

        for (const char* algo : {"proposed", "a0"}) {
            const CompactionResult& r =
                algo == std::string("proposed") ? ce.proposed : ce.a0;
            std::string tag = ce.e->name + "/" + algo;

            Program reparsed =
                parse_program(emit_program(r.compacted), p.word_width, p.name);
            o.expect(reparsed == r.compacted, tag + ": reparse differs");
            o.expect(run(r.compacted, n).terminated == Termination::Halt,
                     tag + ": compacted program does not halt");
            o.expect(targets_resolve(r.compacted),
                     tag + ": dangling branch target");
            for (int id : r.removed_block_ids)
                o.expect(region.contains(id),
                         tag + ": removed block " + std::to_string(id) +
                             " not admissible");

            if (algo == std::string("proposed")) {
                // whole-block removal: survivors are exactly the original
                // instructions outside the removed blocks
                std::vector<Instruction> expected;
                std::vector<char> keep(p.instructions.size(), 1);
                for (const BasicBlock& bb : bbs)
                    if (r.removed_block_ids.count(bb.id))
                        for (int i = bb.start; i <= bb.end; ++i) keep[i] = 0;
                for (int i = 0; i < p.size(); ++i)
                    if (keep[i]) expected.push_back(p.instructions[i]);
                o.expect(r.compacted.instructions == expected,
                         tag + ": kept instructions differ from the "
                               "block-removal image");
            } else {
                // per-instruction removal: result is a subsequence of the
                // original and keeps every non-admissible instruction
                o.expect(
                    is_subsequence(r.compacted.instructions, p.instructions),
                    tag + ": not a subsequence of the original");
                std::vector<Instruction> spine;
                for (int i = 0; i < p.size(); ++i)
                    if (adm_set.count(i) == 0)
                        spine.push_back(p.instructions[i]);
                o.expect(is_subsequence(spine, r.compacted.instructions),
                         tag + ": non-admissible instruction dropped");
            }
        }
    }
    o.note(std::to_string(compacted.size()) +
           " corpus programs x 2 algorithms");
    return o;
}

Outcome crit_worker_independence() {
    Outcome o;
    Netlist alu8 = build_reference_alu(8);
    GenConfig cfg;
    cfg.n_blocks = 60;
    cfg.block_lo = 3;
    cfg.block_hi = 6;
    cfg.seed = 5;
    cfg.independent = true;
    cfg.name = "ind60";
    Program p = gen_random_program(cfg, alu8);
    auto faults = enumerate_faults(alu8);

    std::string fsr_ref, emit_ref, report_ref;
    for (int workers : {1, 2, 8}) {
        SimOptions opt;
        opt.workers = workers;
        std::string fsr_json =
            fsr_to_json(simulate_all(p, alu8, faults, opt), alu8, faults);
        auto [result, report] = compact(p, alu8, opt);
        std::string emitted = emit_program(result.compacted);
        auto j = nlohmann::json::parse(report_to_json(report));
        j.erase("meta");  // wall-clock timing is the one non-reproducible field
        std::string report_json = j.dump();
        if (workers == 1) {
            fsr_ref = fsr_json;
            emit_ref = emitted;
            report_ref = report_json;
        } else {
            std::string w = std::to_string(workers);
            o.expect(fsr_json == fsr_ref, "fsr JSON differs at workers=" + w);
            o.expect(emitted == emit_ref,
                     "compacted program differs at workers=" + w);
            o.expect(report_json == report_ref,
                     "report JSON differs at workers=" + w);
        }
    }
    o.note("workers 1/2/8, " + std::to_string(fsr_ref.size()) +
           "-byte fsr JSON byte-identical");
    return o;
}

}  // namespace

int main() {
    unsigned hw = std::thread::hardware_concurrency();
    g_workers = static_cast<int>(std::clamp(hw, 1u, 8u));

    std::vector<Entry> corpus = build_corpus();
    std::vector<CompactedEntry> compacted;
    for (const Entry& e : corpus) {
        CompactedEntry ce;
        ce.e = &e;
        std::tie(ce.proposed, ce.proposed_report) =
            compact(e.p, e.n, fast_opts());
        auto t0 = std::chrono::steady_clock::now();
        std::tie(ce.a0, ce.a0_report) = compact_a0(e.p, e.n, fast_opts());
        ce.a0_seconds = seconds_since(t0);
        compacted.push_back(std::move(ce));
    }

    struct Criterion {
        const char* title;
        Outcome outcome;
    };
    Criterion criteria[] = {
        {"compaction needs one fault simulation; the trial baseline needs "
         "one per admissible instruction",
         crit_single_invocation(compacted)},
        {"independent-block programs keep coverage and detected sets exactly",
         crit_fc_preserved()},
        {"a 2000-block random program compacts by at least half in size and "
         "duration",
         crit_large_reduction()},
        {"reference reduction percentages reproduced within 0.01",
         crit_reduction_arithmetic()},
        {"bus-level detections equal the exhaustive truth-table oracle",
         crit_oracle_equivalence()},
        {"labeling and reduction equal brute-force recomputation",
         crit_label_reduce_oracle()},
        {"compacted programs are structurally safe across the corpus",
         crit_structural_safety(compacted)},
        {"artifacts are byte-identical across worker counts",
         crit_worker_independence()},
    };

    int failures = 0;
    int id = 1;
    for (const Criterion& c : criteria) {
        const Outcome& o = c.outcome;
        std::printf("[%s] %d. %s (%s)\n", o.pass ? "PASS" : "FAIL", id,
                    c.title, o.detail.c_str());
        if (!o.pass) ++failures;
        ++id;
    }
    std::printf("%d/8 criteria passed\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}
