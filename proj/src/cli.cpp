#include "sbst/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sbst/baseline.hpp"
#include "sbst/compactor.hpp"
#include "sbst/tpgen.hpp"

namespace sbst {

namespace {

namespace fs = std::filesystem;

std::string format_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() +
                                       "'");
}

// --out flag wins; otherwise SBSTC_OUT_DIR; otherwise the working dir.
fs::path resolve_out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("SBSTC_OUT_DIR"); env && *env)
        return env;
    return ".";
}

fs::path ensure_out_dir(const std::string& flag) {
    fs::path dir = resolve_out_dir(flag);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory '" +
                                 dir.string() + "'");
    return dir;
}

std::string stem_of(const std::string& path) {
    return fs::path(path).stem().string();
}

// --netlist accepts a .nl file path or the builtin form alu:<width>.
Netlist resolve_netlist(const std::string& spec) {
    if (spec.rfind("alu:", 0) == 0) {
        int width = 0;
        try {
            width = std::stoi(spec.substr(4));
        } catch (const std::exception&) {
            throw std::runtime_error("bad netlist spec '" + spec + "'");
        }
        return build_reference_alu(width);
    }
    return load_netlist(read_file(spec));
}

const std::string kNetlistHelp =
    "netlist file (.nl) or builtin reference unit 'alu:<width>'";

std::string netlist_validator(const std::string& s) {
    if (s.rfind("alu:", 0) == 0) {
        const std::string w = s.substr(4);
        if (w.empty() ||
            w.find_first_not_of("0123456789") != std::string::npos)
            return "expected alu:<width>, got '" + s + "'";
        return {};
    }
    if (!fs::exists(s)) return "netlist file '" + s + "' does not exist";
    return {};
}

struct Opts {
    std::string program;
    std::string program2;
    std::string netlist;
    std::string out;
    std::string report_json;
    int word_width = 8;
    int max_cycles = kDefaultMaxCycles;
    int workers = 1;
    std::string mode = "bus";
    std::string algo = "proposed";
    bool dump_cfg = false;

    std::string gen_mode = "random-bb";
    int blocks = 1;
    std::string size = "4:4";
    std::uint64_t seed = 0;
    bool independent = false;
    int budget = 256;

    SimOptions sim() const {
        SimOptions s;
        s.max_cycles = max_cycles;
        s.workers = workers;
        s.mode = mode == "unit-output" ? DetectMode::UnitOutput
                                       : DetectMode::Bus;
        return s;
    }
};

Program load_program(const Opts& o) {
    Program p = parse_program(read_file(o.program), o.word_width,
                              stem_of(o.program));
    validate_control_flow(p);
    return p;
}

void add_sim_flags(CLI::App* cmd, Opts& o) {
    cmd->add_option("--max-cycles", o.max_cycles, "simulation cycle limit")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--workers", o.workers, "fault-simulation threads")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mode", o.mode, "detection mode")
        ->check(CLI::IsMember({"bus", "unit-output"}));
}

void add_netlist_flag(CLI::App* cmd, Opts& o) {
    cmd->add_option("--netlist", o.netlist, kNetlistHelp)
        ->required()
        ->check(CLI::Validator(netlist_validator, "NETLIST"));
}

int do_assemble(const Opts& o) {
    Program p = load_program(o);
    fs::path dir = ensure_out_dir(o.out);
    write_file(dir / (p.name + ".canon.s"), emit_program(p));
    auto bbs = partition_basic_blocks(p);
    auto region = find_admissible_region(p, bbs);
    if (o.dump_cfg)
        write_file(dir / (p.name + ".cfg.csv"), dump_cfg_csv(bbs, region));
    std::cout << p.name << ": " << p.size() << " instructions, " << bbs.size()
              << " blocks, " << region.block_ids.size()
              << " admissible blocks ("
              << format_pct(100.0 * admissible_fraction(p, bbs, region))
              << "% of instructions)\n";
    return 0;
}

int do_trace(const Opts& o) {
    Program p = load_program(o);
    Netlist n = resolve_netlist(o.netlist);
    TraceReport t = run(p, n, nullptr, o.max_cycles);
    fs::path dir = ensure_out_dir(o.out);
    write_file(dir / (p.name + ".trace.csv"), trace_to_csv(t));
    if (t.terminated != Termination::Halt) {
        std::cerr << "error: program hit the cycle limit ("
                  << o.max_cycles << ") without halting\n";
        return 2;
    }
    std::cout << p.name << ": " << t.duration_cc() << " cycles\n";
    return 0;
}

int do_faultsim(const Opts& o) {
    Program p = load_program(o);
    Netlist n = resolve_netlist(o.netlist);
    auto faults = enumerate_faults(n);
    FaultSimReport fsr = simulate_all(p, n, faults, o.sim());
    fs::path dir = ensure_out_dir(o.out);
    write_file(dir / (p.name + ".fsr.json"), fsr_to_json(fsr, n, faults));
    write_file(dir / (p.name + ".fsr.csv"), fsr_to_csv(fsr, n, faults));
    std::cout << p.name << ": " << fsr.detections.size() << "/"
              << fsr.total_faults << " faults detected, FC "
              << format_pct(fault_coverage(fsr)) << "%\n";
    return 0;
}

int do_generate(const Opts& o) {
    Netlist n = resolve_netlist(o.netlist);
    GenConfig cfg;
    cfg.mode = o.gen_mode == "atpg" ? GenMode::Atpg : GenMode::RandomBB;
    cfg.n_blocks = o.blocks;
    auto colon = o.size.find(':');
    cfg.block_lo = std::stoi(o.size.substr(0, colon));
    cfg.block_hi = colon == std::string::npos
                       ? cfg.block_lo
                       : std::stoi(o.size.substr(colon + 1));
    cfg.seed = o.seed;
    cfg.word_width = o.word_width;
    cfg.independent = o.independent;
    cfg.sample_budget = o.budget;

    fs::path out = o.out.empty() ? resolve_out_dir("") / "tp.s"
                                 : fs::path(o.out);
    cfg.name = out.stem().string();
    Program p = cfg.mode == GenMode::Atpg ? gen_atpg_program(n, cfg)
                                          : gen_random_program(cfg, n);
    if (out.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(out.parent_path(), ec);
    }
    write_file(out, emit_program(p));
    auto bbs = partition_basic_blocks(p);
    std::cout << cfg.name << ": " << p.size() << " instructions, "
              << bbs.size() << " blocks -> " << out.string() << "\n";
    return 0;
}

int do_compact(const Opts& o) {
    Program p = load_program(o);
    Netlist n = resolve_netlist(o.netlist);
    std::pair<CompactionResult, CompactionReport> out =
        o.algo == "a0" ? compact_a0(p, n, o.sim()) : compact(p, n, o.sim());
    const CompactionResult& result = out.first;
    const CompactionReport& report = out.second;

    fs::path dir = ensure_out_dir(o.out);
    write_file(dir / (p.name + ".compact.s"),
               emit_program(result.compacted));
    write_file(dir / "report.json", report_to_json(report));
    write_file(dir / "report.txt", report_to_text(report));
    std::cout << report_to_text(report);
    return 0;
}

int do_verify(const Opts& o) {
    Program original = parse_program(read_file(o.program), o.word_width,
                                     stem_of(o.program));
    Program compacted = parse_program(read_file(o.program2), o.word_width,
                                      stem_of(o.program2));
    Netlist n = resolve_netlist(o.netlist);
    CompactionReport report = verify(original, compacted, n, o.sim());
    fs::path dir = ensure_out_dir(o.out);
    write_file(dir / "verify-report.json", report_to_json(report));
    write_file(dir / "verify-report.txt", report_to_text(report));
    std::cout << report_to_text(report);
    return 0;
}

int do_report(const Opts& o) {
    CompactionReport r = report_from_json(read_file(o.report_json));
    std::string text = report_to_text(r);
    if (!o.out.empty()) write_file(ensure_out_dir(o.out) / "report.txt", text);
    std::cout << text;
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"test-program compaction workbench"};
    app.require_subcommand(1);
    Opts o;

    CLI::App* assemble =
        app.add_subcommand("assemble", "parse a program and emit canon form");
    assemble->add_option("program", o.program, "assembly file")
        ->required()
        ->check(CLI::ExistingFile);
    assemble->add_option("--word-width", o.word_width, "register width")
        ->check(CLI::Range(kMinWordWidth, kMaxWordWidth));
    assemble->add_option("--out", o.out, "output directory");
    assemble->add_flag("--dump-cfg", o.dump_cfg,
                       "also write block/admissibility CSV");

    CLI::App* trace =
        app.add_subcommand("trace", "run a program and write the cycle trace");
    trace->add_option("program", o.program, "assembly file")
        ->required()
        ->check(CLI::ExistingFile);
    trace->add_option("--word-width", o.word_width, "register width")
        ->check(CLI::Range(kMinWordWidth, kMaxWordWidth));
    trace->add_option("--out", o.out, "output directory");
    add_netlist_flag(trace, o);
    trace->add_option("--max-cycles", o.max_cycles, "simulation cycle limit")
        ->check(CLI::PositiveNumber);

    CLI::App* faultsim =
        app.add_subcommand("faultsim", "fault-simulate a program");
    faultsim->add_option("program", o.program, "assembly file")
        ->required()
        ->check(CLI::ExistingFile);
    faultsim->add_option("--word-width", o.word_width, "register width")
        ->check(CLI::Range(kMinWordWidth, kMaxWordWidth));
    faultsim->add_option("--out", o.out, "output directory");
    add_netlist_flag(faultsim, o);
    add_sim_flags(faultsim, o);

    CLI::App* generate =
        app.add_subcommand("generate", "generate a seeded test program");
    add_netlist_flag(generate, o);
    generate->add_option("--mode", o.gen_mode, "generator style")
        ->check(CLI::IsMember({"random-bb", "atpg"}));
    generate->add_option("--blocks", o.blocks, "number of blocks")
        ->check(CLI::PositiveNumber);
    generate
        ->add_option("--size", o.size, "block size k or range lo:hi")
        ->check(CLI::Validator(
            [](const std::string& s) -> std::string {
                if (s.empty() ||
                    s.find_first_not_of("0123456789:") != std::string::npos ||
                    std::count(s.begin(), s.end(), ':') > 1)
                    return "expected k or lo:hi, got '" + s + "'";
                return {};
            },
            "SIZE"));
    generate->add_option("--seed", o.seed, "64-bit generator seed");
    generate->add_option("--word-width", o.word_width, "register width")
        ->check(CLI::Range(kMinWordWidth, kMaxWordWidth));
    generate->add_flag("--independent", o.independent,
                       "block-local operands only");
    generate->add_option("--budget", o.budget,
                         "atpg mode: random patterns to sample")
        ->check(CLI::PositiveNumber);
    generate->add_option("--out", o.out, "output .s file");

    CLI::App* compact =
        app.add_subcommand("compact", "compact a program and verify it");
    compact->add_option("program", o.program, "assembly file")
        ->required()
        ->check(CLI::ExistingFile);
    compact->add_option("--word-width", o.word_width, "register width")
        ->check(CLI::Range(kMinWordWidth, kMaxWordWidth));
    compact->add_option("--out", o.out, "output directory");
    add_netlist_flag(compact, o);
    add_sim_flags(compact, o);
    compact->add_option("--algo", o.algo, "compaction algorithm")
        ->check(CLI::IsMember({"proposed", "a0"}));

    CLI::App* verify = app.add_subcommand(
        "verify", "fault-simulate two programs and report the delta");
    verify->add_option("original", o.program, "original assembly file")
        ->required()
        ->check(CLI::ExistingFile);
    verify->add_option("compacted", o.program2, "compacted assembly file")
        ->required()
        ->check(CLI::ExistingFile);
    verify->add_option("--word-width", o.word_width, "register width")
        ->check(CLI::Range(kMinWordWidth, kMaxWordWidth));
    verify->add_option("--out", o.out, "output directory");
    add_netlist_flag(verify, o);
    add_sim_flags(verify, o);

    CLI::App* report = app.add_subcommand(
        "report", "render the text table from a stored report.json");
    report->add_option("json", o.report_json, "report.json path")
        ->required()
        ->check(CLI::ExistingFile);
    report->add_option("--out", o.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (assemble->parsed()) return do_assemble(o);
        if (trace->parsed()) return do_trace(o);
        if (faultsim->parsed()) return do_faultsim(o);
        if (generate->parsed()) return do_generate(o);
        if (compact->parsed()) return do_compact(o);
        if (verify->parsed()) return do_verify(o);
        if (report->parsed()) return do_report(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace sbst
