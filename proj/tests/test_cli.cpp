#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sbst/cli.hpp"
#include "sbst/compactor.hpp"
#include "support/test_util.hpp"

using namespace sbst;
using testutil::slurp;
using testutil::TempDir;

namespace fs = std::filesystem;

namespace {

const char* kAndNetlist =
    "input a0 b0\n"
    "output r0\n"
    "gate g1 AND r0 a0 b0\n";

// canonical form of the five-instruction AND exerciser used throughout
const char* kProgCanon =
    "    li r1, 1\n"
    "work:\n"
    "    li r2, 1\n"
    "    unit r3, r1, r2\n"
    "    sw r3, 0(r0)\n"
    "end:\n"
    "    halt\n";

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    std::vector<const char*> argv;
    argv.push_back("sbstc");
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    int code = run_cli(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str(), err.str()};
}

nlohmann::json json_without_meta(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    j.erase("meta");
    return j;
}

}  // namespace

TEST_CASE("cli assemble: canonical form, cfg dump and summary line") {
    TempDir tmp;
    std::string prog = tmp.write("prog.s",
                                 "\nLI r1, 1  # comment\n"
                                 "work:\n"
                                 "  li R2, 1\n"
                                 "  UNIT r3, r1, r2\n"
                                 "  sw r3, 0(r0)\n"
                                 "end:\n"
                                 "  halt\n");
    fs::path out = tmp.path() / "out";
    CliRun r = cli({"assemble", prog, "--out", out.string(), "--dump-cfg"});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(r.out ==
          "prog: 5 instructions, 3 blocks, 1 admissible blocks "
          "(60.00% of instructions)\n");
    CHECK(slurp((out / "prog.canon.s").string()) == kProgCanon);
    CHECK(slurp((out / "prog.cfg.csv").string()) ==
          "block_id,start,end,admissible\n"
          "0,0,0,0\n"
          "1,1,3,1\n"
          "2,4,4,0\n");
}

TEST_CASE("cli trace: cycle trace artifact") {
    TempDir tmp;
    std::string prog = tmp.write("prog.s", kProgCanon);
    std::string nl = tmp.write("and.nl", kAndNetlist);
    CliRun r = cli({"trace", prog, "--netlist", nl, "--out", tmp.str()});
    CHECK(r.code == 0);
    CHECK(r.out == "prog: 5 cycles\n");
    CHECK(slurp((tmp.path() / "prog.trace.csv").string()) ==
          "cc,pc,di,pattern,bus_addr,bus_data,bus_we\n"
          "1,0,\"li r1, 1\",,,,\n"
          "2,1,\"li r2, 1\",,,,\n"
          "3,2,\"unit r3, r1, r2\",11,,,\n"
          "4,3,\"sw r3, 0(r0)\",,0,1,1\n"
          "5,4,\"halt\",,,,\n");
}

TEST_CASE("cli trace: cycle limit is a domain error, trace still written") {
    TempDir tmp;
    std::string prog = tmp.write("spin.s", "top: beq r0, r0, top\nhalt\n");
    std::string nl = tmp.write("and.nl", kAndNetlist);
    CliRun r = cli({"trace", prog, "--netlist", nl, "--out", tmp.str(),
                    "--max-cycles", "50"});
    CHECK(r.code == 2);
    CHECK(r.err ==
          "error: program hit the cycle limit (50) without halting\n");
    std::string csv = slurp((tmp.path() / "spin.trace.csv").string());
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 51);  // header + 50
}

TEST_CASE("cli faultsim: artifacts match the library, workers agree") {
    TempDir tmp;
    std::string prog = tmp.write("prog.s", kProgCanon);
    std::string nl = tmp.write("and.nl", kAndNetlist);
    fs::path d1 = tmp.path() / "w1";
    fs::path d2 = tmp.path() / "w3";
    CliRun r1 = cli({"faultsim", prog, "--netlist", nl, "--out", d1.string()});
    CliRun r2 = cli({"faultsim", prog, "--netlist", nl, "--out", d2.string(),
                     "--workers", "3"});
    CHECK(r1.code == 0);
    CHECK(r2.code == 0);
    CHECK(r1.out == "prog: 3/6 faults detected, FC 50.00%\n");
    CHECK(r2.out == r1.out);

    Program p = parse_program(kProgCanon, 8, "prog");
    Netlist n = load_netlist(kAndNetlist);
    auto faults = enumerate_faults(n);
    auto fsr = simulate_all(p, n, faults);
    CHECK(slurp((d1 / "prog.fsr.json").string()) ==
          fsr_to_json(fsr, n, faults));
    CHECK(slurp((d1 / "prog.fsr.csv").string()) == fsr_to_csv(fsr, n, faults));
    // worker count must not leak into the artifacts
    CHECK(slurp((d1 / "prog.fsr.json").string()) ==
          slurp((d2 / "prog.fsr.json").string()));
    CHECK(slurp((d1 / "prog.fsr.csv").string()) ==
          slurp((d2 / "prog.fsr.csv").string()));
}

TEST_CASE("cli generate: seeded programs are reproducible files") {
    TempDir tmp;
    std::string nl = tmp.write("and.nl", kAndNetlist);
    std::string out1 = (tmp.path() / "a" / "gen.s").string();
    std::string out2 = (tmp.path() / "b" / "gen.s").string();
    CliRun r1 = cli({"generate", "--netlist", nl, "--blocks", "3", "--size",
                     "3:5", "--seed", "9", "--out", out1});
    CliRun r2 = cli({"generate", "--netlist", nl, "--blocks", "3", "--size",
                     "3:5", "--seed", "9", "--out", out2});
    CHECK(r1.code == 0);
    CHECK(r2.code == 0);
    CHECK(r1.out.find("gen: ") == 0);
    std::string text = slurp(out1);
    CHECK(text == slurp(out2));

    Program p = parse_program(text, 8, "gen");
    validate_control_flow(p);
    CHECK(p.labels.count("bb0") == 1);
    CHECK(p.labels.count("bb2") == 1);

    SUBCASE("atpg mode") {
        std::string out3 = (tmp.path() / "atp.s").string();
        CliRun r3 = cli({"generate", "--netlist", nl, "--mode", "atpg",
                         "--budget", "32", "--seed", "4", "--out", out3});
        CHECK(r3.code == 0);
        Program q = parse_program(slurp(out3), 8, "atp");
        validate_control_flow(q);
    }
    SUBCASE("single-number block size") {
        std::string out4 = (tmp.path() / "fix.s").string();
        CliRun r4 = cli({"generate", "--netlist", nl, "--blocks", "2",
                         "--size", "4", "--seed", "1", "--out", out4});
        CHECK(r4.code == 0);
        Program q = parse_program(slurp(out4), 8, "fix");
        CHECK(q.size() == 15 + 2 * 4 + 1);
    }
}

TEST_CASE("cli compact: artifacts, stdout and a0 variant") {
    TempDir tmp;
    std::string prog = tmp.write("prog.s", kProgCanon);
    std::string nl = tmp.write("and.nl", kAndNetlist);
    fs::path out = tmp.path() / "out";
    CliRun r = cli({"compact", prog, "--netlist", nl, "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(out / "prog.compact.s"));
    CHECK(fs::exists(out / "report.json"));
    CHECK(r.out == slurp((out / "report.txt").string()));

    auto j = nlohmann::json::parse(slurp((out / "report.json").string()));
    CHECK(j["program"] == "prog");
    CHECK(j["algorithm"] == "proposed");
    CHECK(j["fault_sim_invocations"] == 1);
    CHECK(j["total_faults"] == 6);

    // the emitted subprogram is exactly what the library computes
    Program p = parse_program(kProgCanon, 8, "prog");
    Netlist n = load_netlist(kAndNetlist);
    auto [result, report] = compact(p, n, SimOptions{});
    (void)report;
    CHECK(slurp((out / "prog.compact.s").string()) ==
          emit_program(result.compacted));

    SUBCASE("a0") {
        fs::path out2 = tmp.path() / "a0";
        CliRun r2 = cli({"compact", prog, "--netlist", nl, "--out",
                         out2.string(), "--algo", "a0"});
        CHECK(r2.code == 0);
        auto j2 = nlohmann::json::parse(slurp((out2 / "report.json").string()));
        CHECK(j2["algorithm"] == "a0");
    }
}

TEST_CASE("cli compact: report.json is byte-stable across worker counts") {
    TempDir tmp;
    std::string prog = tmp.write("prog.s", kProgCanon);
    std::string nl = tmp.write("and.nl", kAndNetlist);
    fs::path d1 = tmp.path() / "w1";
    fs::path d2 = tmp.path() / "w4";
    CHECK(cli({"compact", prog, "--netlist", nl, "--out", d1.string()}).code ==
          0);
    CHECK(cli({"compact", prog, "--netlist", nl, "--out", d2.string(),
               "--workers", "4"})
              .code == 0);
    CHECK(slurp((d1 / "prog.compact.s").string()) ==
          slurp((d2 / "prog.compact.s").string()));
    // identical up to the timing block, which is wall clock
    CHECK(json_without_meta(slurp((d1 / "report.json").string())) ==
          json_without_meta(slurp((d2 / "report.json").string())));
}

TEST_CASE("cli verify and report") {
    TempDir tmp;
    std::string prog = tmp.write("prog.s", kProgCanon);
    std::string nl = tmp.write("and.nl", kAndNetlist);
    fs::path cdir = tmp.path() / "c";
    REQUIRE(cli({"compact", prog, "--netlist", nl, "--out", cdir.string()})
                .code == 0);

    SUBCASE("verify the compacted artifact against the original") {
        fs::path vdir = tmp.path() / "v";
        CliRun r = cli({"verify", prog, (cdir / "prog.compact.s").string(),
                        "--netlist", nl, "--out", vdir.string()});
        CHECK(r.code == 0);
        CHECK(r.out == slurp((vdir / "verify-report.txt").string()));
        auto j =
            nlohmann::json::parse(slurp((vdir / "verify-report.json").string()));
        CHECK(j["algorithm"] == "verify");
        CHECK(j["fault_sim_invocations"] == 0);
        CHECK(j["diff_fc_pct"] == 0.0);
    }
    SUBCASE("re-render the stored report") {
        fs::path rdir = tmp.path() / "r";
        CliRun r = cli({"report", (cdir / "report.json").string(), "--out",
                        rdir.string()});
        CHECK(r.code == 0);
        CHECK(r.out == slurp((cdir / "report.txt").string()));
        CHECK(slurp((rdir / "report.txt").string()) == r.out);
    }
}

TEST_CASE("cli: usage errors exit 1, domain errors exit 2") {
    TempDir tmp;
    std::string prog = tmp.write("prog.s", kProgCanon);
    std::string nl = tmp.write("and.nl", kAndNetlist);

    SUBCASE("unknown subcommand") { CHECK(cli({"bogus"}).code == 1); }
    SUBCASE("no subcommand") { CHECK(cli({}).code == 1); }
    SUBCASE("unknown flag") {
        CHECK(cli({"assemble", prog, "--bogus"}).code == 1);
    }
    SUBCASE("missing required netlist") {
        CHECK(cli({"trace", prog}).code == 1);
    }
    SUBCASE("program file does not exist") {
        CHECK(cli({"assemble", (tmp.path() / "nope.s").string()}).code == 1);
    }
    SUBCASE("netlist file does not exist") {
        CHECK(cli({"trace", prog, "--netlist",
                   (tmp.path() / "nope.nl").string()})
                  .code == 1);
    }
    SUBCASE("malformed builtin netlist spec") {
        CHECK(cli({"trace", prog, "--netlist", "alu:x"}).code == 1);
    }
    SUBCASE("word width out of range") {
        CHECK(cli({"assemble", prog, "--word-width", "20"}).code == 1);
    }
    SUBCASE("help exits 0") {
        CliRun r = cli({"--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("compaction workbench") != std::string::npos);
    }
    SUBCASE("bad program content") {
        std::string bad = tmp.write("bad.s", "foo r1\nhalt\n");
        CliRun r = cli({"assemble", bad});
        CHECK(r.code == 2);
        CHECK(r.err.find("error: line 1: unknown mnemonic 'foo'") == 0);
    }
    SUBCASE("bad netlist content") {
        std::string bad = tmp.write("bad.nl",
                                    "input a0\noutput r0\n"
                                    "gate g1 XAND r0 a0\n");
        CliRun r = cli({"trace", prog, "--netlist", bad});
        CHECK(r.code == 2);
        CHECK(r.err.find("unknown gate kind") != std::string::npos);
    }
    SUBCASE("compact on a non-halting program") {
        std::string spin = tmp.write("spin.s", "top: beq r0, r0, top\nhalt\n");
        CliRun r = cli({"compact", spin, "--netlist", nl, "--out", tmp.str(),
                        "--max-cycles", "100"});
        CHECK(r.code == 2);
        CHECK(r.err.find("did not halt") != std::string::npos);
    }
}

TEST_CASE("cli: builtin alu netlist spec") {
    TempDir tmp;
    std::string prog = tmp.write("alu.s",
                                 "    li r1, 2\n"
                                 "work:\n"
                                 "    add r2, r1, r1\n"
                                 "    sw r2, 0(r0)\n"
                                 "end:\n"
                                 "    halt\n");
    CliRun r = cli({"trace", prog, "--netlist", "alu:8", "--out", tmp.str()});
    CHECK(r.code == 0);
    CHECK(r.out == "alu: 4 cycles\n");
    std::string csv = slurp((tmp.path() / "alu.trace.csv").string());
    CHECK(csv.find("\"sw r2, 0(r0)\",,0,4,1") != std::string::npos);
}

TEST_CASE("cli: output directory resolution") {
    TempDir tmp;
    std::string prog = tmp.write("prog.s", kProgCanon);
    fs::path envdir = tmp.path() / "env";
    fs::path flagdir = tmp.path() / "flag";

    ::setenv("SBSTC_OUT_DIR", envdir.string().c_str(), 1);
    CliRun r1 = cli({"assemble", prog});
    CHECK(r1.code == 0);
    CHECK(fs::exists(envdir / "prog.canon.s"));

    // an explicit --out wins over the environment
    CliRun r2 = cli({"assemble", prog, "--out", flagdir.string()});
    CHECK(r2.code == 0);
    CHECK(fs::exists(flagdir / "prog.canon.s"));

    // generate's default file name lands in the resolved directory
    std::string nl = tmp.write("and.nl", kAndNetlist);
    CliRun r3 = cli({"generate", "--netlist", nl, "--seed", "2"});
    CHECK(r3.code == 0);
    CHECK(fs::exists(envdir / "tp.s"));
    ::unsetenv("SBSTC_OUT_DIR");
}
