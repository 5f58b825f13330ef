#include "sbst/tpgen.hpp"

#include <sstream>

namespace sbst {

namespace {

void check_common(const GenConfig& cfg, const Netlist& n) {
    if (cfg.word_width < kMinWordWidth || cfg.word_width > kMaxWordWidth)
        throw GenError("word width must be in [1,16]");
    if (!n.unit_mode()) {
        if (n.a_bits != cfg.word_width)
            throw GenError("netlist width " + std::to_string(n.a_bits) +
                           " does not match word width " +
                           std::to_string(cfg.word_width));
    } else if (n.a_bits > cfg.word_width || n.b_bits > cfg.word_width ||
               n.r_bits > cfg.word_width) {
        throw GenError("unit netlist buses wider than the word width");
    }
}

Program finish(std::ostringstream& src, const GenConfig& cfg) {
    Program p = parse_program(src.str(), cfg.word_width, cfg.name);
    validate_control_flow(p);
    return p;
}

void emit_prologue(std::ostringstream& src) {
    for (int r = 1; r < kNumRegisters; ++r)
        src << "li r" << r << ", 0\n";
}

}  // namespace

Program gen_random_program(const GenConfig& cfg, const Netlist& n) {
    check_common(cfg, n);
    if (cfg.n_blocks < 1) throw GenError("n_blocks must be positive");
    if (cfg.n_blocks > (1 << kBusAddressBits))
        throw GenError("n_blocks exceeds the bus address space");
    if (cfg.block_lo < 3)
        throw GenError("block size must be at least 3 (init, op, store)");
    if (cfg.block_hi < cfg.block_lo)
        throw GenError("block size range is empty");
    // every non-SW instruction writes a fresh register out of r1..r15
    if (cfg.block_hi > kNumRegisters)
        throw GenError("block size exceeds the register budget");

    SplitMix64 rng(cfg.seed);
    std::ostringstream src;
    emit_prologue(src);

    const std::uint64_t value_range = std::uint64_t{1} << cfg.word_width;
    for (int k = 0; k < cfg.n_blocks; ++k) {
        int s = cfg.block_lo +
                static_cast<int>(rng.below(cfg.block_hi - cfg.block_lo + 1));
        src << "bb" << k << ":\n";

        std::vector<int> free;
        for (int r = 1; r < kNumRegisters; ++r) free.push_back(r);
        std::vector<int> written;
        auto take_free = [&] {
            int i = static_cast<int>(rng.below(free.size()));
            int r = free[i];
            free.erase(free.begin() + i);
            return r;
        };

        int n_init = std::min(2, s - 2);
        for (int i = 0; i < n_init; ++i) {
            int r = take_free();
            src << "li r" << r << ", " << rng.below(value_range) << "\n";
            written.push_back(r);
        }
        int n_ops = s - 1 - n_init;
        for (int i = 0; i < n_ops; ++i) {
            int rd = take_free();
            const char* mnem =
                n.unit_mode()
                    ? "unit"
                    : mnemonic_name(mnemonic_for_opcode(
                          static_cast<int>(rng.below(8))));
            int rs1, rs2;
            if (cfg.independent) {
                rs1 = written[rng.below(written.size())];
                rs2 = written[rng.below(written.size())];
            } else {
                rs1 = 1 + static_cast<int>(rng.below(kNumRegisters - 1));
                rs2 = 1 + static_cast<int>(rng.below(kNumRegisters - 1));
            }
            src << mnem << " r" << rd << ", r" << rs1 << ", r" << rs2 << "\n";
            written.push_back(rd);
        }
        src << "sw r" << written.back() << ", " << k << "(r0)\n";
    }
    src << "end:\nhalt\n";
    return finish(src, cfg);
}

Program gen_atpg_program(const Netlist& n, const GenConfig& cfg) {
    check_common(cfg, n);
    if (cfg.sample_budget < 1) throw GenError("sample budget must be positive");

    SplitMix64 rng(cfg.seed);
    auto faults = enumerate_faults(n);
    std::vector<char> detected(faults.size(), 0);
    std::vector<std::vector<std::uint8_t>> kept;

    Evaluator ev;
    std::vector<std::uint8_t> pattern(n.inputs.size());
    std::vector<std::uint8_t> golden;
    for (int t = 0; t < cfg.sample_budget; ++t) {
        for (auto& bit : pattern)
            bit = static_cast<std::uint8_t>(rng.below(2));
        auto g = ev.eval(n, pattern, nullptr);
        golden.assign(g.begin(), g.end());
        bool keep = false;
        for (size_t fi = 0; fi < faults.size(); ++fi) {
            if (detected[fi]) continue;
            auto fy = ev.eval(n, pattern, &faults[fi]);
            for (size_t i = 0; i < golden.size(); ++i)
                if (golden[i] != fy[i]) {
                    detected[fi] = 1;
                    keep = true;
                    break;
                }
        }
        if (keep) kept.push_back(pattern);
        if (static_cast<int>(kept.size()) > (1 << kBusAddressBits))
            throw GenError("kept patterns exceed the bus address space");
    }
    if (kept.empty())
        throw GenError("no sampled pattern detects any fault");

    std::ostringstream src;
    emit_prologue(src);
    for (size_t i = 0; i < kept.size(); ++i) {
        const auto& pat = kept[i];
        size_t k = 0;
        int opc = 0;
        for (int b = 0; b < n.op_bits; ++b) opc |= pat[k++] << b;
        std::uint64_t a = 0, bval = 0;
        for (int b = 0; b < n.a_bits; ++b)
            a |= std::uint64_t{pat[k++]} << b;
        for (int b = 0; b < n.b_bits; ++b)
            bval |= std::uint64_t{pat[k++]} << b;

        src << "bb" << i << ":\n";
        src << "li r1, " << a << "\n";
        src << "li r2, " << bval << "\n";
        src << (n.unit_mode() ? "unit" : mnemonic_name(mnemonic_for_opcode(opc)))
            << " r3, r1, r2\n";
        src << "sw r3, " << i << "(r0)\n";
    }
    src << "end:\nhalt\n";
    return finish(src, cfg);
}

}  // namespace sbst
