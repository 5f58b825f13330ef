#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sbst/asm.hpp"
#include "sbst/netlist.hpp"

namespace sbst {

// splitmix64 with the published constants; fixing the PRNG keeps generated
// corpora bit-identical across implementations.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Modulo draw; the bias is negligible for n far below 2^64 and the
    // stream layout stays trivially portable.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

  private:
    std::uint64_t state_;
};

enum class GenMode { RandomBB, Atpg };

struct GenConfig {
    GenMode mode = GenMode::RandomBB;
    int n_blocks = 1;
    int block_lo = 4;  // instructions per block, inclusive bounds
    int block_hi = 4;
    std::uint64_t seed = 0;
    int word_width = 8;
    // Restrict operand sources to registers initialized inside the same
    // block, making every block's bus activity independent of the others.
    bool independent = false;
    int sample_budget = 256;  // atpg mode: random patterns to try
    std::string name = "tp";
};

struct GenError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pseudorandom straight-line program: register-clearing prologue, then
// n_blocks labeled blocks (LI initializations, random ALU/UNIT ops with a
// fresh destination register per write, one SW to a per-block unique
// address), then HALT. Deterministic in cfg.seed.
Program gen_random_program(const GenConfig& cfg, const Netlist& n);

// Greedy random-pattern selection: keep a sampled input pattern iff it
// detects (at the netlist outputs) a fault missed by the patterns kept so
// far; encode each kept pattern as one block (LI a, LI b, op, SW).
Program gen_atpg_program(const Netlist& n, const GenConfig& cfg);

}  // namespace sbst
