#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbst/asm.hpp"
#include "sbst/netlist.hpp"

namespace sbst {

inline constexpr int kDefaultMaxCycles = 1'000'000;

struct BusEvent {
    std::uint32_t addr = 0;
    std::uint32_t data = 0;
    bool is_write = false;
    bool operator==(const BusEvent&) const = default;
};

// One executed cycle. cc is 1-based; pattern holds the execute-unit input
// bits (netlist input order) and is empty on cycles that bypass the unit.
struct TraceRecord {
    int cc = 0;
    int pc = 0;
    std::string di;
    std::vector<std::uint8_t> pattern;
    std::optional<BusEvent> bus_event;
};

enum class Termination { Halt, CycleLimit };

struct TraceReport {
    std::string program_name;
    std::vector<TraceRecord> records;
    Termination terminated = Termination::Halt;
    int duration_cc() const { return static_cast<int>(records.size()); }
};

struct IssError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lightweight per-cycle result used by the fault simulator's inner loop.
struct StepResult {
    int pc = 0;
    std::optional<BusEvent> bus_event;
};

// Execution state for one machine. reset() restores power-on state so a
// single Machine can be reused across faulty runs without reallocation.
class Machine {
  public:
    Machine(const Program& p, const Netlist& n);

    void reset();
    bool halted() const { return halted_; }
    int cc() const { return cc_; }
    int pc() const { return pc_; }
    std::uint32_t reg(int i) const { return regs_[i]; }

    // Executes one instruction (one cycle). pattern_out, when given, is
    // filled with the unit input bits (cleared on non-unit cycles).
    StepResult step(const Fault* fault = nullptr,
                    std::vector<std::uint8_t>* pattern_out = nullptr);

  private:
    const Program* p_;
    const Netlist* n_;
    std::vector<int> targets_;  // branch/jump targets resolved to indices
    std::uint32_t mask_;
    std::array<std::uint32_t, kNumRegisters> regs_{};
    std::vector<std::uint16_t> mem_;
    std::vector<std::uint32_t> dirty_;
    std::vector<std::uint8_t> unit_in_;
    Evaluator ev_;
    int pc_ = 0;
    int cc_ = 0;
    bool halted_ = false;

    std::uint32_t run_unit(const Fault* fault);
    void write_reg(int rd, std::uint32_t v);
};

// Full golden-style run producing a trace with decoded-instruction text.
TraceReport run(const Program& p, const Netlist& n,
                const Fault* fault = nullptr,
                int max_cycles = kDefaultMaxCycles);

std::string trace_to_csv(const TraceReport& r);

}  // namespace sbst
