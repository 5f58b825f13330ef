// Assembly front end for the micro-ISA: parsing, validation and canonical
// emission of test programs.
//
// The ISA is a small RISC-style subset: 16 registers (r0 reads as zero,
// writes to it are ignored), a configurable word width (default 8 bits),
// and a flat 16-bit bus address space for loads/stores.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sbst {

enum class Mnemonic {
    LI,
    ADD,
    SUB,
    AND,
    OR,
    XOR,
    SLL,
    SRL,
    SLT,
    UNIT,
    LW,
    SW,
    BEQ,
    BNE,
    J,
    NOP,
    HALT,
};

constexpr int kNumRegisters = 16;
constexpr int kBusAddressBits = 16;
constexpr int kMinWordWidth = 1;
constexpr int kMaxWordWidth = 16;

const char* mnemonic_name(Mnemonic m);

// ADD..SLT route through the execute-unit netlist via the 3-bit op bus.
bool is_alu_op(Mnemonic m);
// Opcode presented on the op bus (ADD=0 .. SLT=7).
int alu_opcode(Mnemonic m);
Mnemonic mnemonic_for_opcode(int opcode);
// BEQ/BNE/J/HALT terminate a basic block.
bool is_control_flow(Mnemonic m);

struct Instruction {
    Mnemonic mnemonic = Mnemonic::NOP;
    int rd = 0;
    int rs1 = 0;   // SW: value source; LW: base register
    int rs2 = 0;   // SW: base register
    std::int32_t imm = 0;
    std::string target;   // branch/jump label
    int source_line = 0;  // 1-based, 0 when synthesized

    bool operator==(const Instruction& o) const {
        return mnemonic == o.mnemonic && rd == o.rd && rs1 == o.rs1 &&
               rs2 == o.rs2 && imm == o.imm && target == o.target;
    }
};

struct Program {
    std::string name;
    int word_width = 8;
    std::vector<Instruction> instructions;
    std::map<std::string, int> labels;  // label name -> instruction index

    int size() const { return static_cast<int>(instructions.size()); }

    bool operator==(const Program& o) const {
        return word_width == o.word_width && instructions == o.instructions &&
               labels == o.labels;
    }
};

struct ParseError : std::runtime_error {
    ParseError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg),
          line(line_) {}
    int line;
};

// Parses assembly source. One statement per line, `# comment`,
// `label:` on its own line or prefixed to an instruction.
// Validates label resolution/uniqueness and immediate ranges. HALT
// reachability is a separate check (validate_control_flow) so that
// fragments such as a self-loop still parse.
Program parse_program(std::string_view text, int word_width = 8,
                      std::string name = "");

// Checks the executability invariants required before simulation:
// exactly one HALT, reachable from instruction 0, and no control path
// falls off the end of the program. Throws ParseError.
void validate_control_flow(const Program& p);

// Canonical source text; parse_program(emit_program(p)) == p for valid p.
std::string emit_program(const Program& p);

// Canonical one-line text of a single instruction, e.g. "li r1, 5".
std::string canonical_text(const Instruction& ins);

}  // namespace sbst
