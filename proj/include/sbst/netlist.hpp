// Gate-level combinational netlists: the execute unit under test.
//
// Ports follow a bus naming convention: inputs op0..op2 (optional), a0..,
// b0..; outputs r0... A netlist without an op bus is "unit mode" and is
// driven by the UNIT instruction. Faults are pin-level stuck-at faults on
// gate inputs and outputs, uncollapsed.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sbst {

enum class GateKind : std::uint8_t { AND, OR, NOT, NAND, NOR, XOR, XNOR, BUF };

const char* gate_kind_name(GateKind k);
int gate_fanin(GateKind k);

struct Gate {
    std::string name;
    GateKind kind = GateKind::BUF;
    int out = -1;                  // net id
    std::array<int, 2> in{-1, -1}; // net ids; in[1] unused for fanin-1 kinds
};

struct Netlist {
    int width = 1;  // declared word width
    std::vector<std::string> net_names;
    std::vector<int> inputs;   // net ids, ordered op bus, a bus, b bus
    std::vector<int> outputs;  // net ids, r0..r{k-1}
    int op_bits = 0;
    int a_bits = 0;
    int b_bits = 0;
    int r_bits = 0;
    std::vector<Gate> gates;  // topological order

    bool unit_mode() const { return op_bits == 0; }
    int num_nets() const { return static_cast<int>(net_names.size()); }
};

enum class FaultPin : std::uint8_t { In1, In2, Out };
enum class Polarity : std::uint8_t { SA0, SA1 };

struct Fault {
    int gate_index = 0;  // index into Netlist::gates
    FaultPin pin = FaultPin::Out;
    Polarity polarity = Polarity::SA0;
    int id = 0;  // dense 0..F-1 in enumeration order
};

struct NetlistError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-based `.nl` format: `# comment`, `width N`, `input <name>...`,
// `output <name>...`, `gate <name> <KIND> <out> <in1> [<in2>]`.
// Gate order in the file is free; the result is topologically sorted.
Netlist load_netlist(std::string_view text);

// Reference execute unit with ports op[2:0], a/b/r[width-1:0] computing
// op 0=ADD 1=SUB 2=AND 3=OR 4=XOR 5=SLL 6=SRL 7=SLT (shift amount is
// b mod width; SLT is an unsigned compare producing r0).
Netlist build_reference_alu(int width);

// Fault universe in deterministic order: gate order, then pin order
// (in1, in2, out), SA0 before SA1. Size is sum over gates of (fanin+1)*2.
std::vector<Fault> enumerate_faults(const Netlist& n);

// "gatename/in1" style site string plus polarity helpers for reports.
std::string fault_site(const Netlist& n, const Fault& f);
const char* polarity_name(Polarity p);

// Reusable evaluation scratch; one per thread of execution.
class Evaluator {
  public:
    // inputs aligned with n.inputs; returns bits aligned with n.outputs.
    // The span returned stays valid until the next call.
    std::span<const std::uint8_t> eval(const Netlist& n,
                                       std::span<const std::uint8_t> inputs,
                                       const Fault* fault = nullptr);

  private:
    std::vector<std::uint8_t> values_;
    std::vector<std::uint8_t> out_;
};

// One-shot convenience wrapper around Evaluator.
std::vector<std::uint8_t> evaluate(const Netlist& n,
                                   std::span<const std::uint8_t> inputs,
                                   const Fault* fault = nullptr);

// True when the fault flips at least one output bit for this input
// pattern (detection at the unit boundary, ignoring bus propagation).
bool fault_observable(const Netlist& n, std::span<const std::uint8_t> inputs,
                      const Fault& f);

}  // namespace sbst
