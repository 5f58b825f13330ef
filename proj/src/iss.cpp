#include "sbst/iss.hpp"

#include <sstream>

namespace sbst {

namespace {

constexpr std::uint32_t kBusMask = (1u << kBusAddressBits) - 1;

}  // namespace

Machine::Machine(const Program& p, const Netlist& n)
    : p_(&p), n_(&n), mask_((1u << p.word_width) - 1),
      mem_(std::size_t{1} << kBusAddressBits, 0) {
    if (n.op_bits != 0 && n.op_bits != 3)
        throw IssError("netlist op bus must be absent or 3 bits wide");
    if (!n.unit_mode()) {
        if (n.a_bits != p.word_width || n.b_bits != p.word_width ||
            n.r_bits != p.word_width)
            throw IssError("netlist bus width " + std::to_string(n.a_bits) +
                           " does not match word width " +
                           std::to_string(p.word_width));
    } else {
        if (n.a_bits > p.word_width || n.b_bits > p.word_width ||
            n.r_bits > p.word_width)
            throw IssError("unit netlist buses wider than the word width");
    }
    unit_in_.resize(n.inputs.size());

    targets_.assign(p.instructions.size(), -1);
    for (size_t i = 0; i < p.instructions.size(); ++i) {
        const std::string& t = p.instructions[i].target;
        if (t.empty()) continue;
        auto it = p.labels.find(t);
        if (it == p.labels.end())
            throw IssError("unresolved label '" + t + "'");
        targets_[i] = it->second;
    }
}

void Machine::reset() {
    regs_.fill(0);
    for (std::uint32_t a : dirty_) mem_[a] = 0;
    dirty_.clear();
    pc_ = 0;
    cc_ = 0;
    halted_ = false;
}

void Machine::write_reg(int rd, std::uint32_t v) {
    if (rd != 0) regs_[rd] = v & mask_;
}

// Drives the unit inputs already staged in unit_in_ and packs the result bus.
std::uint32_t Machine::run_unit(const Fault* fault) {
    auto out = ev_.eval(*n_, unit_in_, fault);
    std::uint32_t r = 0;
    for (size_t i = 0; i < out.size(); ++i)
        if (out[i]) r |= 1u << i;
    return r;
}

StepResult Machine::step(const Fault* fault,
                         std::vector<std::uint8_t>* pattern_out) {
    if (halted_) throw IssError("step on a halted machine");
    if (pc_ < 0 || pc_ >= p_->size())
        throw IssError("program counter fell off the program (pc=" +
                       std::to_string(pc_) + ")");
    const Instruction& ins = p_->instructions[pc_];
    StepResult res;
    res.pc = pc_;
    ++cc_;
    if (pattern_out) pattern_out->clear();

    bool used_unit = false;
    switch (ins.mnemonic) {
        case Mnemonic::LI:
            write_reg(ins.rd, static_cast<std::uint32_t>(ins.imm));
            ++pc_;
            break;
        case Mnemonic::ADD:
        case Mnemonic::SUB:
        case Mnemonic::AND:
        case Mnemonic::OR:
        case Mnemonic::XOR:
        case Mnemonic::SLL:
        case Mnemonic::SRL:
        case Mnemonic::SLT: {
            if (n_->unit_mode())
                throw IssError("ALU instruction needs an op-bus netlist");
            int opc = alu_opcode(ins.mnemonic);
            std::uint32_t a = regs_[ins.rs1], b = regs_[ins.rs2];
            size_t k = 0;
            for (int i = 0; i < 3; ++i)
                unit_in_[k++] = static_cast<std::uint8_t>((opc >> i) & 1);
            for (int i = 0; i < n_->a_bits; ++i)
                unit_in_[k++] = static_cast<std::uint8_t>((a >> i) & 1);
            for (int i = 0; i < n_->b_bits; ++i)
                unit_in_[k++] = static_cast<std::uint8_t>((b >> i) & 1);
            write_reg(ins.rd, run_unit(fault));
            used_unit = true;
            ++pc_;
            break;
        }
        case Mnemonic::UNIT: {
            if (!n_->unit_mode())
                throw IssError("UNIT instruction on an op-bus netlist");
            std::uint32_t a = regs_[ins.rs1], b = regs_[ins.rs2];
            size_t k = 0;
            for (int i = 0; i < n_->a_bits; ++i)
                unit_in_[k++] = static_cast<std::uint8_t>((a >> i) & 1);
            for (int i = 0; i < n_->b_bits; ++i)
                unit_in_[k++] = static_cast<std::uint8_t>((b >> i) & 1);
            write_reg(ins.rd, run_unit(fault));
            used_unit = true;
            ++pc_;
            break;
        }
        case Mnemonic::LW: {
            std::uint32_t addr =
                (regs_[ins.rs1] + static_cast<std::uint32_t>(ins.imm)) &
                kBusMask;
            std::uint32_t data = mem_[addr];
            write_reg(ins.rd, data);
            res.bus_event = BusEvent{addr, data, false};
            ++pc_;
            break;
        }
        case Mnemonic::SW: {
            std::uint32_t addr =
                (regs_[ins.rs2] + static_cast<std::uint32_t>(ins.imm)) &
                kBusMask;
            std::uint32_t data = regs_[ins.rs1];
            mem_[addr] = static_cast<std::uint16_t>(data);
            dirty_.push_back(addr);
            res.bus_event = BusEvent{addr, data, true};
            ++pc_;
            break;
        }
        case Mnemonic::BEQ:
            pc_ = regs_[ins.rs1] == regs_[ins.rs2] ? targets_[pc_] : pc_ + 1;
            break;
        case Mnemonic::BNE:
            pc_ = regs_[ins.rs1] != regs_[ins.rs2] ? targets_[pc_] : pc_ + 1;
            break;
        case Mnemonic::J:
            pc_ = targets_[pc_];
            break;
        case Mnemonic::NOP:
            ++pc_;
            break;
        case Mnemonic::HALT:
            halted_ = true;
            break;
    }
    if (used_unit && pattern_out)
        pattern_out->assign(unit_in_.begin(), unit_in_.end());
    return res;
}

TraceReport run(const Program& p, const Netlist& n, const Fault* fault,
                int max_cycles) {
    if (max_cycles < 1) throw IssError("max_cycles must be positive");
    Machine m(p, n);
    TraceReport rep;
    rep.program_name = p.name;
    std::vector<std::uint8_t> pattern;
    while (!m.halted() && m.cc() < max_cycles) {
        StepResult sr = m.step(fault, &pattern);
        TraceRecord rec;
        rec.cc = m.cc();
        rec.pc = sr.pc;
        rec.di = canonical_text(p.instructions[sr.pc]);
        rec.pattern = pattern;
        rec.bus_event = sr.bus_event;
        rep.records.push_back(std::move(rec));
    }
    rep.terminated = m.halted() ? Termination::Halt : Termination::CycleLimit;
    return rep;
}

std::string trace_to_csv(const TraceReport& r) {
    std::ostringstream out;
    out << "cc,pc,di,pattern,bus_addr,bus_data,bus_we\n";
    for (const TraceRecord& rec : r.records) {
        out << rec.cc << ',' << rec.pc << ",\"" << rec.di << "\",";
        for (std::uint8_t b : rec.pattern) out << (b ? '1' : '0');
        out << ',';
        if (rec.bus_event) {
            out << rec.bus_event->addr << ',' << rec.bus_event->data << ','
                << (rec.bus_event->is_write ? 1 : 0);
        } else {
            out << ",,";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace sbst
