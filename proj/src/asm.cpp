#include "sbst/asm.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace sbst {

namespace {

struct MnemonicInfo {
    Mnemonic m;
    const char* name;
};

const MnemonicInfo kMnemonics[] = {
    {Mnemonic::LI, "li"},   {Mnemonic::ADD, "add"}, {Mnemonic::SUB, "sub"},
    {Mnemonic::AND, "and"}, {Mnemonic::OR, "or"},   {Mnemonic::XOR, "xor"},
    {Mnemonic::SLL, "sll"}, {Mnemonic::SRL, "srl"}, {Mnemonic::SLT, "slt"},
    {Mnemonic::UNIT, "unit"}, {Mnemonic::LW, "lw"}, {Mnemonic::SW, "sw"},
    {Mnemonic::BEQ, "beq"}, {Mnemonic::BNE, "bne"}, {Mnemonic::J, "j"},
    {Mnemonic::NOP, "nop"}, {Mnemonic::HALT, "halt"},
};

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_label_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

bool valid_label_name(const std::string& s) {
    if (s.empty()) return false;
    if (std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), is_label_char);
}

// Comma/whitespace separated operand tokens; "imm(reg)" stays one token.
std::vector<std::string> split_operands(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int parse_register(const std::string& tok, int line) {
    std::string t = to_lower(tok);
    if (t.size() < 2 || t[0] != 'r')
        throw ParseError(line, "expected register, got '" + tok + "'");
    for (size_t i = 1; i < t.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(t[i])))
            throw ParseError(line, "expected register, got '" + tok + "'");
    int idx = std::stoi(t.substr(1));
    if (idx < 0 || idx >= kNumRegisters)
        throw ParseError(line, "register index out of range: '" + tok + "'");
    return idx;
}

std::int64_t parse_integer(const std::string& tok, int line) {
    std::string t = tok;
    bool neg = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
        neg = t[0] == '-';
        t = t.substr(1);
    }
    if (t.empty()) throw ParseError(line, "bad immediate '" + tok + "'");
    int base = 10;
    if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
        base = 16;
        t = t.substr(2);
    }
    std::int64_t v = 0;
    try {
        size_t pos = 0;
        v = std::stoll(t, &pos, base);
        if (pos != t.size())
            throw ParseError(line, "bad immediate '" + tok + "'");
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(line, "bad immediate '" + tok + "'");
    }
    return neg ? -v : v;
}

// Data immediates must fit the configured word width, signed or unsigned.
std::int32_t parse_data_imm(const std::string& tok, int word_width, int line) {
    std::int64_t v = parse_integer(tok, line);
    std::int64_t lo = -(std::int64_t(1) << (word_width - 1));
    std::int64_t hi = (std::int64_t(1) << word_width) - 1;
    if (word_width == 1) lo = -1;
    if (v < lo || v > hi)
        throw ParseError(line, "immediate out of range for " +
                                   std::to_string(word_width) +
                                   "-bit word: '" + tok + "'");
    return static_cast<std::int32_t>(v);
}

// Load/store offsets address the flat 16-bit bus space, independent of the
// word width.
std::int32_t parse_offset_imm(const std::string& tok, int line) {
    std::int64_t v = parse_integer(tok, line);
    if (v < -32768 || v > 65535)
        throw ParseError(line, "bus offset out of range: '" + tok + "'");
    return static_cast<std::int32_t>(v);
}

// "imm(rB)" -> (imm token, register token)
std::pair<std::string, std::string> split_mem_operand(const std::string& tok,
                                                      int line) {
    size_t open = tok.find('(');
    size_t close = tok.rfind(')');
    if (open == std::string::npos || close == std::string::npos ||
        close != tok.size() - 1 || open == 0 || close <= open + 1)
        throw ParseError(line, "expected offset(base), got '" + tok + "'");
    return {tok.substr(0, open), tok.substr(open + 1, close - open - 1)};
}

std::string parse_target(const std::string& tok, int line) {
    if (!valid_label_name(tok))
        throw ParseError(line, "bad label name '" + tok + "'");
    return tok;
}

void expect_operands(const std::vector<std::string>& ops, size_t n,
                     const std::string& mnem, int line) {
    if (ops.size() != n)
        throw ParseError(line, mnem + " expects " + std::to_string(n) +
                                   " operand(s), got " +
                                   std::to_string(ops.size()));
}

}  // namespace

void validate_control_flow(const Program& p) {
    if (p.instructions.empty())
        throw ParseError(0, "empty program has no halt instruction");
    int halt_at = -1;
    for (int i = 0; i < p.size(); ++i) {
        if (p.instructions[i].mnemonic == Mnemonic::HALT) {
            if (halt_at >= 0)
                throw ParseError(p.instructions[i].source_line,
                                 "multiple halt instructions");
            halt_at = i;
        }
    }
    if (halt_at < 0) throw ParseError(0, "program has no halt instruction");

    std::vector<char> seen(p.instructions.size(), 0);
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        if (seen[i]) continue;
        seen[i] = 1;
        const Instruction& ins = p.instructions[i];
        if (ins.mnemonic == Mnemonic::HALT) continue;
        if (ins.mnemonic == Mnemonic::J || ins.mnemonic == Mnemonic::BEQ ||
            ins.mnemonic == Mnemonic::BNE) {
            stack.push_back(p.labels.at(ins.target));
        }
        if (ins.mnemonic != Mnemonic::J) {
            if (i + 1 >= p.size())
                throw ParseError(ins.source_line,
                                 "control flow falls off the end of program");
            stack.push_back(i + 1);
        }
    }
    if (!seen[halt_at])
        throw ParseError(p.instructions[halt_at].source_line,
                         "halt instruction is unreachable");
}

const char* mnemonic_name(Mnemonic m) {
    for (const auto& mi : kMnemonics)
        if (mi.m == m) return mi.name;
    return "?";
}

bool is_alu_op(Mnemonic m) {
    switch (m) {
        case Mnemonic::ADD:
        case Mnemonic::SUB:
        case Mnemonic::AND:
        case Mnemonic::OR:
        case Mnemonic::XOR:
        case Mnemonic::SLL:
        case Mnemonic::SRL:
        case Mnemonic::SLT:
            return true;
        default:
            return false;
    }
}

int alu_opcode(Mnemonic m) {
    switch (m) {
        case Mnemonic::ADD: return 0;
        case Mnemonic::SUB: return 1;
        case Mnemonic::AND: return 2;
        case Mnemonic::OR: return 3;
        case Mnemonic::XOR: return 4;
        case Mnemonic::SLL: return 5;
        case Mnemonic::SRL: return 6;
        case Mnemonic::SLT: return 7;
        default: return -1;
    }
}

Mnemonic mnemonic_for_opcode(int opcode) {
    static const Mnemonic table[] = {Mnemonic::ADD, Mnemonic::SUB,
                                     Mnemonic::AND, Mnemonic::OR,
                                     Mnemonic::XOR, Mnemonic::SLL,
                                     Mnemonic::SRL, Mnemonic::SLT};
    if (opcode < 0 || opcode > 7)
        throw std::invalid_argument("opcode out of range");
    return table[opcode];
}

bool is_control_flow(Mnemonic m) {
    return m == Mnemonic::BEQ || m == Mnemonic::BNE || m == Mnemonic::J ||
           m == Mnemonic::HALT;
}

Program parse_program(std::string_view text, int word_width,
                      std::string name) {
    if (word_width < kMinWordWidth || word_width > kMaxWordWidth)
        throw ParseError(0, "word width must be in [1,16], got " +
                                std::to_string(word_width));
    Program p;
    p.name = std::move(name);
    p.word_width = word_width;

    std::vector<std::string> pending_labels;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        // label prefix, possibly alone on the line
        std::string line = raw;
        while (true) {
            size_t i = line.find_first_not_of(" \t\r");
            if (i == std::string::npos) {
                line.clear();
                break;
            }
            line.erase(0, i);
            size_t j = 0;
            while (j < line.size() && is_label_char(line[j])) ++j;
            if (j < line.size() && line[j] == ':') {
                std::string lab = line.substr(0, j);
                if (!valid_label_name(lab))
                    throw ParseError(line_no, "bad label name '" + lab + "'");
                if (p.labels.count(lab))
                    throw ParseError(line_no, "duplicate label '" + lab + "'");
                p.labels[lab] = p.size();  // next instruction
                pending_labels.push_back(lab);
                line.erase(0, j + 1);
                continue;
            }
            break;
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        std::istringstream ls(line);
        std::string mnem_tok;
        ls >> mnem_tok;
        std::string rest;
        std::getline(ls, rest);
        std::string mnem = to_lower(mnem_tok);

        const MnemonicInfo* info = nullptr;
        for (const auto& mi : kMnemonics)
            if (mnem == mi.name) {
                info = &mi;
                break;
            }
        if (!info)
            throw ParseError(line_no, "unknown mnemonic '" + mnem_tok + "'");

        std::vector<std::string> ops = split_operands(rest);
        Instruction ins;
        ins.mnemonic = info->m;
        ins.source_line = line_no;
        switch (info->m) {
            case Mnemonic::LI:
                expect_operands(ops, 2, mnem, line_no);
                ins.rd = parse_register(ops[0], line_no);
                ins.imm = parse_data_imm(ops[1], word_width, line_no);
                break;
            case Mnemonic::ADD:
            case Mnemonic::SUB:
            case Mnemonic::AND:
            case Mnemonic::OR:
            case Mnemonic::XOR:
            case Mnemonic::SLL:
            case Mnemonic::SRL:
            case Mnemonic::SLT:
            case Mnemonic::UNIT:
                expect_operands(ops, 3, mnem, line_no);
                ins.rd = parse_register(ops[0], line_no);
                ins.rs1 = parse_register(ops[1], line_no);
                ins.rs2 = parse_register(ops[2], line_no);
                break;
            case Mnemonic::LW: {
                expect_operands(ops, 2, mnem, line_no);
                ins.rd = parse_register(ops[0], line_no);
                auto [imm_tok, base_tok] = split_mem_operand(ops[1], line_no);
                ins.imm = parse_offset_imm(imm_tok, line_no);
                ins.rs1 = parse_register(base_tok, line_no);
                break;
            }
            case Mnemonic::SW: {
                expect_operands(ops, 2, mnem, line_no);
                ins.rs1 = parse_register(ops[0], line_no);
                auto [imm_tok, base_tok] = split_mem_operand(ops[1], line_no);
                ins.imm = parse_offset_imm(imm_tok, line_no);
                ins.rs2 = parse_register(base_tok, line_no);
                break;
            }
            case Mnemonic::BEQ:
            case Mnemonic::BNE:
                expect_operands(ops, 3, mnem, line_no);
                ins.rs1 = parse_register(ops[0], line_no);
                ins.rs2 = parse_register(ops[1], line_no);
                ins.target = parse_target(ops[2], line_no);
                break;
            case Mnemonic::J:
                expect_operands(ops, 1, mnem, line_no);
                ins.target = parse_target(ops[0], line_no);
                break;
            case Mnemonic::NOP:
            case Mnemonic::HALT:
                expect_operands(ops, 0, mnem, line_no);
                break;
        }
        p.instructions.push_back(std::move(ins));
        pending_labels.clear();
    }

    if (!pending_labels.empty())
        throw ParseError(line_no, "label '" + pending_labels.front() +
                                      "' has no following instruction");

    for (const Instruction& ins : p.instructions) {
        if (!ins.target.empty() && !p.labels.count(ins.target))
            throw ParseError(ins.source_line,
                             "unresolved label '" + ins.target + "'");
    }
    return p;
}

std::string canonical_text(const Instruction& ins) {
    std::ostringstream os;
    os << mnemonic_name(ins.mnemonic);
    auto reg = [](int r) { return "r" + std::to_string(r); };
    switch (ins.mnemonic) {
        case Mnemonic::LI:
            os << " " << reg(ins.rd) << ", " << ins.imm;
            break;
        case Mnemonic::ADD:
        case Mnemonic::SUB:
        case Mnemonic::AND:
        case Mnemonic::OR:
        case Mnemonic::XOR:
        case Mnemonic::SLL:
        case Mnemonic::SRL:
        case Mnemonic::SLT:
        case Mnemonic::UNIT:
            os << " " << reg(ins.rd) << ", " << reg(ins.rs1) << ", "
               << reg(ins.rs2);
            break;
        case Mnemonic::LW:
            os << " " << reg(ins.rd) << ", " << ins.imm << "(" << reg(ins.rs1)
               << ")";
            break;
        case Mnemonic::SW:
            os << " " << reg(ins.rs1) << ", " << ins.imm << "(" << reg(ins.rs2)
               << ")";
            break;
        case Mnemonic::BEQ:
        case Mnemonic::BNE:
            os << " " << reg(ins.rs1) << ", " << reg(ins.rs2) << ", "
               << ins.target;
            break;
        case Mnemonic::J:
            os << " " << ins.target;
            break;
        case Mnemonic::NOP:
        case Mnemonic::HALT:
            break;
    }
    return os.str();
}

std::string emit_program(const Program& p) {
    // labels grouped by target index; map iteration keeps emission stable
    std::vector<std::vector<std::string>> labels_at(p.instructions.size() + 1);
    for (const auto& [name, idx] : p.labels)
        if (idx >= 0 && idx <= p.size()) labels_at[idx].push_back(name);

    std::ostringstream os;
    for (int i = 0; i < p.size(); ++i) {
        for (const auto& lab : labels_at[i]) os << lab << ":\n";
        os << "    " << canonical_text(p.instructions[i]) << "\n";
    }
    return os.str();
}

}  // namespace sbst
