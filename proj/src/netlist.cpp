#include "sbst/netlist.hpp"

#include "sbst/asm.hpp"  // word-width bounds shared with the ISA

#include <algorithm>
#include <cctype>
#include <map>
#include <queue>
#include <sstream>

namespace sbst {

namespace {

struct KindInfo {
    GateKind kind;
    const char* name;
    int fanin;
};

const KindInfo kKinds[] = {
    {GateKind::AND, "AND", 2},   {GateKind::OR, "OR", 2},
    {GateKind::NOT, "NOT", 1},   {GateKind::NAND, "NAND", 2},
    {GateKind::NOR, "NOR", 2},   {GateKind::XOR, "XOR", 2},
    {GateKind::XNOR, "XNOR", 2}, {GateKind::BUF, "BUF", 1},
};

const KindInfo* kind_by_name(const std::string& s) {
    std::string u = s;
    std::transform(u.begin(), u.end(), u.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    for (const auto& k : kKinds)
        if (u == k.name) return &k;
    return nullptr;
}

inline std::uint8_t apply_gate(GateKind k, std::uint8_t a, std::uint8_t b) {
    switch (k) {
        case GateKind::AND: return a & b;
        case GateKind::OR: return a | b;
        case GateKind::NOT: return !a;
        case GateKind::NAND: return !(a & b);
        case GateKind::NOR: return !(a | b);
        case GateKind::XOR: return a ^ b;
        case GateKind::XNOR: return !(a ^ b);
        case GateKind::BUF: return a;
    }
    return 0;
}

// Parses a bus port name: returns bus index or -1 if `name` is not
// `prefix` followed by a decimal index.
int bus_index(const std::string& name, const char* prefix) {
    size_t plen = std::string(prefix).size();
    if (name.size() <= plen || name.compare(0, plen, prefix) != 0) return -1;
    for (size_t i = plen; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
    // reject things like a01
    if (name[plen] == '0' && name.size() > plen + 1) return -1;
    return std::stoi(name.substr(plen));
}

struct NetTable {
    std::map<std::string, int> ids;
    std::vector<std::string> names;
    int intern(const std::string& name) {
        auto it = ids.find(name);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(names.size());
        ids.emplace(name, id);
        names.push_back(name);
        return id;
    }
};

// Collects bus ports named prefix0..prefixK-1, checking contiguity.
std::vector<std::string> collect_bus(const std::vector<std::string>& ports,
                                     const char* prefix) {
    std::map<int, std::string> found;
    for (const auto& p : ports) {
        int idx = bus_index(p, prefix);
        if (idx < 0) continue;
        if (found.count(idx))
            throw NetlistError("duplicate port '" + p + "'");
        found[idx] = p;
    }
    std::vector<std::string> out;
    for (int i = 0; i < static_cast<int>(found.size()); ++i) {
        auto it = found.find(i);
        if (it == found.end())
            throw NetlistError(std::string("bus '") + prefix +
                               "' has a gap at index " + std::to_string(i));
        out.push_back(it->second);
    }
    return out;
}

void topo_sort_and_validate(Netlist& n) {
    const int nets = n.num_nets();
    std::vector<int> driver(nets, -1);  // gate index driving each net
    std::vector<char> is_input(nets, 0);
    for (int id : n.inputs) is_input[id] = 1;

    for (size_t g = 0; g < n.gates.size(); ++g) {
        int out = n.gates[g].out;
        if (is_input[out])
            throw NetlistError("gate '" + n.gates[g].name +
                               "' drives input port '" + n.net_names[out] +
                               "'");
        if (driver[out] >= 0)
            throw NetlistError("net '" + n.net_names[out] +
                               "' driven more than once");
        driver[out] = static_cast<int>(g);
    }
    for (const Gate& g : n.gates)
        for (int k = 0; k < gate_fanin(g.kind); ++k) {
            int in = g.in[k];
            if (!is_input[in] && driver[in] < 0)
                throw NetlistError("undriven net '" + n.net_names[in] +
                                   "' used by gate '" + g.name + "'");
        }
    for (int id : n.outputs)
        if (driver[id] < 0)
            throw NetlistError("output port '" + n.net_names[id] +
                               "' is not driven");

    // Kahn's algorithm, stable on declaration order.
    std::vector<int> missing(n.gates.size(), 0);
    std::vector<std::vector<int>> consumers(nets);
    for (size_t g = 0; g < n.gates.size(); ++g)
        for (int k = 0; k < gate_fanin(n.gates[g].kind); ++k) {
            int in = n.gates[g].in[k];
            if (!is_input[in]) {
                ++missing[g];
                consumers[in].push_back(static_cast<int>(g));
            }
        }
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (size_t g = 0; g < n.gates.size(); ++g)
        if (missing[g] == 0) ready.push(static_cast<int>(g));
    std::vector<int> order;
    order.reserve(n.gates.size());
    while (!ready.empty()) {
        int g = ready.top();
        ready.pop();
        order.push_back(g);
        for (int c : consumers[n.gates[g].out])
            if (--missing[c] == 0) ready.push(c);
    }
    if (order.size() != n.gates.size())
        throw NetlistError("combinational cycle detected");

    std::vector<Gate> sorted;
    sorted.reserve(n.gates.size());
    for (int g : order) sorted.push_back(std::move(n.gates[g]));
    n.gates = std::move(sorted);
}

void finalize_ports(Netlist& n, const std::vector<std::string>& input_names,
                    const std::vector<std::string>& output_names,
                    int declared_width) {
    for (const auto& p : input_names)
        if (bus_index(p, "op") < 0 && bus_index(p, "a") < 0 &&
            bus_index(p, "b") < 0)
            throw NetlistError("input port '" + p +
                               "' is not an op/a/b bus name");
    for (const auto& p : output_names)
        if (bus_index(p, "r") < 0)
            throw NetlistError("output port '" + p + "' is not an r bus name");

    auto op = collect_bus(input_names, "op");
    auto a = collect_bus(input_names, "a");
    auto b = collect_bus(input_names, "b");
    auto r = collect_bus(output_names, "r");
    if (op.size() + a.size() + b.size() != input_names.size())
        throw NetlistError("duplicate input port declaration");
    if (r.size() != output_names.size())
        throw NetlistError("duplicate output port declaration");
    if (op.size() > 3)
        throw NetlistError("op bus wider than 3 bits");
    if (a.empty())
        throw NetlistError("netlist has no a bus");
    if (r.empty())
        throw NetlistError("netlist has no outputs");

    NetTable table;
    for (auto& name : n.net_names) table.intern(name);  // already interned
    n.inputs.clear();
    for (const auto& p : op) n.inputs.push_back(table.ids.at(p));
    for (const auto& p : a) n.inputs.push_back(table.ids.at(p));
    for (const auto& p : b) n.inputs.push_back(table.ids.at(p));
    n.outputs.clear();
    for (const auto& p : r) n.outputs.push_back(table.ids.at(p));
    n.op_bits = static_cast<int>(op.size());
    n.a_bits = static_cast<int>(a.size());
    n.b_bits = static_cast<int>(b.size());
    n.r_bits = static_cast<int>(r.size());

    int max_bus = std::max({n.a_bits, n.b_bits, n.r_bits});
    if (max_bus > kMaxWordWidth)
        throw NetlistError("bus wider than 16 bits");
    if (declared_width > 0 && declared_width != max_bus)
        throw NetlistError("declared width " + std::to_string(declared_width) +
                           " does not match widest bus (" +
                           std::to_string(max_bus) + ")");
    n.width = declared_width > 0 ? declared_width : max_bus;
}

}  // namespace

const char* gate_kind_name(GateKind k) {
    for (const auto& ki : kKinds)
        if (ki.kind == k) return ki.name;
    return "?";
}

int gate_fanin(GateKind k) {
    return (k == GateKind::NOT || k == GateKind::BUF) ? 1 : 2;
}

Netlist load_netlist(std::string_view text) {
    Netlist n;
    NetTable table;
    std::vector<std::string> input_names, output_names;
    std::map<std::string, int> gate_names;
    int declared_width = 0;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        std::istringstream ls(raw);
        std::string word;
        if (!(ls >> word)) continue;
        auto err = [&](const std::string& msg) {
            throw NetlistError("line " + std::to_string(line_no) + ": " + msg);
        };
        if (word == "width") {
            int w = 0;
            if (!(ls >> w) || w < kMinWordWidth || w > kMaxWordWidth)
                err("bad width");
            declared_width = w;
        } else if (word == "input") {
            std::string p;
            while (ls >> p) {
                input_names.push_back(p);
                table.intern(p);
            }
        } else if (word == "output") {
            std::string p;
            while (ls >> p) {
                output_names.push_back(p);
                table.intern(p);
            }
        } else if (word == "gate") {
            std::string name, kind_tok, out_tok;
            if (!(ls >> name >> kind_tok >> out_tok)) err("bad gate line");
            const KindInfo* ki = kind_by_name(kind_tok);
            if (!ki) err("unknown gate kind '" + kind_tok + "'");
            if (gate_names.count(name)) err("duplicate gate '" + name + "'");
            gate_names[name] = 1;
            Gate g;
            g.name = name;
            g.kind = ki->kind;
            g.out = table.intern(out_tok);
            std::string in_tok;
            int count = 0;
            while (ls >> in_tok) {
                if (count >= ki->fanin) err("too many inputs for " + kind_tok);
                g.in[count++] = table.intern(in_tok);
            }
            if (count != ki->fanin)
                err("gate '" + name + "' expects " +
                    std::to_string(ki->fanin) + " input(s)");
            n.gates.push_back(std::move(g));
        } else {
            err("unknown directive '" + word + "'");
        }
    }

    n.net_names = table.names;
    finalize_ports(n, input_names, output_names, declared_width);
    topo_sort_and_validate(n);
    return n;
}

std::vector<Fault> enumerate_faults(const Netlist& n) {
    std::vector<Fault> out;
    int id = 0;
    for (size_t g = 0; g < n.gates.size(); ++g) {
        int fanin = gate_fanin(n.gates[g].kind);
        FaultPin pins2[] = {FaultPin::In1, FaultPin::In2, FaultPin::Out};
        FaultPin pins1[] = {FaultPin::In1, FaultPin::Out};
        auto* pins = fanin == 2 ? pins2 : pins1;
        int npins = fanin + 1;
        for (int p = 0; p < npins; ++p)
            for (Polarity pol : {Polarity::SA0, Polarity::SA1})
                out.push_back(
                    {static_cast<int>(g), pins[p], pol, id++});
    }
    return out;
}

std::string fault_site(const Netlist& n, const Fault& f) {
    const char* pin = f.pin == FaultPin::In1   ? "in1"
                      : f.pin == FaultPin::In2 ? "in2"
                                               : "out";
    return n.gates[f.gate_index].name + "/" + pin;
}

const char* polarity_name(Polarity p) {
    return p == Polarity::SA0 ? "SA0" : "SA1";
}

std::span<const std::uint8_t> Evaluator::eval(
    const Netlist& n, std::span<const std::uint8_t> inputs,
    const Fault* fault) {
    if (inputs.size() != n.inputs.size())
        throw NetlistError("expected " + std::to_string(n.inputs.size()) +
                           " input bits, got " + std::to_string(inputs.size()));
    values_.resize(n.num_nets());
    for (size_t i = 0; i < inputs.size(); ++i)
        values_[n.inputs[i]] = inputs[i] ? 1 : 0;

    if (!fault) {
        for (const Gate& g : n.gates)
            values_[g.out] =
                apply_gate(g.kind, values_[g.in[0]],
                           g.in[1] >= 0 ? values_[g.in[1]] : 0);
    } else {
        const int fg = fault->gate_index;
        const std::uint8_t fv = fault->polarity == Polarity::SA1 ? 1 : 0;
        for (size_t gi = 0; gi < n.gates.size(); ++gi) {
            const Gate& g = n.gates[gi];
            std::uint8_t a = values_[g.in[0]];
            std::uint8_t b = g.in[1] >= 0 ? values_[g.in[1]] : 0;
            if (static_cast<int>(gi) == fg) {
                if (fault->pin == FaultPin::In1) a = fv;
                if (fault->pin == FaultPin::In2) b = fv;
            }
            std::uint8_t v = apply_gate(g.kind, a, b);
            if (static_cast<int>(gi) == fg && fault->pin == FaultPin::Out)
                v = fv;
            values_[g.out] = v;
        }
    }

    out_.resize(n.outputs.size());
    for (size_t i = 0; i < n.outputs.size(); ++i)
        out_[i] = values_[n.outputs[i]];
    return {out_.data(), out_.size()};
}

std::vector<std::uint8_t> evaluate(const Netlist& n,
                                   std::span<const std::uint8_t> inputs,
                                   const Fault* fault) {
    Evaluator ev;
    auto s = ev.eval(n, inputs, fault);
    return {s.begin(), s.end()};
}

bool fault_observable(const Netlist& n, std::span<const std::uint8_t> inputs,
                      const Fault& f) {
    Evaluator ev;
    auto g = ev.eval(n, inputs, nullptr);
    std::vector<std::uint8_t> golden(g.begin(), g.end());
    auto fy = ev.eval(n, inputs, &f);
    for (size_t i = 0; i < golden.size(); ++i)
        if (golden[i] != fy[i]) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Reference ALU construction
// ---------------------------------------------------------------------------

namespace {

// Incremental netlist builder; gate names double as output net names.
struct AluBuilder {
    Netlist n;
    NetTable table;

    int net(const std::string& name) { return table.intern(name); }

    int gate(GateKind k, const std::string& name, int in0, int in1 = -1) {
        Gate g;
        g.name = name;
        g.kind = k;
        g.out = table.intern(name);
        g.in[0] = in0;
        g.in[1] = in1;
        n.gates.push_back(std::move(g));
        return n.gates.back().out;
    }

    // 2:1 mux; when `name_is_output` the OR gate drives an output net with
    // that exact name.
    int mux(int sel, int nsel, int x0, int x1, const std::string& base) {
        int p = gate(GateKind::AND, base + "_a", x0, nsel);
        int q = gate(GateKind::AND, base + "_b", x1, sel);
        return gate(GateKind::OR, base, p, q);
    }
};

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int bit_length(int v) {
    int n = 0;
    while (v > 0) {
        ++n;
        v >>= 1;
    }
    return n;
}

// Shift-amount nets: b mod width. Power-of-two widths take the low bits of
// b directly; otherwise a restoring conditional-subtract cascade computes
// the remainder in gates.
std::vector<int> build_mod_width(AluBuilder& bld, const std::vector<int>& b,
                                 int width, int zero_net) {
    int sel_bits = bit_length(width - 1);
    if (sel_bits == 0) return {};
    if (is_power_of_two(width))
        return std::vector<int>(b.begin(), b.begin() + sel_bits);

    int w = static_cast<int>(b.size());
    std::vector<int> rem = b;
    int stage = 0;
    for (int k = bit_length((1 << w) - 1); k >= 0; --k) {
        long long c = static_cast<long long>(width) << k;
        if (c >= (1LL << w)) continue;
        std::string pre = "mod" + std::to_string(stage++);
        // rem - c with a ripple borrow chain; constant bits folded in
        std::vector<int> diff(w), borrow(w);
        for (int i = 0; i < w; ++i) {
            std::string bi = pre + "_" + std::to_string(i);
            int cbit = static_cast<int>((c >> i) & 1);
            int bin = i == 0 ? zero_net : borrow[i - 1];
            int nr = bld.gate(GateKind::NOT, bi + "_nr", rem[i]);
            if (cbit == 0) {
                diff[i] = bld.gate(GateKind::XOR, bi + "_d", rem[i], bin);
                borrow[i] = bld.gate(GateKind::AND, bi + "_bo", nr, bin);
            } else {
                diff[i] = bld.gate(GateKind::XNOR, bi + "_d", rem[i], bin);
                borrow[i] = bld.gate(GateKind::OR, bi + "_bo", nr, bin);
            }
        }
        // no final borrow means rem >= c: keep the difference
        int ge = bld.gate(GateKind::NOT, pre + "_ge", borrow[w - 1]);
        std::vector<int> next(w);
        for (int i = 0; i < w; ++i)
            next[i] = bld.mux(ge, borrow[w - 1], rem[i], diff[i],
                              pre + "_r" + std::to_string(i));
        rem = next;
    }
    rem.resize(sel_bits);
    return rem;
}

// Logarithmic shifter; `left` selects direction, zero fill.
std::vector<int> build_shifter(AluBuilder& bld, const std::vector<int>& a,
                               const std::vector<int>& sel, bool left,
                               const std::string& pre) {
    int w = static_cast<int>(a.size());
    std::vector<int> cur = a;
    for (size_t j = 0; j < sel.size(); ++j) {
        int shift = 1 << j;
        std::string sp = pre + std::to_string(j);
        int nsel = bld.gate(GateKind::NOT, sp + "_ns", sel[j]);
        std::vector<int> next(w);
        for (int i = 0; i < w; ++i) {
            int from = left ? i - shift : i + shift;
            std::string base = sp + "_" + std::to_string(i);
            if (from >= 0 && from < w)
                next[i] = bld.mux(sel[j], nsel, cur[i], cur[from], base);
            else
                next[i] = bld.gate(GateKind::AND, base, cur[i], nsel);
        }
        cur = next;
    }
    return cur;
}

}  // namespace

Netlist build_reference_alu(int width) {
    if (width < kMinWordWidth || width > kMaxWordWidth)
        throw NetlistError("alu width must be in [1,16]");

    AluBuilder bld;
    std::vector<int> op(3), a(width), b(width);
    for (int i = 0; i < 3; ++i) op[i] = bld.net("op" + std::to_string(i));
    for (int i = 0; i < width; ++i) a[i] = bld.net("a" + std::to_string(i));
    for (int i = 0; i < width; ++i) b[i] = bld.net("b" + std::to_string(i));

    auto idx = [](const std::string& s, int i) {
        return s + std::to_string(i);
    };

    // shared per-bit XOR / AND terms double as the XOR and AND results
    std::vector<int> t(width), u(width);
    for (int i = 0; i < width; ++i) {
        t[i] = bld.gate(GateKind::XOR, idx("xr", i), a[i], b[i]);
        u[i] = bld.gate(GateKind::AND, idx("an", i), a[i], b[i]);
    }

    // adder (ripple carry)
    std::vector<int> sum(width);
    int carry = -1;
    for (int i = 0; i < width; ++i) {
        if (i == 0) {
            sum[0] = t[0];
            carry = u[0];
        } else {
            sum[i] = bld.gate(GateKind::XOR, idx("add_s", i), t[i], carry);
            if (i + 1 < width) {
                int v = bld.gate(GateKind::AND, idx("add_v", i), t[i], carry);
                carry = bld.gate(GateKind::OR, idx("add_c", i), u[i], v);
            }
        }
    }

    // subtractor (ripple borrow); final borrow is the unsigned a<b flag
    std::vector<int> diff(width);
    int borrow = -1;
    for (int i = 0; i < width; ++i) {
        int na = bld.gate(GateKind::NOT, idx("sub_na", i), a[i]);
        if (i == 0) {
            diff[0] = t[0];
            borrow = bld.gate(GateKind::AND, "sub_b0", na, b[0]);
        } else {
            diff[i] = bld.gate(GateKind::XOR, idx("sub_d", i), t[i], borrow);
            int nt = bld.gate(GateKind::NOT, idx("sub_nt", i), t[i]);
            int x = bld.gate(GateKind::AND, idx("sub_x", i), na, b[i]);
            int y = bld.gate(GateKind::AND, idx("sub_y", i), nt, borrow);
            borrow = bld.gate(GateKind::OR, idx("sub_b", i), x, y);
        }
    }

    std::vector<int> ors(width);
    for (int i = 0; i < width; ++i)
        ors[i] = bld.gate(GateKind::OR, idx("or", i), a[i], b[i]);

    int zero = -1;
    if (width > 1) zero = bld.gate(GateKind::XOR, "zero", a[0], a[0]);

    std::vector<int> shamt = build_mod_width(bld, b, width, zero);
    std::vector<int> sll = build_shifter(bld, a, shamt, true, "sll");
    std::vector<int> srl = build_shifter(bld, a, shamt, false, "srl");

    std::vector<int> slt(width, zero);
    slt[0] = borrow;

    int nop0 = bld.gate(GateKind::NOT, "nop0", op[0]);
    int nop1 = bld.gate(GateKind::NOT, "nop1", op[1]);
    int nop2 = bld.gate(GateKind::NOT, "nop2", op[2]);

    for (int i = 0; i < width; ++i) {
        std::string bi = std::to_string(i);
        int p0 = bld.mux(op[0], nop0, sum[i], diff[i], "m0a_" + bi);
        int p1 = bld.mux(op[0], nop0, u[i], ors[i], "m0b_" + bi);
        int p2 = bld.mux(op[0], nop0, t[i], sll[i], "m0c_" + bi);
        int p3 = bld.mux(op[0], nop0, srl[i], slt[i], "m0d_" + bi);
        int q0 = bld.mux(op[1], nop1, p0, p1, "m1a_" + bi);
        int q1 = bld.mux(op[1], nop1, p2, p3, "m1b_" + bi);
        bld.mux(op[2], nop2, q0, q1, "r" + bi);
    }

    Netlist& n = bld.n;
    n.net_names = bld.table.names;
    std::vector<std::string> input_names, output_names;
    for (int i = 0; i < 3; ++i) input_names.push_back("op" + std::to_string(i));
    for (int i = 0; i < width; ++i)
        input_names.push_back("a" + std::to_string(i));
    for (int i = 0; i < width; ++i)
        input_names.push_back("b" + std::to_string(i));
    for (int i = 0; i < width; ++i)
        output_names.push_back("r" + std::to_string(i));
    finalize_ports(n, input_names, output_names, width);
    topo_sort_and_validate(n);
    return n;
}

}  // namespace sbst
