#include "sbst/cfg.hpp"

#include <algorithm>
#include <sstream>

namespace sbst {

namespace {

// Successor block ids in the block graph. HALT has none, J only its target,
// conditional branches both target and fall-through.
std::vector<int> block_successors(const Program& p,
                                  const std::vector<BasicBlock>& bbs,
                                  const std::vector<int>& block_of_index,
                                  int b) {
    std::vector<int> succ;
    const Instruction& last = p.instructions[bbs[b].end];
    switch (last.mnemonic) {
        case Mnemonic::HALT:
            break;
        case Mnemonic::J:
            succ.push_back(block_of_index[p.labels.at(last.target)]);
            break;
        case Mnemonic::BEQ:
        case Mnemonic::BNE:
            succ.push_back(block_of_index[p.labels.at(last.target)]);
            if (bbs[b].end + 1 < p.size())
                succ.push_back(block_of_index[bbs[b].end + 1]);
            break;
        default:
            if (bbs[b].end + 1 < p.size())
                succ.push_back(block_of_index[bbs[b].end + 1]);
            break;
    }
    return succ;
}

}  // namespace

std::vector<BasicBlock> partition_basic_blocks(const Program& p) {
    if (p.instructions.empty()) return {};
    std::set<int> leaders;
    leaders.insert(0);
    for (const auto& [name, idx] : p.labels)
        if (idx < p.size()) leaders.insert(idx);
    for (int i = 0; i < p.size(); ++i) {
        const Instruction& ins = p.instructions[i];
        if (!ins.target.empty()) leaders.insert(p.labels.at(ins.target));
        if (is_control_flow(ins.mnemonic) && i + 1 < p.size())
            leaders.insert(i + 1);
    }

    std::set<int> targets;
    for (const Instruction& ins : p.instructions)
        if (!ins.target.empty()) targets.insert(p.labels.at(ins.target));

    std::vector<BasicBlock> bbs;
    std::vector<int> sorted(leaders.begin(), leaders.end());
    for (size_t k = 0; k < sorted.size(); ++k) {
        BasicBlock b;
        b.id = static_cast<int>(k);
        b.start = sorted[k];
        b.end = (k + 1 < sorted.size()) ? sorted[k + 1] - 1 : p.size() - 1;
        b.is_branch_target = targets.count(b.start) != 0;
        b.ends_in_control_flow =
            is_control_flow(p.instructions[b.end].mnemonic);
        bbs.push_back(b);
    }
    return bbs;
}

AdmissibleRegion find_admissible_region(const Program& p,
                                        const std::vector<BasicBlock>& bbs) {
    std::vector<int> block_of_index(p.instructions.size(), 0);
    for (const BasicBlock& b : bbs)
        for (int i = b.start; i <= b.end; ++i) block_of_index[i] = b.id;

    // Everything reachable from the head of a back edge may execute more
    // than once; exclude it conservatively.
    std::vector<char> multi(bbs.size(), 0);
    std::vector<int> work;
    for (const BasicBlock& b : bbs)
        for (int s : block_successors(p, bbs, block_of_index, b.id))
            if (bbs[s].start <= b.start && !multi[s]) {
                multi[s] = 1;
                work.push_back(s);
            }
    while (!work.empty()) {
        int b = work.back();
        work.pop_back();
        for (int s : block_successors(p, bbs, block_of_index, b))
            if (!multi[s]) {
                multi[s] = 1;
                work.push_back(s);
            }
    }

    AdmissibleRegion region;
    for (const BasicBlock& b : bbs) {
        if (b.id == 0) continue;  // framing: entry/prologue block stays
        if (b.ends_in_control_flow) continue;
        if (b.is_branch_target) continue;
        if (multi[b.id]) continue;
        region.block_ids.insert(b.id);
    }
    return region;
}

double admissible_fraction(const Program& p, const std::vector<BasicBlock>& bbs,
                           const AdmissibleRegion& region) {
    if (p.instructions.empty()) return 0.0;
    int covered = 0;
    for (const BasicBlock& b : bbs)
        if (region.contains(b.id)) covered += b.end - b.start + 1;
    return static_cast<double>(covered) / static_cast<double>(p.size());
}

std::vector<int> admissible_instruction_indices(
    const std::vector<BasicBlock>& bbs, const AdmissibleRegion& region) {
    std::vector<int> out;
    for (const BasicBlock& b : bbs)
        if (region.contains(b.id))
            for (int i = b.start; i <= b.end; ++i) out.push_back(i);
    return out;
}

std::string dump_cfg_csv(const std::vector<BasicBlock>& bbs,
                         const AdmissibleRegion& region) {
    std::ostringstream os;
    os << "block_id,start,end,admissible\n";
    for (const BasicBlock& b : bbs)
        os << b.id << "," << b.start << "," << b.end << ","
           << (region.contains(b.id) ? 1 : 0) << "\n";
    return os.str();
}

}  // namespace sbst
