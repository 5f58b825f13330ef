// Basic-block partitioning and admissible-region analysis.
//
// Blocks start at instruction 0, at every label position, and right after a
// control-flow instruction. Labels delimit blocks even when nothing branches
// to them: generated test programs use plain labels to mark their block
// structure inside straight-line code.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "sbst/asm.hpp"

namespace sbst {

struct BasicBlock {
    int id = 0;
    int start = 0;  // inclusive instruction index range
    int end = 0;
    bool is_branch_target = false;      // some branch/jump resolves here
    bool ends_in_control_flow = false;  // BEQ/BNE/J/HALT terminator
};

// Blocks eligible for removal: straight-line, never branched to, executed
// at most once (not reachable from any back edge), and not part of the
// program's framing (first block, HALT block).
struct AdmissibleRegion {
    std::set<int> block_ids;
    bool contains(int id) const { return block_ids.count(id) != 0; }
};

std::vector<BasicBlock> partition_basic_blocks(const Program& p);

AdmissibleRegion find_admissible_region(const Program& p,
                                        const std::vector<BasicBlock>& bbs);

// Fraction of instructions inside the admissible region, in [0,1].
double admissible_fraction(const Program& p, const std::vector<BasicBlock>& bbs,
                           const AdmissibleRegion& region);

// Instruction indices covered by admissible blocks, in program order.
std::vector<int> admissible_instruction_indices(
    const std::vector<BasicBlock>& bbs, const AdmissibleRegion& region);

// CSV rows "block_id,start,end,admissible" with a header line.
std::string dump_cfg_csv(const std::vector<BasicBlock>& bbs,
                         const AdmissibleRegion& region);

}  // namespace sbst
