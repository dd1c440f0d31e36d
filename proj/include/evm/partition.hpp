#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "evm/common.hpp"

namespace evm {

// Disjoint, covering, nonempty blocks of {0..n-1}; indices sorted in-block.
struct Partition {
    std::vector<std::vector<int>> blocks;

    bool operator==(const Partition&) const = default;

    std::size_t num_blocks() const { return blocks.size(); }

    void validate(int n_vars) const {
        std::vector<char> seen(static_cast<std::size_t>(n_vars), 0);
        int covered = 0;
        for (const auto& block : blocks) {
            if (block.empty()) throw Error("partition contains an empty block");
            int prev = -1;
            for (int idx : block) {
                if (idx < 0 || idx >= n_vars)
                    throw Error("partition index " + std::to_string(idx) + " out of range");
                if (idx <= prev) throw Error("partition block not sorted ascending");
                if (seen[static_cast<std::size_t>(idx)])
                    throw Error("variable " + std::to_string(idx) + " appears in two blocks");
                seen[static_cast<std::size_t>(idx)] = 1;
                prev = idx;
                ++covered;
            }
        }
        if (covered != n_vars) throw Error("partition does not cover all variables");
    }
};

}  // namespace evm
