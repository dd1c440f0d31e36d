#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "evm/common.hpp"

namespace evm {

// Sparse evidence: variable index -> {0,1}, kept sorted by index.
class PartialAssignment {
public:
    PartialAssignment() = default;

    PartialAssignment(std::initializer_list<std::pair<int, int>> items) {
        for (const auto& [idx, val] : items) set(idx, val != 0);
    }

    void set(int index, bool value) {
        auto it = lower_bound(index);
        if (it != entries_.end() && it->first == index) {
            if (it->second != value)
                throw Error("conflicting assignment for variable " + std::to_string(index));
            return;
        }
        entries_.insert(it, {index, value});
    }

    std::optional<bool> get(int index) const {
        auto it = lower_bound(index);
        if (it != entries_.end() && it->first == index) return it->second;
        return std::nullopt;
    }

    bool contains(int index) const { return get(index).has_value(); }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    int num_ones() const {
        int s = 0;
        for (const auto& [idx, val] : entries_) s += val ? 1 : 0;
        return s;
    }

    // x ~ e: agreement on the shared variables.
    bool compatible(const PartialAssignment& other) const {
        const PartialAssignment& small = size() <= other.size() ? *this : other;
        const PartialAssignment& big = size() <= other.size() ? other : *this;
        for (const auto& [idx, val] : small.entries_) {
            auto v = big.get(idx);
            if (v && *v != val) return false;
        }
        return true;
    }

    // Union of evidence; conflicting values raise.
    PartialAssignment merged(const PartialAssignment& other) const {
        PartialAssignment out = *this;
        for (const auto& [idx, val] : other.entries_) out.set(idx, val);
        return out;
    }

    // Agreement with a dense assignment over variables 0..x.size()-1.
    bool compatible_dense(const std::vector<std::uint8_t>& x) const {
        for (const auto& [idx, val] : entries_) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= x.size()) return false;
            if ((x[static_cast<std::size_t>(idx)] != 0) != val) return false;
        }
        return true;
    }

    const std::vector<std::pair<int, bool>>& entries() const { return entries_; }

private:
    std::vector<std::pair<int, bool>>::const_iterator lower_bound(int index) const {
        return std::lower_bound(entries_.begin(), entries_.end(), index,
                                [](const auto& e, int i) { return e.first < i; });
    }
    std::vector<std::pair<int, bool>>::iterator lower_bound(int index) {
        return std::lower_bound(entries_.begin(), entries_.end(), index,
                                [](const auto& e, int i) { return e.first < i; });
    }

    std::vector<std::pair<int, bool>> entries_;
};

}  // namespace evm
