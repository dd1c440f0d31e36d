#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "evm/common.hpp"
#include "evm/dataset.hpp"
#include "evm/partition.hpp"

namespace evm {

// Symmetric Boolean label rules: all depend on the input only through its
// number of ones.
struct SymmetricFunction {
    enum class Kind { parity, counting, threshold, exact };

    Kind kind = Kind::parity;
    int residue = 3;           // counting: label 1 iff t mod modulus == residue
    int modulus = 5;
    int threshold = 0;         // threshold: label 1 iff t >= threshold
    std::vector<int> exact_set;  // exact: label 1 iff t in the set

    static SymmetricFunction parity() { return {}; }
    static SymmetricFunction counting(int residue, int modulus) {
        SymmetricFunction f;
        f.kind = Kind::counting;
        f.residue = residue;
        f.modulus = modulus;
        return f;
    }
    static SymmetricFunction m_of_n(int threshold) {
        SymmetricFunction f;
        f.kind = Kind::threshold;
        f.threshold = threshold;
        return f;
    }
    static SymmetricFunction exact_values(std::vector<int> set) {
        SymmetricFunction f;
        f.kind = Kind::exact;
        f.exact_set = std::move(set);
        std::sort(f.exact_set.begin(), f.exact_set.end());
        return f;
    }

    int label_for_count(int t) const {
        switch (kind) {
            case Kind::parity: return t % 2 == 1 ? 1 : 0;
            case Kind::counting: return t % modulus == residue ? 1 : 0;
            case Kind::threshold: return t >= threshold ? 1 : 0;
            case Kind::exact:
                return std::binary_search(exact_set.begin(), exact_set.end(), t) ? 1 : 0;
        }
        return 0;
    }
};

// N attribute vectors drawn uniformly from {0,1}^n, labeled by the symmetric
// function of their count of ones.
inline LabeledDataset gen_symmetric(const SymmetricFunction& fn, int n_vars, std::size_t n_rows,
                                    std::uint64_t seed) {
    if (n_vars < 1) throw Error("need at least one variable");
    Rng rng(seed);
    LabeledDataset out;
    out.data.n_vars = n_vars;
    out.n_classes = 2;
    out.data.rows.reserve(n_rows);
    out.labels.reserve(n_rows);
    std::vector<int> row;
    for (std::size_t i = 0; i < n_rows; ++i) {
        row.clear();
        std::uint64_t bits = 0;
        int have = 0;
        for (int j = 0; j < n_vars; ++j) {
            if (have == 0) {
                bits = rng();
                have = 64;
            }
            if (bits & 1) row.push_back(j);
            bits >>= 1;
            --have;
        }
        out.labels.push_back(fn.label_for_count(static_cast<int>(row.size())));
        out.data.rows.push_back(row);
    }
    return out;
}

// The two ends of the model spectrum: one singleton block per variable
// (naive Bayes) and a single all-variable block (full exchangeability).
inline std::vector<Partition> naive_bayes_structure(int n_vars, int n_classes) {
    Partition p;
    p.blocks.reserve(static_cast<std::size_t>(n_vars));
    for (int j = 0; j < n_vars; ++j) p.blocks.push_back({j});
    return std::vector<Partition>(static_cast<std::size_t>(n_classes), p);
}

inline std::vector<Partition> full_exchangeable_structure(int n_vars, int n_classes) {
    Partition p;
    std::vector<int> all(static_cast<std::size_t>(n_vars));
    for (int j = 0; j < n_vars; ++j) all[static_cast<std::size_t>(j)] = j;
    p.blocks.push_back(std::move(all));
    return std::vector<Partition>(static_cast<std::size_t>(n_classes), p);
}

}  // namespace evm
