#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evm/assignment.hpp"
#include "evm/common.hpp"
#include "evm/log_binom.hpp"

namespace evm {

struct BlockMapResult {
    // values[i] is the assignment to var_indices()[i]
    std::vector<std::uint8_t> values;
    double log_prob = neg_inf;
};

// A finitely exchangeable sequence of binary variables: a mixture over the
// count of ones, with the uniform distribution over each count level.
// Immutable once built; all queries are const and thread-safe.
class ExchangeableBlock {
public:
    // weights[t] = probability of seeing exactly t ones, t = 0..m.
    ExchangeableBlock(std::vector<int> var_indices, std::vector<double> weights)
        : vars_(std::move(var_indices)), weights_(std::move(weights)) {
        validate_vars();
        if (weights_.size() != vars_.size() + 1)
            throw Error("block weight vector must have m+1 entries");
        double total = 0.0;
        log_weights_.resize(weights_.size());
        for (std::size_t t = 0; t < weights_.size(); ++t) {
            double w = weights_[t];
            if (w < 0.0 || !std::isfinite(w))
                throw Error("block weights must be finite and nonnegative");
            total += w;
            log_weights_[t] = w == 0.0 ? neg_inf : std::log(w);
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw Error("block weights sum to " + std::to_string(total) + ", not 1");
        finish();
    }

    static ExchangeableBlock from_log_weights(std::vector<int> var_indices,
                                              const std::vector<double>& log_weights) {
        std::vector<double> w(log_weights.size());
        for (std::size_t t = 0; t < log_weights.size(); ++t)
            w[t] = log_weights[t] == neg_inf ? 0.0 : std::exp(log_weights[t]);
        return ExchangeableBlock(std::move(var_indices), std::move(w));
    }

    int size() const { return static_cast<int>(vars_.size()); }
    const std::vector<int>& var_indices() const { return vars_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& log_weights() const { return log_weights_; }

    // log P(x) for any single assignment with t ones: log w_t - log C(m, t).
    double log_prob_count(int t) const {
        if (t < 0 || t > size()) throw Error("count out of range for block");
        return scores_[static_cast<std::size_t>(t)];
    }

    // x must cover every block variable; entries outside the block are ignored
    // so a global assignment can be passed directly.
    double log_prob(const PartialAssignment& x) const {
        int t = 0;
        for (int v : vars_) {
            auto val = x.get(v);
            if (!val) throw Error("assignment missing block variable " + std::to_string(v));
            t += *val ? 1 : 0;
        }
        return log_prob_count(t);
    }

    // log P(e) = log sum_t w_t * C(m-k, t-s) / C(m, t), evidence e inside the
    // block. Indices not belonging to the block raise.
    double log_marginal(const PartialAssignment& e) const {
        if (e.empty()) return 0.0;
        auto [k, s] = evidence_counts(e);
        int m = size();
        double acc = neg_inf;
        for (int t = s; t <= m - k + s; ++t) {
            double lw = log_weights_[static_cast<std::size_t>(t)];
            if (lw == neg_inf) continue;
            acc = log_add(acc, lw + log_binom(m - k, t - s) - log_choose_[t]);
        }
        return acc;
    }

    // Most probable completion of e. Candidate counts are scanned in
    // ascending order and extra ones go to the lowest-index free variables,
    // which fixes the result when several completions tie.
    BlockMapResult map_completion(const PartialAssignment& e) const {
        auto [k, s] = evidence_counts(e);
        int m = size();
        int best_t = s;
        double best = neg_inf;
        for (int t = s; t <= m - k + s; ++t) {
            double score = scores_[static_cast<std::size_t>(t)];
            if (score > best) {
                best = score;
                best_t = t;
            }
        }
        BlockMapResult out;
        out.log_prob = best;
        out.values.assign(vars_.size(), 0);
        int extra = best_t - s;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            auto val = e.get(vars_[i]);
            if (val) {
                out.values[i] = *val ? 1 : 0;
            } else if (extra > 0) {
                out.values[i] = 1;
                --extra;
            }
        }
        return out;
    }

    // Count of ones within the block of a sparse row (sorted global indices
    // of 1-valued variables).
    int count_ones_sparse(const std::vector<int>& ones) const {
        int t = 0;
        auto it = vars_.begin();
        for (int idx : ones) {
            it = std::lower_bound(it, vars_.end(), idx);
            if (it == vars_.end()) break;
            if (*it == idx) ++t;
        }
        return t;
    }

private:
    void validate_vars() {
        if (vars_.empty()) throw Error("block needs at least one variable");
        for (std::size_t i = 1; i < vars_.size(); ++i)
            if (vars_[i] <= vars_[i - 1])
                throw Error("block variable indices must be distinct and ascending");
    }

    void finish() {
        int m = size();
        log_choose_ = LogBinomRow(m);
        scores_.resize(static_cast<std::size_t>(m) + 1);
        for (int t = 0; t <= m; ++t) {
            double lw = log_weights_[static_cast<std::size_t>(t)];
            scores_[static_cast<std::size_t>(t)] = lw == neg_inf ? neg_inf : lw - log_choose_[t];
        }
    }

    // (#assigned, #ones) of evidence; rejects indices outside the block.
    std::pair<int, int> evidence_counts(const PartialAssignment& e) const {
        int k = 0, s = 0;
        for (const auto& [idx, val] : e.entries()) {
            if (!std::binary_search(vars_.begin(), vars_.end(), idx))
                throw Error("evidence variable " + std::to_string(idx) + " not in block");
            ++k;
            s += val ? 1 : 0;
        }
        return {k, s};
    }

    std::vector<int> vars_;
    std::vector<double> weights_;
    std::vector<double> log_weights_;
    LogBinomRow log_choose_;
    std::vector<double> scores_;  // log w_t - log C(m, t)
};

// ML mixture weights from statistic-value counts; add-alpha smoothing per
// count category. counts must not be all zero.
inline std::vector<double> mle_weights(const std::vector<std::int64_t>& counts,
                                       double alpha = 0.0) {
    std::int64_t total = 0;
    for (std::int64_t c : counts) {
        if (c < 0) throw Error("negative count");
        total += c;
    }
    if (total == 0) throw Error("cannot estimate weights from an empty sample");
    double denom = static_cast<double>(total) + alpha * static_cast<double>(counts.size());
    std::vector<double> w(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        w[i] = (static_cast<double>(counts[i]) + alpha) / denom;
    return w;
}

}  // namespace evm
