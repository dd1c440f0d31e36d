#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evm/assignment.hpp"
#include "evm/common.hpp"
#include "evm/log_binom.hpp"
#include "evm/partition.hpp"

namespace evm {

// Contract for a statistic T with tractable inference: enumerate the value
// set, evaluate, construct a completion with a prescribed value, and count
// completions. Exact counts are limited to n <= 64; log counts always work.
template <typename S>
concept TractableStatistic =
    requires(const S& s, const std::vector<std::uint8_t>& x,
             const typename S::value_type& t, const PartialAssignment& e) {
        { s.num_vars() } -> std::convertible_to<int>;
        { s.value(x) } -> std::same_as<typename S::value_type>;
        { s.values() } -> std::same_as<std::vector<typename S::value_type>>;
        { s.value_index(t) } -> std::convertible_to<std::size_t>;
        { s.complete(t, e) } -> std::same_as<std::optional<std::vector<std::uint8_t>>>;
        { s.count_completions(t, e) } -> std::convertible_to<std::uint64_t>;
        { s.log_count_completions(t, e) } -> std::convertible_to<double>;
    };

namespace detail {

// Dense view of evidence: -1 unassigned, else 0/1. Rejects foreign indices.
inline std::vector<std::int8_t> evidence_mask(int n, const PartialAssignment& e) {
    std::vector<std::int8_t> mask(static_cast<std::size_t>(n), -1);
    for (const auto& [idx, val] : e.entries()) {
        if (idx < 0 || idx >= n)
            throw Error("evidence variable " + std::to_string(idx) + " out of range");
        mask[static_cast<std::size_t>(idx)] = val ? 1 : 0;
    }
    return mask;
}

inline void check_full(int n, const std::vector<std::uint8_t>& x) {
    if (static_cast<int>(x.size()) != n)
        throw Error("expected a full assignment to " + std::to_string(n) + " variables");
}

inline void check_value_set_size(std::size_t count, std::size_t max_values, int n) {
    std::size_t bound = max_values != 0
                            ? max_values
                            : static_cast<std::size_t>(n) * static_cast<std::size_t>(n) + 1;
    if (count > bound)
        throw Error("statistic value set has " + std::to_string(count) +
                    " entries, above the tractability bound " + std::to_string(bound));
}

inline void check_exact_count_range(int n) {
    if (n > 64) throw Error("exact completion counts need n <= 64; use the log form");
}

}  // namespace detail

// Number of ones. The workhorse statistic: every ExchangeableBlock is this
// statistic plus a weight vector.
class CardinalityStatistic {
public:
    using value_type = int;

    explicit CardinalityStatistic(int n, std::size_t max_values = 0) : n_(n) {
        if (n < 1) throw Error("statistic needs at least one variable");
        detail::check_value_set_size(static_cast<std::size_t>(n) + 1, max_values, n);
    }

    int num_vars() const { return n_; }

    value_type value(const std::vector<std::uint8_t>& x) const {
        detail::check_full(n_, x);
        int t = 0;
        for (auto b : x) t += b ? 1 : 0;
        return t;
    }

    std::vector<value_type> values() const {
        std::vector<value_type> out(static_cast<std::size_t>(n_) + 1);
        for (int t = 0; t <= n_; ++t) out[static_cast<std::size_t>(t)] = t;
        return out;
    }

    std::size_t value_index(value_type t) const {
        if (t < 0 || t > n_) throw Error("statistic value out of range");
        return static_cast<std::size_t>(t);
    }

    std::optional<std::vector<std::uint8_t>> complete(value_type t,
                                                      const PartialAssignment& e) const {
        value_index(t);
        auto mask = detail::evidence_mask(n_, e);
        int k = 0, s = 0;
        for (auto m : mask)
            if (m >= 0) {
                ++k;
                s += m;
            }
        if (t < s || t > n_ - k + s) return std::nullopt;
        std::vector<std::uint8_t> x(static_cast<std::size_t>(n_), 0);
        int extra = t - s;
        for (int i = 0; i < n_; ++i) {
            if (mask[static_cast<std::size_t>(i)] >= 0) {
                x[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(mask[i]);
            } else if (extra > 0) {
                x[static_cast<std::size_t>(i)] = 1;
                --extra;
            }
        }
        return x;
    }

    std::uint64_t count_completions(value_type t, const PartialAssignment& e) const {
        detail::check_exact_count_range(n_);
        value_index(t);
        auto [k, s] = evidence_counts(e);
        return binom_u64(n_ - k, t - s);
    }

    double log_count_completions(value_type t, const PartialAssignment& e) const {
        value_index(t);
        auto [k, s] = evidence_counts(e);
        return log_binom(n_ - k, t - s);
    }

private:
    std::pair<int, int> evidence_counts(const PartialAssignment& e) const {
        int k = 0, s = 0;
        for (const auto& [idx, val] : e.entries()) {
            if (idx < 0 || idx >= n_)
                throw Error("evidence variable " + std::to_string(idx) + " out of range");
            ++k;
            s += val ? 1 : 0;
        }
        return {k, s};
    }

    int n_;
};

// Per-part counts of ones over a fixed partition; the value is the tuple of
// counts, enumerated lexicographically with the first part most significant.
class BlockCountStatistic {
public:
    using value_type = std::vector<int>;

    explicit BlockCountStatistic(Partition parts, std::size_t max_values = 0)
        : parts_(std::move(parts)) {
        n_ = 0;
        for (const auto& p : parts_.blocks) n_ += static_cast<int>(p.size());
        parts_.validate(n_);
        std::size_t count = 1;
        for (const auto& p : parts_.blocks) {
            count *= p.size() + 1;
            if (count > (1u << 30)) break;  // avoid overflow before the check
        }
        detail::check_value_set_size(count, max_values, n_);
        part_of_.assign(static_cast<std::size_t>(n_), 0);
        for (std::size_t b = 0; b < parts_.blocks.size(); ++b)
            for (int idx : parts_.blocks[b]) part_of_[static_cast<std::size_t>(idx)] = static_cast<int>(b);
    }

    int num_vars() const { return n_; }
    const Partition& partition() const { return parts_; }

    value_type value(const std::vector<std::uint8_t>& x) const {
        detail::check_full(n_, x);
        value_type t(parts_.blocks.size(), 0);
        for (int i = 0; i < n_; ++i)
            if (x[static_cast<std::size_t>(i)]) ++t[static_cast<std::size_t>(part_of_[static_cast<std::size_t>(i)])];
        return t;
    }

    std::vector<value_type> values() const {
        std::vector<value_type> out;
        value_type cur(parts_.blocks.size(), 0);
        for (;;) {
            out.push_back(cur);
            std::size_t j = parts_.blocks.size();
            while (j > 0) {
                --j;
                if (cur[j] < static_cast<int>(parts_.blocks[j].size())) {
                    ++cur[j];
                    std::fill(cur.begin() + static_cast<std::ptrdiff_t>(j) + 1, cur.end(), 0);
                    break;
                }
                if (j == 0) return out;
            }
        }
    }

    std::size_t value_index(const value_type& t) const {
        if (t.size() != parts_.blocks.size()) throw Error("statistic value has wrong arity");
        std::size_t idx = 0;
        for (std::size_t j = 0; j < t.size(); ++j) {
            int mj = static_cast<int>(parts_.blocks[j].size());
            if (t[j] < 0 || t[j] > mj) throw Error("statistic value out of range");
            idx = idx * static_cast<std::size_t>(mj + 1) + static_cast<std::size_t>(t[j]);
        }
        return idx;
    }

    std::optional<std::vector<std::uint8_t>> complete(const value_type& t,
                                                      const PartialAssignment& e) const {
        value_index(t);
        auto mask = detail::evidence_mask(n_, e);
        std::vector<std::uint8_t> x(static_cast<std::size_t>(n_), 0);
        for (std::size_t j = 0; j < parts_.blocks.size(); ++j) {
            const auto& part = parts_.blocks[j];
            int k = 0, s = 0;
            for (int idx : part)
                if (mask[static_cast<std::size_t>(idx)] >= 0) {
                    ++k;
                    s += mask[static_cast<std::size_t>(idx)];
                }
            int m = static_cast<int>(part.size());
            if (t[j] < s || t[j] > m - k + s) return std::nullopt;
            int extra = t[j] - s;
            for (int idx : part) {
                if (mask[static_cast<std::size_t>(idx)] >= 0) {
                    x[static_cast<std::size_t>(idx)] = static_cast<std::uint8_t>(mask[idx]);
                } else if (extra > 0) {
                    x[static_cast<std::size_t>(idx)] = 1;
                    --extra;
                }
            }
        }
        return x;
    }

    std::uint64_t count_completions(const value_type& t, const PartialAssignment& e) const {
        detail::check_exact_count_range(n_);
        value_index(t);
        auto mask = detail::evidence_mask(n_, e);
        std::uint64_t count = 1;
        for (std::size_t j = 0; j < parts_.blocks.size(); ++j) {
            auto [k, s] = part_evidence(j, mask);
            count *= binom_u64(static_cast<int>(parts_.blocks[j].size()) - k, t[j] - s);
            if (count == 0) return 0;
        }
        return count;
    }

    double log_count_completions(const value_type& t, const PartialAssignment& e) const {
        value_index(t);
        auto mask = detail::evidence_mask(n_, e);
        double acc = 0.0;
        for (std::size_t j = 0; j < parts_.blocks.size(); ++j) {
            auto [k, s] = part_evidence(j, mask);
            acc += log_binom(static_cast<int>(parts_.blocks[j].size()) - k, t[j] - s);
            if (acc == neg_inf) return neg_inf;
        }
        return acc;
    }

private:
    std::pair<int, int> part_evidence(std::size_t j, const std::vector<std::int8_t>& mask) const {
        int k = 0, s = 0;
        for (int idx : parts_.blocks[j])
            if (mask[static_cast<std::size_t>(idx)] >= 0) {
                ++k;
                s += mask[static_cast<std::size_t>(idx)];
            }
        return {k, s};
    }

    Partition parts_;
    int n_;
    std::vector<int> part_of_;
};

// Number of 01 substrings (0 -> 1 transitions between adjacent positions).
// Counting and completion run a dynamic program over positions with state
// (transitions so far, previous bit); evidence restricts the bit choices.
// A virtual leading 1 seeds the scan: a first bit can never open a 01 pair.
class TransitionStatistic {
public:
    using value_type = int;

    explicit TransitionStatistic(int n, std::size_t max_values = 0) : n_(n) {
        if (n < 1) throw Error("statistic needs at least one variable");
        detail::check_value_set_size(static_cast<std::size_t>(n / 2) + 1, max_values, n);
    }

    int num_vars() const { return n_; }
    int max_value() const { return n_ / 2; }

    value_type value(const std::vector<std::uint8_t>& x) const {
        detail::check_full(n_, x);
        int t = 0;
        for (int i = 0; i + 1 < n_; ++i)
            if (!x[static_cast<std::size_t>(i)] && x[static_cast<std::size_t>(i) + 1]) ++t;
        return t;
    }

    std::vector<value_type> values() const {
        std::vector<value_type> out(static_cast<std::size_t>(max_value()) + 1);
        for (int t = 0; t <= max_value(); ++t) out[static_cast<std::size_t>(t)] = t;
        return out;
    }

    std::size_t value_index(value_type t) const {
        if (t < 0 || t > max_value()) throw Error("statistic value out of range");
        return static_cast<std::size_t>(t);
    }

    std::optional<std::vector<std::uint8_t>> complete(value_type t,
                                                      const PartialAssignment& e) const {
        value_index(t);
        auto mask = detail::evidence_mask(n_, e);
        // reach[pos][tau][last]: positions pos.. can still land on exactly t
        // transitions given tau seen so far and previous bit last.
        std::vector<std::uint8_t> reach(table_size(), 0);
        auto at = [&](int pos, int tau, int last) -> std::uint8_t& {
            return reach[(static_cast<std::size_t>(pos) * static_cast<std::size_t>(t + 1) +
                          static_cast<std::size_t>(tau)) * 2 + static_cast<std::size_t>(last)];
        };
        for (int last = 0; last < 2; ++last) at(n_, t, last) = 1;
        for (int pos = n_ - 1; pos >= 0; --pos)
            for (int tau = 0; tau <= t; ++tau)
                for (int last = 0; last < 2; ++last)
                    for (int bit = 0; bit < 2; ++bit) {
                        if (mask[static_cast<std::size_t>(pos)] >= 0 &&
                            mask[static_cast<std::size_t>(pos)] != bit)
                            continue;
                        int next = tau + (last == 0 && bit == 1 ? 1 : 0);
                        if (next <= t && at(pos + 1, next, bit)) {
                            at(pos, tau, last) = 1;
                            break;
                        }
                    }
        if (!at(0, 0, 1)) return std::nullopt;
        std::vector<std::uint8_t> x(static_cast<std::size_t>(n_), 0);
        int tau = 0, last = 1;
        for (int pos = 0; pos < n_; ++pos) {
            for (int bit = 0; bit < 2; ++bit) {
                if (mask[static_cast<std::size_t>(pos)] >= 0 &&
                    mask[static_cast<std::size_t>(pos)] != bit)
                    continue;
                int next = tau + (last == 0 && bit == 1 ? 1 : 0);
                if (next <= t && at(pos + 1, next, bit)) {
                    x[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(bit);
                    tau = next;
                    last = bit;
                    break;
                }
            }
        }
        return x;
    }

    std::uint64_t count_completions(value_type t, const PartialAssignment& e) const {
        detail::check_exact_count_range(n_);
        value_index(t);
        auto mask = detail::evidence_mask(n_, e);
        std::vector<std::uint64_t> dp(static_cast<std::size_t>(t + 1) * 2, 0);
        std::vector<std::uint64_t> next(dp.size(), 0);
        dp[index(0, 1)] = 1;  // virtual leading 1
        for (int pos = 0; pos < n_; ++pos) {
            std::fill(next.begin(), next.end(), 0);
            for (int tau = 0; tau <= t; ++tau)
                for (int last = 0; last < 2; ++last) {
                    std::uint64_t ways = dp[index(tau, last)];
                    if (ways == 0) continue;
                    for (int bit = 0; bit < 2; ++bit) {
                        if (mask[static_cast<std::size_t>(pos)] >= 0 &&
                            mask[static_cast<std::size_t>(pos)] != bit)
                            continue;
                        int nt = tau + (last == 0 && bit == 1 ? 1 : 0);
                        if (nt <= t) next[index(nt, bit)] += ways;
                    }
                }
            dp.swap(next);
        }
        return dp[index(t, 0)] + dp[index(t, 1)];
    }

    double log_count_completions(value_type t, const PartialAssignment& e) const {
        value_index(t);
        auto mask = detail::evidence_mask(n_, e);
        std::vector<double> dp(static_cast<std::size_t>(t + 1) * 2, neg_inf);
        std::vector<double> next(dp.size(), neg_inf);
        dp[index(0, 1)] = 0.0;
        for (int pos = 0; pos < n_; ++pos) {
            std::fill(next.begin(), next.end(), neg_inf);
            for (int tau = 0; tau <= t; ++tau)
                for (int last = 0; last < 2; ++last) {
                    double ways = dp[index(tau, last)];
                    if (ways == neg_inf) continue;
                    for (int bit = 0; bit < 2; ++bit) {
                        if (mask[static_cast<std::size_t>(pos)] >= 0 &&
                            mask[static_cast<std::size_t>(pos)] != bit)
                            continue;
                        int nt = tau + (last == 0 && bit == 1 ? 1 : 0);
                        if (nt <= t) next[index(nt, bit)] = log_add(next[index(nt, bit)], ways);
                    }
                }
            dp.swap(next);
        }
        return log_add(dp[index(t, 0)], dp[index(t, 1)]);
    }

private:
    std::size_t index(int tau, int last) const {
        return static_cast<std::size_t>(tau) * 2 + static_cast<std::size_t>(last);
    }
    std::size_t table_size() const {
        return static_cast<std::size_t>(n_ + 1) * static_cast<std::size_t>(max_value() + 1) * 2;
    }

    int n_;
};

// Number of k x k squares of an n x n grid whose count of ones exceeds tau
// (tau = 0 is max-pooling). Variables are row-major. Squares are disjoint, so
// per-square completion counts convolve into the grid count.
class NestedPoolingStatistic {
public:
    using value_type = int;

    NestedPoolingStatistic(int grid_side, int square_side, int threshold,
                           std::size_t max_values = 0)
        : n_(grid_side), k_(square_side), tau_(threshold) {
        if (n_ < 1 || k_ < 1 || n_ % k_ != 0)
            throw Error("grid side must be a positive multiple of the square side");
        if (tau_ < 0 || tau_ >= k_ * k_) throw Error("threshold must satisfy 0 <= tau < k*k");
        side_ = n_ / k_;
        detail::check_value_set_size(static_cast<std::size_t>(side_ * side_) + 1, max_values,
                                     num_vars());
    }

    int num_vars() const { return n_ * n_; }
    int num_squares() const { return side_ * side_; }

    value_type value(const std::vector<std::uint8_t>& x) const {
        detail::check_full(num_vars(), x);
        std::vector<int> sums(static_cast<std::size_t>(num_squares()), 0);
        for (int i = 0; i < num_vars(); ++i)
            if (x[static_cast<std::size_t>(i)]) ++sums[static_cast<std::size_t>(square_of(i))];
        int t = 0;
        for (int s : sums) t += s > tau_ ? 1 : 0;
        return t;
    }

    std::vector<value_type> values() const {
        std::vector<value_type> out(static_cast<std::size_t>(num_squares()) + 1);
        for (int t = 0; t <= num_squares(); ++t) out[static_cast<std::size_t>(t)] = t;
        return out;
    }

    std::size_t value_index(value_type t) const {
        if (t < 0 || t > num_squares()) throw Error("statistic value out of range");
        return static_cast<std::size_t>(t);
    }

    std::optional<std::vector<std::uint8_t>> complete(value_type t,
                                                      const PartialAssignment& e) const {
        value_index(t);
        auto mask = detail::evidence_mask(num_vars(), e);
        auto st = square_state(mask);
        int forced = 0, flexible = 0;
        for (const auto& sq : st) {
            if (sq.ones > tau_)
                ++forced;
            else if (sq.ones + sq.free > tau_)
                ++flexible;
        }
        if (t < forced || t > forced + flexible) return std::nullopt;
        int to_activate = t - forced;
        std::vector<std::uint8_t> x(static_cast<std::size_t>(num_vars()), 0);
        for (int i = 0; i < num_vars(); ++i)
            if (mask[static_cast<std::size_t>(i)] > 0) x[static_cast<std::size_t>(i)] = 1;
        for (int q = 0; q < num_squares(); ++q) {
            const auto& sq = st[static_cast<std::size_t>(q)];
            bool activate = sq.ones > tau_;
            if (!activate && sq.ones + sq.free > tau_ && to_activate > 0) {
                activate = true;
                --to_activate;
            }
            if (activate && sq.ones <= tau_) {
                int need = tau_ + 1 - sq.ones;
                for (int i : square_vars(q)) {
                    if (need == 0) break;
                    if (mask[static_cast<std::size_t>(i)] < 0) {
                        x[static_cast<std::size_t>(i)] = 1;
                        --need;
                    }
                }
            }
        }
        return x;
    }

    std::uint64_t count_completions(value_type t, const PartialAssignment& e) const {
        detail::check_exact_count_range(num_vars());
        value_index(t);
        auto mask = detail::evidence_mask(num_vars(), e);
        auto st = square_state(mask);
        // conv[j] = ways to have exactly j active squares among those seen
        std::vector<std::uint64_t> conv{1};
        for (const auto& sq : st) {
            std::uint64_t inactive = 0, active = 0;
            for (int j = 0; j <= sq.free; ++j) {
                std::uint64_t ways = binom_u64(sq.free, j);
                if (sq.ones + j > tau_)
                    active += ways;
                else
                    inactive += ways;
            }
            std::vector<std::uint64_t> next(conv.size() + 1, 0);
            for (std::size_t j = 0; j < conv.size(); ++j) {
                next[j] += conv[j] * inactive;
                next[j + 1] += conv[j] * active;
            }
            conv.swap(next);
        }
        return static_cast<std::size_t>(t) < conv.size() ? conv[static_cast<std::size_t>(t)] : 0;
    }

    double log_count_completions(value_type t, const PartialAssignment& e) const {
        value_index(t);
        auto mask = detail::evidence_mask(num_vars(), e);
        auto st = square_state(mask);
        std::vector<double> conv{0.0};
        for (const auto& sq : st) {
            double inactive = neg_inf, active = neg_inf;
            for (int j = 0; j <= sq.free; ++j) {
                double lw = log_binom(sq.free, j);
                if (sq.ones + j > tau_)
                    active = log_add(active, lw);
                else
                    inactive = log_add(inactive, lw);
            }
            std::vector<double> next(conv.size() + 1, neg_inf);
            for (std::size_t j = 0; j < conv.size(); ++j) {
                if (conv[j] == neg_inf) continue;
                if (inactive != neg_inf) next[j] = log_add(next[j], conv[j] + inactive);
                if (active != neg_inf) next[j + 1] = log_add(next[j + 1], conv[j] + active);
            }
            conv.swap(next);
        }
        return static_cast<std::size_t>(t) < conv.size() ? conv[static_cast<std::size_t>(t)]
                                                         : neg_inf;
    }

private:
    struct SquareState {
        int ones = 0;  // evidence ones inside the square
        int free = 0;  // unassigned variables inside the square
    };

    int square_of(int var) const {
        int r = var / n_, c = var % n_;
        return (r / k_) * side_ + c / k_;
    }

    std::vector<int> square_vars(int q) const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_));
        int r0 = (q / side_) * k_, c0 = (q % side_) * k_;
        for (int r = r0; r < r0 + k_; ++r)
            for (int c = c0; c < c0 + k_; ++c) out.push_back(r * n_ + c);
        return out;
    }

    std::vector<SquareState> square_state(const std::vector<std::int8_t>& mask) const {
        std::vector<SquareState> st(static_cast<std::size_t>(num_squares()));
        for (int i = 0; i < num_vars(); ++i) {
            auto& sq = st[static_cast<std::size_t>(square_of(i))];
            if (mask[static_cast<std::size_t>(i)] < 0)
                ++sq.free;
            else
                sq.ones += mask[static_cast<std::size_t>(i)];
        }
        return st;
    }

    int n_, k_, tau_, side_;
};

// Pooling indicator count straight from a 2-d grid.
inline int nested_pooling_value(const std::vector<std::vector<std::uint8_t>>& grid, int k,
                                int tau) {
    int n = static_cast<int>(grid.size());
    for (const auto& row : grid)
        if (static_cast<int>(row.size()) != n) throw Error("grid must be square");
    NestedPoolingStatistic stat(n, k, tau);
    std::vector<std::uint8_t> flat;
    flat.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (const auto& row : grid) flat.insert(flat.end(), row.begin(), row.end());
    return stat.value(flat);
}

struct StatMapResult {
    std::vector<std::uint8_t> assignment;
    double log_prob = neg_inf;
};

// P(e) = sum_t w_t |S_{t,e}| / |S_t| with weights indexed in values() order.
template <TractableStatistic S>
double generic_marginal(const S& stat, const std::vector<double>& log_weights,
                        const PartialAssignment& e) {
    auto vals = stat.values();
    if (log_weights.size() != vals.size())
        throw Error("weight vector does not match the statistic's value set");
    if (e.empty()) return 0.0;
    double acc = neg_inf;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (log_weights[i] == neg_inf) continue;
        double with_e = stat.log_count_completions(vals[i], e);
        if (with_e == neg_inf) continue;
        double total = stat.log_count_completions(vals[i], PartialAssignment{});
        acc = log_add(acc, log_weights[i] + with_e - total);
    }
    return acc;
}

// Best completion of e: maximize w_t / |S_t| over values t feasible under e.
// Scanning values() in order makes ties deterministic. If every feasible
// value carries zero weight the first feasible completion is returned with
// log-probability -inf.
template <TractableStatistic S>
StatMapResult generic_map(const S& stat, const std::vector<double>& log_weights,
                          const PartialAssignment& e) {
    auto vals = stat.values();
    if (log_weights.size() != vals.size())
        throw Error("weight vector does not match the statistic's value set");
    StatMapResult best;
    bool found = false;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        auto witness = stat.complete(vals[i], e);
        if (!witness) continue;
        double score =
            log_weights[i] == neg_inf
                ? neg_inf
                : log_weights[i] - stat.log_count_completions(vals[i], PartialAssignment{});
        if (!found || score > best.log_prob) {
            best.assignment = std::move(*witness);
            best.log_prob = score;
            found = true;
        }
    }
    if (!found) throw Error("evidence admits no completion");
    return best;
}

}  // namespace evm
