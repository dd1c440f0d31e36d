#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "evm/common.hpp"

namespace evm {

// log C(n, k); -inf outside the triangle. lgamma keeps this stable for n in
// the tens of thousands where the coefficient itself overflows everything.
inline double log_binom(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return neg_inf;
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Exact C(n, k) for n <= 64; 128-bit intermediates avoid overflow in the
// running product. Returns 0 outside the triangle.
inline std::uint64_t binom_u64(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 result = 1;
    for (int i = 0; i < k; ++i) {
        result = result * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
    }
    return static_cast<std::uint64_t>(result);
}

// Row of log C(n, k) for k = 0..n, built once per block size.
class LogBinomRow {
public:
    LogBinomRow() = default;
    explicit LogBinomRow(int n) : row_(static_cast<std::size_t>(n) + 1) {
        for (int k = 0; k <= n; ++k) row_[static_cast<std::size_t>(k)] = log_binom(n, k);
    }

    double operator[](int k) const { return row_[static_cast<std::size_t>(k)]; }
    int n() const { return static_cast<int>(row_.size()) - 1; }

private:
    std::vector<double> row_;
};

}  // namespace evm
