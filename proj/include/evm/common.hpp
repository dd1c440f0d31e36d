#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace evm {

// Error raised for contract violations (bad evidence, malformed files,
// dimension mismatches). CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without leaving log-space.
inline double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    double m = a > b ? a : b;
    return m + std::log1p(std::exp((a > b ? b : a) - m));
}

// Ordered left-to-right reduction so results do not depend on chunking.
inline double log_sum(const std::vector<double>& xs) {
    double acc = neg_inf;
    for (double x : xs) acc = log_add(acc, x);
    return acc;
}

// All randomness flows through mt19937_64 with hand-rolled draws: the engine
// is bit-portable across platforms, the std distributions are not.
using Rng = std::mt19937_64;

inline double next_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool next_bernoulli(Rng& rng, double p) { return next_unit(rng) < p; }

inline std::uint64_t next_below(Rng& rng, std::uint64_t n) {
    // rejection sampling keeps the draw unbiased and deterministic
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

template <typename T>
void shuffle_inplace(std::vector<T>& xs, Rng& rng) {
    for (std::size_t i = xs.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(next_below(rng, i));
        std::swap(xs[i - 1], xs[j]);
    }
}

}  // namespace evm
