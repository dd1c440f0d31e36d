#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "evm/block.hpp"
#include "evm/statistics.hpp"
#include "oracles.hpp"

using evm::BlockCountStatistic;
using evm::CardinalityStatistic;
using evm::NestedPoolingStatistic;
using evm::PartialAssignment;
using evm::TransitionStatistic;
using evm::neg_inf;

namespace {

std::vector<std::uint8_t> from_string(const char* s) {
    std::vector<std::uint8_t> x;
    for (const char* p = s; *p; ++p) x.push_back(*p == '1' ? 1 : 0);
    return x;
}

PartialAssignment random_evidence(evm::Rng& rng, int n, double keep_prob) {
    PartialAssignment e;
    for (int i = 0; i < n; ++i)
        if (evm::next_unit(rng) < keep_prob) e.set(i, evm::next_unit(rng) < 0.5);
    return e;
}

std::vector<double> random_weights(evm::Rng& rng, std::size_t count, double zero_prob = 0.0) {
    std::vector<double> w(count, 0.0);
    double total = 0.0;
    for (auto& v : w) {
        if (zero_prob > 0.0 && evm::next_unit(rng) < zero_prob) continue;
        v = -std::log(evm::next_unit(rng) + 1e-300);
        total += v;
    }
    if (total == 0.0) {
        w[0] = 1.0;
        total = 1.0;
    }
    for (auto& v : w) v /= total;
    return w;
}

// exhaustive cross-check of complete/count against enumeration
template <typename S>
void check_against_enumeration(const S& stat, evm::Rng& rng, int n_evidence_trials) {
    int n = stat.num_vars();
    auto vals = stat.values();
    for (int trial = 0; trial < n_evidence_trials; ++trial) {
        auto e = random_evidence(rng, n, evm::next_unit(rng) * 0.8);
        std::uint64_t total = 0;
        for (const auto& t : vals) {
            std::uint64_t expected = oracle::count_completions(
                n, [&](const std::vector<std::uint8_t>& x) { return stat.value(x); }, t, e);
            std::uint64_t got = stat.count_completions(t, e);
            REQUIRE(got == expected);
            double log_got = stat.log_count_completions(t, e);
            if (expected == 0) {
                REQUIRE(log_got == neg_inf);
            } else {
                REQUIRE(log_got ==
                        Catch::Approx(std::log(static_cast<double>(expected))).epsilon(1e-10));
            }
            auto witness = stat.complete(t, e);
            REQUIRE(witness.has_value() == (expected > 0));
            if (witness) {
                REQUIRE(stat.value(*witness) == t);
                REQUIRE(e.compatible_dense(*witness));
            }
            total += expected;
        }
        REQUIRE(total == (1ull << (n - static_cast<int>(e.size()))));
    }
}

}  // namespace

TEST_CASE("cardinality statistic basics") {
    CardinalityStatistic stat(4);
    CHECK(stat.value(from_string("1011")) == 3);
    CHECK(CardinalityStatistic(3).values() == std::vector<int>{0, 1, 2, 3});
    CHECK_THROWS_AS(stat.value(from_string("10")), evm::Error);

    // t=3 reachable from one observed 1 and two free ones
    CardinalityStatistic five(5);
    PartialAssignment e{{1, 1}, {3, 0}};
    auto witness = five.complete(3, e);
    REQUIRE(witness.has_value());
    CHECK(*witness == from_string("11100"));

    CHECK_FALSE(five.complete(0, PartialAssignment{{2, 1}}).has_value());

    CHECK(five.count_completions(3, e) == 3);  // C(3,2)
}

TEST_CASE("transition statistic basics") {
    TransitionStatistic eight(8);
    CHECK(eight.value(from_string("11011111")) == 1);
    CHECK(eight.value(from_string("01010101")) == 4);
    CHECK(eight.values() == std::vector<int>{0, 1, 2, 3, 4});

    TransitionStatistic four(4);
    auto witness = four.complete(2, {});
    REQUIRE(witness.has_value());
    CHECK(*witness == from_string("0101"));

    // frozen from enumeration: 0101 is the only length-4 string with two
    // 01 substrings
    std::uint64_t expected = oracle::count_completions(
        4, [&](const std::vector<std::uint8_t>& x) { return four.value(x); }, 2,
        PartialAssignment{});
    CHECK(expected == 1);
    CHECK(four.count_completions(2, {}) == expected);
}

TEST_CASE("block statistic basics") {
    evm::Partition parts{{{0, 1}, {2, 3, 4}}};
    BlockCountStatistic stat(parts);
    CHECK(stat.values().size() == 12);
    CHECK(stat.values().front() == std::vector<int>{0, 0});
    CHECK(stat.values().back() == std::vector<int>{2, 3});
    CHECK(stat.value(from_string("10110")) == std::vector<int>{1, 2});
    CHECK(stat.count_completions({1, 2}, {}) == 6);  // C(2,1) * C(3,2)
}

TEST_CASE("nested pooling basics") {
    std::vector<std::vector<std::uint8_t>> zeros(4, std::vector<std::uint8_t>(4, 0));
    CHECK(evm::nested_pooling_value(zeros, 2, 0) == 0);
    CHECK(evm::nested_pooling_value(zeros, 2, 2) == 0);

    std::vector<std::vector<std::uint8_t>> ones(4, std::vector<std::uint8_t>(4, 1));
    CHECK(evm::nested_pooling_value(ones, 2, 0) == 4);

    auto single = zeros;
    single[1][2] = 1;
    CHECK(evm::nested_pooling_value(single, 2, 0) == 1);

    CHECK_THROWS_AS(NestedPoolingStatistic(4, 3, 0), evm::Error);
    CHECK_THROWS_AS(NestedPoolingStatistic(4, 2, 4), evm::Error);
}

TEST_CASE("value-set size bound is enforced") {
    // five singleton parts enumerate 2^5 values, above the n^2+1 default
    evm::Partition parts{{{0}, {1}, {2}, {3}, {4}}};
    CHECK_THROWS_AS(BlockCountStatistic(parts), evm::Error);
    CHECK_NOTHROW(BlockCountStatistic(parts, 64));
    CHECK_NOTHROW(CardinalityStatistic(10000));
}

TEST_CASE("counts and completions match enumeration: cardinality") {
    evm::Rng rng(101);
    for (int n : {1, 3, 6, 9}) check_against_enumeration(CardinalityStatistic(n), rng, 12);
}

TEST_CASE("counts and completions match enumeration: transition") {
    evm::Rng rng(202);
    for (int n : {1, 2, 4, 7, 10, 14}) check_against_enumeration(TransitionStatistic(n), rng, 12);
}

TEST_CASE("counts and completions match enumeration: block") {
    evm::Rng rng(303);
    check_against_enumeration(BlockCountStatistic({{{0, 1}, {2, 3, 4}}}), rng, 12);
    check_against_enumeration(BlockCountStatistic({{{0, 2, 4}, {1, 3}, {5}}}, 100), rng, 12);
    check_against_enumeration(BlockCountStatistic({{{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}}), rng, 12);
}

TEST_CASE("counts and completions match enumeration: nested pooling") {
    evm::Rng rng(404);
    check_against_enumeration(NestedPoolingStatistic(2, 1, 0), rng, 8);
    check_against_enumeration(NestedPoolingStatistic(3, 3, 4), rng, 8);
    check_against_enumeration(NestedPoolingStatistic(4, 2, 0), rng, 6);
    check_against_enumeration(NestedPoolingStatistic(4, 2, 2), rng, 6);
}

TEST_CASE("transition counting is exact for every value and dense evidence") {
    // exhaustive sweep at moderate n with many evidence patterns
    evm::Rng rng(505);
    TransitionStatistic stat(12);
    for (int trial = 0; trial < 60; ++trial) {
        auto e = random_evidence(rng, 12, evm::next_unit(rng));
        for (int t = 0; t <= stat.max_value(); ++t) {
            std::uint64_t expected = oracle::count_completions(
                12, [&](const std::vector<std::uint8_t>& x) { return stat.value(x); }, t, e);
            REQUIRE(stat.count_completions(t, e) == expected);
        }
    }
}

TEST_CASE("generic marginal and MAP agree with enumeration") {
    evm::Rng rng(606);
    auto run = [&](const auto& stat, int trials) {
        auto vals = stat.values();
        auto index_of = [&](const auto& t) { return stat.value_index(t); };
        auto value_of = [&](const std::vector<std::uint8_t>& x) { return stat.value(x); };
        for (int trial = 0; trial < trials; ++trial) {
            auto w = random_weights(rng, vals.size(), trial % 2 ? 0.3 : 0.0);
            std::vector<double> lw(w.size());
            for (std::size_t i = 0; i < w.size(); ++i)
                lw[i] = w[i] == 0.0 ? neg_inf : std::log(w[i]);
            auto e = random_evidence(rng, stat.num_vars(), evm::next_unit(rng) * 0.7);
            double expected = oracle::statistic_marginal(stat.num_vars(), value_of, index_of, w, e);
            double got = evm::generic_marginal(stat, lw, e);
            REQUIRE(std::exp(got) == Catch::Approx(expected).margin(1e-9));

            double map_expected =
                oracle::statistic_map_prob(stat.num_vars(), value_of, index_of, w, e);
            auto map_got = evm::generic_map(stat, lw, e);
            REQUIRE(e.compatible_dense(map_got.assignment));
            if (map_expected == 0.0) {
                REQUIRE(map_got.log_prob == neg_inf);
            } else {
                REQUIRE(map_got.log_prob ==
                        Catch::Approx(std::log(map_expected)).margin(1e-12));
            }
        }
    };
    run(CardinalityStatistic(9), 25);
    run(TransitionStatistic(9), 25);
    run(BlockCountStatistic({{{0, 3, 6}, {1, 2, 4, 5}}}, 64), 25);
    run(NestedPoolingStatistic(3, 3, 2), 15);
}

TEST_CASE("empty evidence marginal is exactly zero") {
    TransitionStatistic stat(6);
    auto w = std::vector<double>(stat.values().size(), 1.0 / stat.values().size());
    std::vector<double> lw(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) lw[i] = std::log(w[i]);
    CHECK(evm::generic_marginal(stat, lw, {}) == 0.0);
}

TEST_CASE("uniform pooling weights marginalize to one over a 4x4 grid") {
    NestedPoolingStatistic stat(4, 2, 0);
    std::vector<double> lw(5, std::log(0.2));
    CHECK(evm::generic_marginal(stat, lw, {}) == 0.0);
    CHECK(evm::generic_marginal(stat, lw, PartialAssignment{{0, 1}, {5, 0}}) <= 0.0);
    // MAP probability against full enumeration over 2^16 grids
    auto index_of = [&](int t) { return stat.value_index(t); };
    auto value_of = [&](const std::vector<std::uint8_t>& x) { return stat.value(x); };
    std::vector<double> w(5, 0.2);
    double expected = oracle::statistic_map_prob(16, value_of, index_of, w, {});
    auto got = evm::generic_map(stat, lw, {});
    CHECK(got.log_prob == Catch::Approx(std::log(expected)).margin(1e-12));
}

TEST_CASE("generic cardinality inference reduces to the block operations") {
    evm::Rng rng(707);
    for (int trial = 0; trial < 30; ++trial) {
        int m = 1 + static_cast<int>(evm::next_below(rng, 12));
        auto w = random_weights(rng, static_cast<std::size_t>(m) + 1, 0.2);
        std::vector<int> vars(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) vars[static_cast<std::size_t>(i)] = i;
        evm::ExchangeableBlock block(vars, w);
        CardinalityStatistic stat(m);
        auto e = random_evidence(rng, m, evm::next_unit(rng) * 0.8);

        double via_stat = evm::generic_marginal(stat, block.log_weights(), e);
        double via_block = block.log_marginal(e);
        if (via_block == neg_inf) {
            REQUIRE(via_stat == neg_inf);
        } else {
            REQUIRE(via_stat == Catch::Approx(via_block).margin(1e-12));
        }

        auto map_stat = evm::generic_map(stat, block.log_weights(), e);
        auto map_block = block.map_completion(e);
        if (map_block.log_prob == neg_inf) {
            REQUIRE(map_stat.log_prob == neg_inf);
        } else {
            REQUIRE(map_stat.log_prob == Catch::Approx(map_block.log_prob).margin(1e-12));
        }
    }
}

TEST_CASE("cardinality value is permutation invariant") {
    evm::Rng rng(808);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(evm::next_below(rng, 7));
        CardinalityStatistic stat(n);
        auto x = oracle::bits_of(rng(), n);
        int base = stat.value(x);
        for (int rep = 0; rep < 6; ++rep) {
            evm::shuffle_inplace(x, rng);
            REQUIRE(stat.value(x) == base);
        }
    }
}

TEST_CASE("block statistic value is invariant within parts") {
    evm::Rng rng(909);
    evm::Partition parts{{{0, 1, 2}, {3, 4, 5, 6}}};
    BlockCountStatistic stat(parts, 64);
    for (int trial = 0; trial < 20; ++trial) {
        auto x = oracle::bits_of(rng(), 7);
        auto base = stat.value(x);
        // shuffle within each part only
        for (int rep = 0; rep < 4; ++rep) {
            for (const auto& part : parts.blocks) {
                std::vector<std::uint8_t> vals;
                for (int idx : part) vals.push_back(x[static_cast<std::size_t>(idx)]);
                evm::shuffle_inplace(vals, rng);
                for (std::size_t i = 0; i < part.size(); ++i)
                    x[static_cast<std::size_t>(part[i])] = vals[i];
            }
            REQUIRE(stat.value(x) == base);
        }
    }
}
