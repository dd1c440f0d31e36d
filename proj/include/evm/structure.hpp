#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "evm/common.hpp"
#include "evm/dataset.hpp"
#include "evm/partition.hpp"
#include "evm/welch.hpp"

namespace evm {

// Weighted first and second moments of one variable under per-example
// weights (class indicators or EM responsibilities).
struct VariableMoments {
    double mean = 0.0;
    double variance = 0.0;
    double ess = 0.0;  // sum of the weights
};

// Moments for every variable under the given weights. For binary data the
// weighted variance is exactly mean * (1 - mean).
inline std::vector<VariableMoments> weighted_moments(const BinaryDataset& data,
                                                     const std::vector<double>& weights) {
    if (weights.size() != data.num_rows())
        throw Error("one weight per example required");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw Error("negative example weight");
        total += w;
    }
    std::vector<double> sums(static_cast<std::size_t>(data.n_vars), 0.0);
    for (std::size_t i = 0; i < data.num_rows(); ++i) {
        double w = weights[i];
        if (w == 0.0) continue;
        for (int idx : data.rows[i]) sums[static_cast<std::size_t>(idx)] += w;
    }
    std::vector<VariableMoments> out(static_cast<std::size_t>(data.n_vars));
    for (std::size_t j = 0; j < out.size(); ++j) {
        double mean = total > 0.0 ? sums[j] / total : 0.0;
        out[j] = {mean, mean * (1.0 - mean), total};
    }
    return out;
}

inline std::vector<VariableMoments> class_moments(const LabeledDataset& data, int y) {
    std::vector<double> weights(data.data.num_rows(), 0.0);
    for (std::size_t i = 0; i < data.labels.size(); ++i)
        if (data.labels[i] == y) weights[i] = 1.0;
    return weighted_moments(data.data, weights);
}

// Group variables whose means a Welch test cannot tell apart. Variables are
// sorted by estimated mean and the sorted sequence is cut wherever the test
// rejects equality of two neighbours (p < significance). Testing neighbours
// rather than all pairs keeps a genuinely exchangeable set of variables in
// one block: across hundreds of variables the extreme sample means differ
// significantly even under the null, while adjacent order statistics do not.
// When the effective sample size is too small to test, everything lands in
// one block.
inline Partition partition_by_means(const std::vector<VariableMoments>& moments,
                                    double significance) {
    if (moments.empty()) throw Error("no variables to partition");
    int n = static_cast<int>(moments.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double ma = moments[static_cast<std::size_t>(a)].mean;
        double mb = moments[static_cast<std::size_t>(b)].mean;
        return ma != mb ? ma < mb : a < b;
    });
    bool testable = true;
    for (const auto& m : moments)
        if (m.ess <= 1.0) testable = false;

    Partition out;
    std::vector<int> current{order[0]};
    for (int i = 1; i < n; ++i) {
        const auto& prev = moments[static_cast<std::size_t>(order[static_cast<std::size_t>(i - 1)])];
        const auto& cur = moments[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        bool split = testable &&
                     welch_p_value(prev.mean, prev.variance, prev.ess, cur.mean, cur.variance,
                                   cur.ess) < significance;
        if (split) {
            std::sort(current.begin(), current.end());
            out.blocks.push_back(std::move(current));
            current.clear();
        }
        current.push_back(order[static_cast<std::size_t>(i)]);
    }
    std::sort(current.begin(), current.end());
    out.blocks.push_back(std::move(current));
    return out;
}

// Per-condition report of the necessary exchangeability conditions: equal
// means, equal variances, and equal pairwise covariances bounded below by
// -Var/(m-1). Each estimate is tested against the pooled block estimate and
// the per-test level is Bonferroni-divided by the family size, so the
// family-wise false-alarm rate stays near `significance` for any block size.
// Advisory; the default structure learning uses condition (1) only.
struct ExchangeabilityReport {
    bool means_equal = true;
    double means_min_p = 1.0;

    bool variances_equal = true;
    double variances_min_p = 1.0;

    bool covariances_equal = true;
    double covariances_min_p = 1.0;
    bool covariance_bound_ok = true;
    double min_covariance = 0.0;
    double covariance_bound = 0.0;  // -mean block variance / (m - 1)
};

inline ExchangeabilityReport exchangeability_diagnostics(const BinaryDataset& data,
                                                         const std::vector<int>& block,
                                                         const std::vector<double>& weights,
                                                         double significance = 0.1) {
    if (block.size() < 2) throw Error("diagnostics need a block of at least two variables");
    auto moments = weighted_moments(data, weights);
    ExchangeabilityReport report;
    std::size_t m = block.size();
    double ess = moments[static_cast<std::size_t>(block[0])].ess;

    double pooled_mean = 0.0, var_sum = 0.0;
    for (int idx : block) {
        pooled_mean += moments[static_cast<std::size_t>(idx)].mean;
        var_sum += moments[static_cast<std::size_t>(idx)].variance;
    }
    pooled_mean /= static_cast<double>(m);
    double pooled_var = pooled_mean * (1.0 - pooled_mean);
    double mean_var = var_sum / static_cast<double>(m);

    for (int idx : block) {
        const auto& mo = moments[static_cast<std::size_t>(idx)];
        double p_mean = welch_p_value(mo.mean, mo.variance, mo.ess, pooled_mean, pooled_var,
                                      ess * static_cast<double>(m));
        report.means_min_p = std::min(report.means_min_p, p_mean);

        // variance of a binary variable is a function of its mean; compare to
        // the block average with a delta-method z-test
        double se = std::abs(1.0 - 2.0 * mo.mean) *
                    std::sqrt(std::max(mo.variance, 0.0) / mo.ess);
        double p_var;
        if (se == 0.0)
            p_var = mo.variance == mean_var ? 1.0 : 0.0;
        else
            p_var = std::erfc(std::abs(mo.variance - mean_var) / se / std::sqrt(2.0));
        report.variances_min_p = std::min(report.variances_min_p, p_var);
    }
    double mean_level = significance / static_cast<double>(m);
    report.means_equal = report.means_min_p >= mean_level;
    report.variances_equal = report.variances_min_p >= mean_level;

    // pairwise product means E[X_a X_b]; with equal means the covariances
    // agree exactly when these do
    std::vector<double> prod_sum(m * m, 0.0);
    std::vector<char> in_block(static_cast<std::size_t>(data.n_vars), 0);
    std::vector<std::size_t> pos(static_cast<std::size_t>(data.n_vars), 0);
    for (std::size_t a = 0; a < m; ++a) {
        in_block[static_cast<std::size_t>(block[a])] = 1;
        pos[static_cast<std::size_t>(block[a])] = a;
    }
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < data.num_rows(); ++i) {
        double w = weights[i];
        if (w == 0.0) continue;
        present.clear();
        for (int idx : data.rows[i])
            if (in_block[static_cast<std::size_t>(idx)])
                present.push_back(pos[static_cast<std::size_t>(idx)]);
        for (std::size_t a : present)
            for (std::size_t b : present)
                if (a < b) prod_sum[a * m + b] += w;
    }

    std::size_t n_pairs = m * (m - 1) / 2;
    std::vector<double> prods;
    prods.reserve(n_pairs);
    double min_cov = 1.0, pooled_prod = 0.0;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            double q = ess > 0.0 ? prod_sum[a * m + b] / ess : 0.0;
            prods.push_back(q);
            pooled_prod += q;
            double cov = q - moments[static_cast<std::size_t>(block[a])].mean *
                                 moments[static_cast<std::size_t>(block[b])].mean;
            min_cov = std::min(min_cov, cov);
        }
    pooled_prod /= static_cast<double>(n_pairs);
    for (double q : prods) {
        double p = welch_p_value(q, q * (1.0 - q), ess, pooled_prod,
                                 pooled_prod * (1.0 - pooled_prod),
                                 ess * static_cast<double>(n_pairs));
        report.covariances_min_p = std::min(report.covariances_min_p, p);
    }
    report.covariances_equal =
        report.covariances_min_p >= significance / static_cast<double>(n_pairs);
    report.min_covariance = min_cov;
    report.covariance_bound = -mean_var / static_cast<double>(m - 1);
    report.covariance_bound_ok = report.min_covariance >= report.covariance_bound;
    return report;
}

}  // namespace evm
