#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "evm/common.hpp"
#include "evm/dataset.hpp"
#include "evm/generators.hpp"
#include "evm/mevm.hpp"
#include "evm/structure.hpp"

namespace evm {

enum class StructureMode {
    test,  // re-learn per-class partitions from Welch tests each iteration
    nb,    // fixed singleton blocks (latent naive Bayes)
    full   // fixed single all-variable block per class
};

struct EmConfig {
    int k = 1;
    double stop_delta = 0.001;  // stop when the avg-LL increase drops below
    int max_iters = 100;
    int restarts = 10;
    double significance = 0.1;
    double alpha = 0.1;
    std::uint64_t seed = 0;
    StructureMode structure = StructureMode::test;

    void validate() const {
        if (k < 1) throw Error("component count must be at least 1");
        if (stop_delta <= 0.0) throw Error("stop_delta must be positive");
        if (max_iters < 1) throw Error("max_iters must be at least 1");
        if (restarts < 1) throw Error("restarts must be at least 1");
    }
};

using Responsibilities = std::vector<std::vector<double>>;

// Posterior component memberships, log-space with max subtraction. A row
// whose joint is -inf under every component becomes uniform.
inline Responsibilities e_step(const MevmModel& model, const BinaryDataset& data) {
    std::size_t k = static_cast<std::size_t>(model.num_classes());
    Responsibilities resp(data.num_rows(), std::vector<double>(k, 0.0));
    JointScratch scratch;
    std::vector<double> joint;
    for (std::size_t i = 0; i < data.num_rows(); ++i) {
        model.log_joint_all_sparse(data.rows[i], joint, scratch);
        double m = neg_inf;
        for (double v : joint) m = std::max(m, v);
        if (m == neg_inf) {
            for (auto& r : resp[i]) r = 1.0 / static_cast<double>(k);
            continue;
        }
        double denom = 0.0;
        for (double v : joint) denom += std::exp(v - m);
        for (std::size_t y = 0; y < k; ++y) resp[i][y] = std::exp(joint[y] - m) / denom;
    }
    return resp;
}

// (1/N) sum_i log sum_y P(y, x_i), summed in row order for reproducibility.
inline double avg_log_likelihood(const MevmModel& model, const BinaryDataset& data) {
    if (data.num_rows() == 0) throw Error("cannot evaluate likelihood on empty data");
    JointScratch scratch;
    std::vector<double> joint;
    double total = 0.0;
    for (std::size_t i = 0; i < data.num_rows(); ++i) {
        model.log_joint_all_sparse(data.rows[i], joint, scratch);
        total += log_sum(joint);
    }
    return total / static_cast<double>(data.num_rows());
}

// Hard initial assignment: floor(N/k) shuffled examples per component, the
// remainder joins the last one.
inline Responsibilities initial_responsibilities(std::size_t n_rows, int k, Rng& rng) {
    std::vector<std::size_t> order(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) order[i] = i;
    shuffle_inplace(order, rng);
    Responsibilities resp(n_rows, std::vector<double>(static_cast<std::size_t>(k), 0.0));
    std::size_t per = n_rows / static_cast<std::size_t>(k);
    for (std::size_t pos = 0; pos < n_rows; ++pos) {
        std::size_t c = per == 0 ? static_cast<std::size_t>(k) - 1
                                 : std::min(pos / per, static_cast<std::size_t>(k) - 1);
        resp[order[pos]][c] = 1.0;
    }
    return resp;
}

inline std::vector<Partition> learn_partitions(const BinaryDataset& data,
                                               const Responsibilities& resp,
                                               const EmConfig& config) {
    switch (config.structure) {
        case StructureMode::nb:
            return naive_bayes_structure(data.n_vars, config.k);
        case StructureMode::full:
            return full_exchangeable_structure(data.n_vars, config.k);
        case StructureMode::test:
            break;
    }
    std::vector<Partition> out;
    out.reserve(static_cast<std::size_t>(config.k));
    std::vector<double> weights(data.num_rows());
    for (int y = 0; y < config.k; ++y) {
        for (std::size_t i = 0; i < data.num_rows(); ++i)
            weights[i] = resp[i][static_cast<std::size_t>(y)];
        out.push_back(partition_by_means(weighted_moments(data, weights), config.significance));
    }
    return out;
}

struct EmIteration {
    int iteration = 0;
    double train_ll = 0.0;
    std::vector<int> block_counts;
    bool kept_new_structure = false;
};

struct EmTrace {
    struct Restart {
        std::vector<EmIteration> iterations;
        double final_ll = neg_inf;
    };
    std::vector<Restart> restarts;
    int best_restart = 0;

    // line format: iteration, train LL, per-class block counts, structure tag
    std::string to_text() const {
        std::ostringstream out;
        for (std::size_t r = 0; r < restarts.size(); ++r) {
            out << "restart " << r << '\n';
            for (const auto& it : restarts[r].iterations) {
                out << it.iteration << ' ' << detail::format_double(it.train_ll) << ' ';
                for (std::size_t y = 0; y < it.block_counts.size(); ++y)
                    out << (y ? "," : "") << it.block_counts[y];
                out << ' ' << (it.iteration == 0 ? "init" : it.kept_new_structure ? "new" : "old")
                    << '\n';
            }
        }
        out << "best " << best_restart << '\n';
        return out.str();
    }
};

struct EmResult {
    MevmModel model;
    EmTrace trace;
};

// Structural EM: soft assignments, per-iteration structure re-learning,
// parameter updates for the previous and the fresh structure, and selection
// of whichever scores higher on training likelihood (ties keep the previous
// structure). Best of `restarts` runs by final training likelihood.
inline EmResult em_fit(const BinaryDataset& data, const EmConfig& config) {
    config.validate();
    data.validate();
    if (data.num_rows() < static_cast<std::size_t>(config.k))
        throw Error("need at least as many examples as components");

    EmTrace trace;
    std::optional<MevmModel> best_model;
    double best_ll = neg_inf;

    for (int r = 0; r < config.restarts; ++r) {
        Rng rng(config.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(r + 1));
        EmTrace::Restart restart;

        Responsibilities resp = initial_responsibilities(data.num_rows(), config.k, rng);
        std::vector<Partition> partitions = learn_partitions(data, resp, config);
        MevmModel model = fit_weighted(data, resp, partitions, config.alpha);
        double prev_ll = avg_log_likelihood(model, data);
        restart.iterations.push_back({0, prev_ll, model.block_counts(), false});

        for (int iter = 1; iter <= config.max_iters; ++iter) {
            resp = e_step(model, data);
            std::vector<Partition> fresh = learn_partitions(data, resp, config);
            MevmModel with_old = fit_weighted(data, resp, model.partitions(), config.alpha);
            double ll_old = avg_log_likelihood(with_old, data);
            double ll = ll_old;
            bool kept_new = false;
            if (config.structure == StructureMode::test && fresh != model.partitions()) {
                MevmModel with_new = fit_weighted(data, resp, fresh, config.alpha);
                double ll_new = avg_log_likelihood(with_new, data);
                if (ll_new > ll_old) {
                    model = std::move(with_new);
                    ll = ll_new;
                    kept_new = true;
                } else {
                    model = std::move(with_old);
                }
            } else {
                model = std::move(with_old);
            }
            restart.iterations.push_back({iter, ll, model.block_counts(), kept_new});
            double gain = ll - prev_ll;
            prev_ll = ll;
            if (gain < config.stop_delta) break;
        }
        restart.final_ll = prev_ll;
        trace.restarts.push_back(std::move(restart));
        if (prev_ll > best_ll) {
            best_ll = prev_ll;
            best_model = std::move(model);
            trace.best_restart = r;
        }
    }
    return {std::move(*best_model), std::move(trace)};
}

}  // namespace evm
