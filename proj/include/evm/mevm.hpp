#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "evm/assignment.hpp"
#include "evm/block.hpp"
#include "evm/common.hpp"
#include "evm/dataset.hpp"
#include "evm/partition.hpp"

namespace evm {

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Reusable buffers for the sparse-row evaluation hot path.
struct JointScratch {
    std::vector<int> counts;
    std::vector<int> touched;
};

// Mixture of exchangeable blocks: class prior, per-class partition of the
// attributes, and per block a count distribution. Conditioned on the class
// the blocks are independent, so the joint factorizes over them.
// Immutable after construction; all queries are const and thread-safe.
class MevmModel {
public:
    MevmModel(std::vector<double> prior, std::vector<Partition> partitions,
              std::vector<std::vector<std::vector<double>>> block_weights, double alpha = 0.0)
        : prior_(std::move(prior)), partitions_(std::move(partitions)), alpha_(alpha) {
        if (prior_.empty() || prior_.size() != partitions_.size() ||
            prior_.size() != block_weights.size())
            throw Error("prior, partitions and weights must agree on the class count");
        n_vars_ = 0;
        for (const auto& block : partitions_[0].blocks) n_vars_ += static_cast<int>(block.size());
        double total = 0.0;
        log_prior_.resize(prior_.size());
        for (std::size_t y = 0; y < prior_.size(); ++y) {
            if (prior_[y] < 0.0 || !std::isfinite(prior_[y])) throw Error("bad prior weight");
            total += prior_[y];
            log_prior_[y] = prior_[y] == 0.0 ? neg_inf : std::log(prior_[y]);
        }
        if (std::abs(total - 1.0) > 1e-9) throw Error("class prior does not sum to 1");
        blocks_.resize(partitions_.size());
        block_of_.resize(partitions_.size());
        for (std::size_t y = 0; y < partitions_.size(); ++y) {
            partitions_[y].validate(n_vars_);
            if (block_weights[y].size() != partitions_[y].blocks.size())
                throw Error("class " + std::to_string(y) + ": weight row per block required");
            block_of_[y].assign(static_cast<std::size_t>(n_vars_), 0);
            blocks_[y].reserve(partitions_[y].blocks.size());
            for (std::size_t b = 0; b < partitions_[y].blocks.size(); ++b) {
                for (int idx : partitions_[y].blocks[b])
                    block_of_[y][static_cast<std::size_t>(idx)] = static_cast<int>(b);
                blocks_[y].emplace_back(partitions_[y].blocks[b], std::move(block_weights[y][b]));
            }
        }
        // per-class score of the all-zero row, split into its finite part and
        // the number of blocks that veto an all-zero count outright; sparse
        // evaluation adds corrections only for blocks that contain ones
        zero_base_.resize(prior_.size());
        zero_vetoes_.resize(prior_.size());
        zero_veto_flag_.resize(prior_.size());
        for (std::size_t y = 0; y < prior_.size(); ++y) {
            double base = log_prior_[y];
            int vetoes = 0;
            zero_veto_flag_[y].assign(blocks_[y].size(), 0);
            for (std::size_t b = 0; b < blocks_[y].size(); ++b) {
                double s = blocks_[y][b].log_prob_count(0);
                if (s == neg_inf) {
                    ++vetoes;
                    zero_veto_flag_[y][b] = 1;
                } else {
                    base += s;
                }
            }
            zero_base_[y] = base;
            zero_vetoes_[y] = vetoes;
        }
    }

    int num_vars() const { return n_vars_; }
    int num_classes() const { return static_cast<int>(prior_.size()); }
    double alpha() const { return alpha_; }
    const std::vector<double>& prior() const { return prior_; }
    const std::vector<double>& log_prior() const { return log_prior_; }
    const std::vector<Partition>& partitions() const { return partitions_; }
    const std::vector<ExchangeableBlock>& class_blocks(int y) const {
        return blocks_[static_cast<std::size_t>(y)];
    }

    std::vector<int> block_counts() const {
        std::vector<int> out;
        out.reserve(blocks_.size());
        for (const auto& bs : blocks_) out.push_back(static_cast<int>(bs.size()));
        return out;
    }

    // (k-1) prior parameters plus |X| per block: k + kn - 1 regardless of
    // the partition shapes.
    std::int64_t free_param_count() const {
        std::int64_t count = num_classes() - 1;
        for (const auto& bs : blocks_)
            for (const auto& block : bs) count += block.size();
        return count;
    }

    double log_joint(int y, const std::vector<std::uint8_t>& x) const {
        if (static_cast<int>(x.size()) != n_vars_)
            throw Error("assignment must cover all " + std::to_string(n_vars_) + " variables");
        check_class(y);
        return log_joint_sparse(y, BinaryDataset::sparsify(x));
    }

    double log_joint_sparse(int y, const std::vector<int>& ones) const {
        check_class(y);
        JointScratch scratch;
        return log_joint_sparse(y, ones, scratch);
    }

    double log_joint_sparse(int y, const std::vector<int>& ones, JointScratch& scratch) const;

    // log P(y, x) for every class in one sweep over the row.
    void log_joint_all_sparse(const std::vector<int>& ones, std::vector<double>& out,
                              JointScratch& scratch) const;

    int classify(const std::vector<std::uint8_t>& x) const {
        return classify_sparse(BinaryDataset::sparsify(x));
    }

    int classify_sparse(const std::vector<int>& ones) const {
        JointScratch scratch;
        return classify_sparse(ones, scratch);
    }

    int classify_sparse(const std::vector<int>& ones, JointScratch& scratch) const {
        std::vector<double> joint;
        log_joint_all_sparse(ones, joint, scratch);
        int best = 0;
        for (int y = 1; y < num_classes(); ++y)
            if (joint[static_cast<std::size_t>(y)] > joint[static_cast<std::size_t>(best)]) best = y;
        return best;
    }

    // log P(y, e): prior plus per-block evidence marginals.
    double log_joint_partial(int y, const PartialAssignment& e) const {
        check_class(y);
        double acc = log_prior_[static_cast<std::size_t>(y)];
        if (e.empty() || acc == neg_inf) return acc;
        // split the evidence per block; entries are sorted so each per-block
        // list stays sorted
        std::vector<PartialAssignment> parts(blocks_[static_cast<std::size_t>(y)].size());
        for (const auto& [idx, val] : e.entries()) {
            if (idx < 0 || idx >= n_vars_)
                throw Error("evidence variable " + std::to_string(idx) + " out of range");
            parts[static_cast<std::size_t>(block_of_[static_cast<std::size_t>(y)]
                                                    [static_cast<std::size_t>(idx)])]
                .set(idx, val);
        }
        for (std::size_t b = 0; b < parts.size(); ++b) {
            if (parts[b].empty()) continue;
            acc += blocks_[static_cast<std::size_t>(y)][b].log_marginal(parts[b]);
            if (acc == neg_inf) break;
        }
        return acc;
    }

    // log P(e) marginalized over the class.
    double log_marginal(const PartialAssignment& e) const {
        double acc = neg_inf;
        for (int y = 0; y < num_classes(); ++y) acc = log_add(acc, log_joint_partial(y, e));
        return acc;
    }

    struct MapCompletion {
        int class_index = 0;
        PartialAssignment assignment;
        double log_prob = neg_inf;
    };

    // argmax over class and completions of e, blockwise per class.
    MapCompletion map_completion(const PartialAssignment& e) const {
        MapCompletion best;
        bool first = true;
        for (int y = 0; y < num_classes(); ++y) {
            std::vector<PartialAssignment> parts(blocks_[static_cast<std::size_t>(y)].size());
            for (const auto& [idx, val] : e.entries()) {
                if (idx < 0 || idx >= n_vars_)
                    throw Error("evidence variable " + std::to_string(idx) + " out of range");
                parts[static_cast<std::size_t>(block_of_[static_cast<std::size_t>(y)]
                                                        [static_cast<std::size_t>(idx)])]
                    .set(idx, val);
            }
            double score = log_prior_[static_cast<std::size_t>(y)];
            PartialAssignment full;
            for (std::size_t b = 0; b < parts.size(); ++b) {
                auto res = blocks_[static_cast<std::size_t>(y)][b].map_completion(parts[b]);
                score = score == neg_inf || res.log_prob == neg_inf ? neg_inf
                                                                    : score + res.log_prob;
                const auto& vars = blocks_[static_cast<std::size_t>(y)][b].var_indices();
                for (std::size_t i = 0; i < vars.size(); ++i) full.set(vars[i], res.values[i] != 0);
            }
            if (first || score > best.log_prob) {
                best.class_index = y;
                best.assignment = std::move(full);
                best.log_prob = score;
                first = false;
            }
        }
        return best;
    }

    std::string to_text() const {
        std::ostringstream out;
        out << num_classes() << ' ' << n_vars_ << ' ' << detail::format_double(alpha_) << '\n';
        for (std::size_t y = 0; y < prior_.size(); ++y)
            out << (y ? " " : "") << detail::format_double(prior_[y]);
        out << '\n';
        for (std::size_t y = 0; y < prior_.size(); ++y) {
            const auto& partition = partitions_[y];
            for (std::size_t b = 0; b < partition.blocks.size(); ++b) {
                if (b) out << ';';
                const auto& block = partition.blocks[b];
                for (std::size_t i = 0; i < block.size(); ++i)
                    out << (i ? "," : "") << block[i];
            }
            out << '\n';
            for (const auto& block : blocks_[y]) {
                const auto& w = block.weights();
                for (std::size_t t = 0; t < w.size(); ++t)
                    out << (t ? " " : "") << detail::format_double(w[t]);
                out << '\n';
            }
        }
        return out.str();
    }

    static MevmModel from_text(const std::string& text);

private:
    void check_class(int y) const {
        if (y < 0 || y >= num_classes())
            throw Error("class index " + std::to_string(y) + " out of range");
    }

    std::vector<double> prior_;
    std::vector<double> log_prior_;
    std::vector<Partition> partitions_;
    double alpha_ = 0.0;
    int n_vars_ = 0;
    std::vector<std::vector<ExchangeableBlock>> blocks_;
    std::vector<std::vector<int>> block_of_;
    std::vector<double> zero_base_;
    std::vector<int> zero_vetoes_;
    std::vector<std::vector<std::uint8_t>> zero_veto_flag_;
};

inline double MevmModel::log_joint_sparse(int y, const std::vector<int>& ones,
                                          JointScratch& scratch) const {
    check_class(y);
    const auto& blocks = blocks_[static_cast<std::size_t>(y)];
    const auto& lookup = block_of_[static_cast<std::size_t>(y)];
    scratch.counts.assign(blocks.size(), 0);
    scratch.touched.clear();
    for (int idx : ones) {
        if (idx < 0 || idx >= n_vars_)
            throw Error("row index " + std::to_string(idx) + " out of range");
        int b = lookup[static_cast<std::size_t>(idx)];
        if (scratch.counts[static_cast<std::size_t>(b)]++ == 0) scratch.touched.push_back(b);
    }
    double acc = zero_base_[static_cast<std::size_t>(y)];
    int vetoes = zero_vetoes_[static_cast<std::size_t>(y)];
    for (int b : scratch.touched) {
        const auto& block = blocks[static_cast<std::size_t>(b)];
        double score = block.log_prob_count(scratch.counts[static_cast<std::size_t>(b)]);
        if (score == neg_inf) return neg_inf;
        if (zero_veto_flag_[static_cast<std::size_t>(y)][static_cast<std::size_t>(b)]) {
            --vetoes;
            acc += score;
        } else {
            acc += score - block.log_prob_count(0);
        }
    }
    // an untouched block with zero weight on an all-zero count kills the row
    return vetoes > 0 ? neg_inf : acc;
}

inline void MevmModel::log_joint_all_sparse(const std::vector<int>& ones,
                                            std::vector<double>& out,
                                            JointScratch& scratch) const {
    out.resize(prior_.size());
    for (int y = 0; y < num_classes(); ++y)
        out[static_cast<std::size_t>(y)] = log_joint_sparse(y, ones, scratch);
}

inline MevmModel MevmModel::from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) throw Error(std::string("model file truncated: missing ") + what);
        return line;
    };
    int k = 0, n = 0;
    double alpha = 0.0;
    {
        std::istringstream hdr(next_line("header"));
        if (!(hdr >> k >> n >> alpha) || k < 1 || n < 1)
            throw Error("bad model header");
    }
    std::vector<double> prior(static_cast<std::size_t>(k));
    {
        std::istringstream ps(next_line("prior"));
        for (auto& p : prior)
            if (!(ps >> p)) throw Error("bad prior line");
    }
    std::vector<Partition> partitions;
    std::vector<std::vector<std::vector<double>>> weights;
    for (int y = 0; y < k; ++y) {
        Partition partition;
        {
            std::istringstream bs(next_line("partition"));
            std::string block_text;
            while (std::getline(bs, block_text, ';')) {
                std::vector<int> block;
                std::istringstream is(block_text);
                std::string tok;
                while (std::getline(is, tok, ',')) {
                    try {
                        block.push_back(std::stoi(tok));
                    } catch (const std::exception&) {
                        throw Error("bad partition entry '" + tok + "'");
                    }
                }
                partition.blocks.push_back(std::move(block));
            }
        }
        partition.validate(n);
        std::vector<std::vector<double>> class_weights;
        for (const auto& block : partition.blocks) {
            std::istringstream ws(next_line("weights"));
            std::vector<double> w(block.size() + 1);
            for (auto& v : w)
                if (!(ws >> v)) throw Error("bad weight line");
            class_weights.push_back(std::move(w));
        }
        partitions.push_back(std::move(partition));
        weights.push_back(std::move(class_weights));
    }
    return MevmModel(std::move(prior), std::move(partitions), std::move(weights), alpha);
}

// Maximum-likelihood fit with per-example class responsibilities. With
// one-hot responsibilities this is the closed-form supervised estimate:
// class frequencies for the prior, count-of-ones frequencies per block.
// alpha adds per-category smoothing to both.
inline MevmModel fit_weighted(const BinaryDataset& data,
                              const std::vector<std::vector<double>>& resp,
                              const std::vector<Partition>& partitions, double alpha) {
    std::size_t n_rows = data.num_rows();
    std::size_t k = partitions.size();
    if (n_rows == 0) throw Error("cannot fit on an empty dataset");
    if (resp.size() != n_rows) throw Error("responsibility row per example required");
    std::vector<double> class_weight(k, 0.0);
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (resp[i].size() != k) throw Error("responsibility row has wrong width");
        for (std::size_t y = 0; y < k; ++y) class_weight[y] += resp[i][y];
    }
    std::vector<double> prior(k);
    double denom = static_cast<double>(n_rows) + alpha * static_cast<double>(k);
    for (std::size_t y = 0; y < k; ++y) prior[y] = (class_weight[y] + alpha) / denom;

    std::vector<std::vector<std::vector<double>>> weights(k);
    std::vector<int> block_of(static_cast<std::size_t>(data.n_vars));
    std::vector<double> counts;   // flattened per-(block, t) weighted counts
    std::vector<int> offsets;
    std::vector<int> row_counts;
    std::vector<int> touched;
    for (std::size_t y = 0; y < k; ++y) {
        const auto& partition = partitions[y];
        partition.validate(data.n_vars);
        offsets.assign(partition.blocks.size() + 1, 0);
        for (std::size_t b = 0; b < partition.blocks.size(); ++b) {
            for (int idx : partition.blocks[b]) block_of[static_cast<std::size_t>(idx)] = static_cast<int>(b);
            offsets[b + 1] = offsets[b] + static_cast<int>(partition.blocks[b].size()) + 1;
        }
        counts.assign(static_cast<std::size_t>(offsets.back()), 0.0);
        row_counts.assign(partition.blocks.size(), 0);
        for (std::size_t i = 0; i < n_rows; ++i) {
            double r = resp[i][y];
            touched.clear();
            for (int idx : data.rows[i]) {
                if (idx < 0 || idx >= data.n_vars)
                    throw Error("row index " + std::to_string(idx) + " out of range");
                int b = block_of[static_cast<std::size_t>(idx)];
                if (row_counts[static_cast<std::size_t>(b)]++ == 0) touched.push_back(b);
            }
            for (int b : touched) {
                counts[static_cast<std::size_t>(offsets[static_cast<std::size_t>(b)] +
                                                row_counts[static_cast<std::size_t>(b)])] += r;
                row_counts[static_cast<std::size_t>(b)] = 0;
            }
        }
        // zero-count cells get the leftover class mass
        auto& class_weights = weights[y];
        class_weights.resize(partition.blocks.size());
        for (std::size_t b = 0; b < partition.blocks.size(); ++b) {
            std::size_t m = partition.blocks[b].size();
            std::vector<double> w(m + 1);
            double seen = 0.0;
            for (std::size_t t = 1; t <= m; ++t) {
                w[t] = counts[static_cast<std::size_t>(offsets[b]) + t];
                seen += w[t];
            }
            w[0] = class_weight[y] - seen;
            if (w[0] < 0.0) w[0] = 0.0;  // guard fp residue
            double block_denom = class_weight[y] + alpha * static_cast<double>(m + 1);
            if (block_denom == 0.0) {
                // class received no mass and alpha = 0: fall back to uniform
                std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(m + 1));
            } else {
                for (auto& v : w) v = (v + alpha) / block_denom;
            }
            class_weights[b] = std::move(w);
        }
    }
    return MevmModel(std::move(prior), partitions, std::move(weights), alpha);
}

inline MevmModel fit_supervised(const LabeledDataset& data,
                                const std::vector<Partition>& partitions, double alpha) {
    data.validate();
    std::size_t k = partitions.size();
    if (static_cast<std::size_t>(data.n_classes) > k)
        throw Error("dataset has more classes than partitions");
    std::vector<std::vector<double>> resp(data.data.num_rows(), std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < data.labels.size(); ++i)
        resp[i][static_cast<std::size_t>(data.labels[i])] = 1.0;
    return fit_weighted(data.data, resp, partitions, alpha);
}

}  // namespace evm
