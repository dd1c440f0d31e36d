// Command-line surface: generate synthetic datasets, train and evaluate
// classifiers and density models, run inference queries, and re-run the
// enumeration oracle checks end to end.
//
// Exit codes: 0 success, 1 usage, 2 data/model error, 3 oracle failure.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evm/evm.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw evm::Error("cannot write " + path);
    out << contents;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw evm::Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

evm::PartialAssignment parse_evidence(const std::string& text) {
    evm::PartialAssignment e;
    if (text.empty()) return e;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw evm::Error("evidence item '" + item + "' is not index=value");
        int idx = 0, val = 0;
        try {
            idx = std::stoi(item.substr(0, eq));
            val = std::stoi(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw evm::Error("evidence item '" + item + "' is not index=value");
        }
        if (val != 0 && val != 1) throw evm::Error("evidence value must be 0 or 1");
        e.set(idx, val == 1);
    }
    return e;
}

std::vector<evm::Partition> classify_structure(const evm::LabeledDataset& data,
                                               const std::string& mode, int k,
                                               double significance) {
    if (mode == "nb") return evm::naive_bayes_structure(data.data.n_vars, k);
    if (mode == "full") return evm::full_exchangeable_structure(data.data.n_vars, k);
    std::vector<evm::Partition> out;
    for (int y = 0; y < k; ++y)
        out.push_back(evm::partition_by_means(evm::class_moments(data, y), significance));
    return out;
}

// -------------------------------------------------------------------------
// generate

struct GenerateArgs {
    std::string kind = "parity";
    int n = 100;
    std::size_t train = 10000;
    std::size_t test = 1000;
    int residue = 3, modulus = 5, threshold = 10;
    std::string exact_set = "0,200,400,600,800,1000";
    std::uint64_t seed = 0;
    std::string out = "data";
};

int run_generate(const GenerateArgs& args) {
    evm::SymmetricFunction fn;
    if (args.kind == "parity") {
        fn = evm::SymmetricFunction::parity();
    } else if (args.kind == "counting") {
        fn = evm::SymmetricFunction::counting(args.residue, args.modulus);
    } else if (args.kind == "threshold") {
        fn = evm::SymmetricFunction::m_of_n(args.threshold);
    } else if (args.kind == "exact") {
        std::vector<int> set;
        std::istringstream in(args.exact_set);
        std::string tok;
        while (std::getline(in, tok, ',')) set.push_back(std::stoi(tok));
        fn = evm::SymmetricFunction::exact_values(set);
    } else {
        throw evm::Error("unknown kind '" + args.kind + "'");
    }
    auto train = evm::gen_symmetric(fn, args.n, args.train, args.seed);
    auto test = evm::gen_symmetric(fn, args.n, args.test, args.seed + 1);
    evm::save_labeled_csv(train, args.out + ".train.csv");
    evm::save_labeled_csv(test, args.out + ".test.csv");
    std::cout << "kind=" << args.kind << "\nn=" << args.n << "\ntrain_rows=" << args.train
              << "\ntest_rows=" << args.test << "\ntrain_file=" << args.out << ".train.csv"
              << "\ntest_file=" << args.out << ".test.csv\n";
    return 0;
}

// -------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string task = "classify";
    std::string data;
    std::string structure = "test";
    double alpha = 0.1;
    double significance = 0.1;
    int k = 20;
    double stop_delta = 0.001;
    int max_iters = 100;
    int restarts = 10;
    std::uint64_t seed = 0;
    std::string model = "model.mevm";
    std::string trace;
};

int run_train(const TrainArgs& args) {
    auto start = Clock::now();
    if (args.task == "classify") {
        auto data = evm::load_labeled_csv(args.data);
        int k = data.n_classes;
        auto partitions = classify_structure(data, args.structure, k, args.significance);
        auto model = evm::fit_supervised(data, partitions, args.alpha);
        write_file(args.model, model.to_text());

        std::size_t correct = 0;
        evm::JointScratch scratch;
        for (std::size_t i = 0; i < data.data.num_rows(); ++i)
            if (model.classify_sparse(data.data.rows[i], scratch) == data.labels[i]) ++correct;
        std::cout << "task=classify\nclasses=" << k << "\nvars=" << data.data.n_vars
                  << "\nrows=" << data.data.num_rows() << "\nfree_params="
                  << model.free_param_count() << "\ntrain_accuracy="
                  << fmt17(static_cast<double>(correct) /
                           static_cast<double>(data.data.num_rows()));
        auto blocks = model.block_counts();
        std::cout << "\nblocks=";
        for (std::size_t y = 0; y < blocks.size(); ++y)
            std::cout << (y ? "," : "") << blocks[y];
        std::cout << "\nmodel_file=" << args.model << '\n';
    } else if (args.task == "density") {
        auto data = evm::load_csv(args.data);
        evm::EmConfig config;
        config.k = args.k;
        config.stop_delta = args.stop_delta;
        config.max_iters = args.max_iters;
        config.restarts = args.restarts;
        config.significance = args.significance;
        config.alpha = args.alpha;
        config.seed = args.seed;
        if (args.structure == "nb")
            config.structure = evm::StructureMode::nb;
        else if (args.structure == "full")
            config.structure = evm::StructureMode::full;
        else if (args.structure != "test")
            throw evm::Error("unknown structure '" + args.structure + "'");
        auto result = evm::em_fit(data, config);
        write_file(args.model, result.model.to_text());
        if (!args.trace.empty()) write_file(args.trace, result.trace.to_text());

        std::cout << "task=density\ncomponents=" << args.k << "\nvars=" << data.n_vars
                  << "\nrows=" << data.num_rows() << "\nfree_params="
                  << result.model.free_param_count() << "\ntrain_avg_ll="
                  << fmt17(evm::avg_log_likelihood(result.model, data)) << "\nbest_restart="
                  << result.trace.best_restart;
        auto blocks = result.model.block_counts();
        std::cout << "\nblocks=";
        for (std::size_t y = 0; y < blocks.size(); ++y)
            std::cout << (y ? "," : "") << blocks[y];
        std::cout << "\nmodel_file=" << args.model << '\n';
    } else {
        throw evm::Error("unknown task '" + args.task + "'");
    }
    std::cerr << "train wall seconds: " << seconds_since(start) << '\n';
    return 0;
}

// -------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string task = "classify";
    std::string model;
    std::string data;
};

int run_eval(const EvalArgs& args) {
    auto start = Clock::now();
    auto model = evm::MevmModel::from_text(read_file(args.model));
    if (args.task == "classify") {
        auto data = evm::load_labeled_csv(args.data);
        if (data.data.n_vars != model.num_vars())
            throw evm::Error("model covers " + std::to_string(model.num_vars()) +
                             " variables but the data has " +
                             std::to_string(data.data.n_vars));
        int k = model.num_classes();
        std::vector<std::size_t> confusion(static_cast<std::size_t>(k) *
                                           static_cast<std::size_t>(k), 0);
        std::size_t correct = 0;
        evm::JointScratch scratch;
        for (std::size_t i = 0; i < data.data.num_rows(); ++i) {
            int got = model.classify_sparse(data.data.rows[i], scratch);
            int want = data.labels[i];
            if (want >= k) throw evm::Error("label outside the model's class range");
            ++confusion[static_cast<std::size_t>(want) * static_cast<std::size_t>(k) +
                        static_cast<std::size_t>(got)];
            if (got == want) ++correct;
        }
        double accuracy =
            static_cast<double>(correct) / static_cast<double>(data.data.num_rows());

        std::cout << "  metric       value\n";
        std::cout << "  --------     -----\n";
        std::cout << "  accuracy     " << fmt17(accuracy) << "\n";
        std::cout << "  examples     " << data.data.num_rows() << "\n\n";
        std::cout << "task=classify\naccuracy=" << fmt17(accuracy) << "\nexamples="
                  << data.data.num_rows() << "\nfree_params=" << model.free_param_count();
        auto blocks = model.block_counts();
        std::cout << "\nblocks=";
        for (std::size_t y = 0; y < blocks.size(); ++y)
            std::cout << (y ? "," : "") << blocks[y];
        std::cout << '\n';
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b)
                std::cout << "confusion_" << a << '_' << b << '='
                          << confusion[static_cast<std::size_t>(a) * static_cast<std::size_t>(k) +
                                       static_cast<std::size_t>(b)]
                          << '\n';
    } else if (args.task == "density") {
        auto data = evm::load_csv(args.data);
        if (data.n_vars != model.num_vars())
            throw evm::Error("model covers " + std::to_string(model.num_vars()) +
                             " variables but the data has " + std::to_string(data.n_vars));
        double avg = evm::avg_log_likelihood(model, data);
        std::cout << "  metric       value\n";
        std::cout << "  --------     -----\n";
        std::cout << "  avg_test_ll  " << fmt17(avg) << "\n";
        std::cout << "  examples     " << data.num_rows() << "\n\n";
        std::cout << "task=density\navg_test_ll=" << fmt17(avg) << "\nexamples="
                  << data.num_rows() << "\nfree_params=" << model.free_param_count();
        auto blocks = model.block_counts();
        std::cout << "\nblocks=";
        for (std::size_t y = 0; y < blocks.size(); ++y)
            std::cout << (y ? "," : "") << blocks[y];
        std::cout << '\n';
    } else {
        throw evm::Error("unknown task '" + args.task + "'");
    }
    std::cerr << "eval wall seconds: " << seconds_since(start) << '\n';
    return 0;
}

// -------------------------------------------------------------------------
// infer

struct InferArgs {
    std::string model;
    std::string evidence;
};

int run_infer(const InferArgs& args) {
    auto model = evm::MevmModel::from_text(read_file(args.model));
    auto e = parse_evidence(args.evidence);
    double log_p = model.log_marginal(e);
    std::cout << "log_p_evidence=" << fmt17(log_p) << '\n';
    std::cout << "p_evidence=" << fmt17(std::exp(log_p)) << '\n';
    for (int y = 0; y < model.num_classes(); ++y) {
        double post = log_p == evm::neg_inf ? 0.0
                                            : std::exp(model.log_joint_partial(y, e) - log_p);
        std::cout << "posterior_" << y << '=' << fmt17(post) << '\n';
    }
    auto map = model.map_completion(e);
    std::cout << "map_class=" << map.class_index << '\n';
    std::cout << "map_log_prob=" << fmt17(map.log_prob) << '\n';
    std::cout << "map_ones=";
    bool first = true;
    for (const auto& [idx, val] : map.assignment.entries())
        if (val) {
            std::cout << (first ? "" : ",") << idx;
            first = false;
        }
    std::cout << '\n';
    return 0;
}

// -------------------------------------------------------------------------
// oracle-check: enumeration cross-checks over every inference path

struct OracleArgs {
    int trials = 40;
    int max_n = 10;
    std::uint64_t seed = 1;
};

struct OracleContext {
    evm::Rng rng;
    bool ok = true;

    explicit OracleContext(std::uint64_t seed) : rng(seed) {}

    void report(const std::string& name, bool passed, const std::string& detail = "") {
        std::cout << (passed ? "ok   " : "FAIL ") << name;
        if (!detail.empty()) std::cout << ": " << detail;
        std::cout << '\n';
        if (!passed) ok = false;
    }
};

std::vector<std::uint8_t> bits_of(std::uint64_t code, int n) {
    std::vector<std::uint8_t> x(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = (code >> j) & 1u;
    return x;
}

double pascal_binom(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0.0;
    std::vector<double> row{1.0};
    for (int i = 1; i <= n; ++i) {
        std::vector<double> next(static_cast<std::size_t>(i) + 1, 1.0);
        for (int j = 1; j < i; ++j)
            next[static_cast<std::size_t>(j)] =
                row[static_cast<std::size_t>(j - 1)] + row[static_cast<std::size_t>(j)];
        row = std::move(next);
    }
    return row[static_cast<std::size_t>(k)];
}

std::vector<double> random_simplex(evm::Rng& rng, std::size_t count, double zero_prob) {
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

evm::PartialAssignment random_evidence(evm::Rng& rng, int n, double keep) {
    evm::PartialAssignment e;
    for (int i = 0; i < n; ++i)
        if (evm::next_unit(rng) < keep) e.set(i, evm::next_unit(rng) < 0.5);
    return e;
}

void check_block_inference(OracleContext& ctx, int trials, int max_n) {
    bool marginal_ok = true, map_ok = true;
    for (int trial = 0; trial < trials; ++trial) {
        int m = 1 + static_cast<int>(evm::next_below(ctx.rng, static_cast<std::uint64_t>(max_n)));
        auto w = random_simplex(ctx.rng, static_cast<std::size_t>(m) + 1, trial % 2 ? 0.3 : 0.0);
        std::vector<int> vars(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) vars[static_cast<std::size_t>(i)] = i;
        evm::ExchangeableBlock block(vars, w);
        auto e = random_evidence(ctx.rng, m, evm::next_unit(ctx.rng) * 0.8);

        double expected = 0.0, best = 0.0;
        for (std::uint64_t code = 0; code < (1ull << m); ++code) {
            auto x = bits_of(code, m);
            if (!e.compatible_dense(x)) continue;
            int t = 0;
            for (auto b : x) t += b;
            double p = w[static_cast<std::size_t>(t)] / pascal_binom(m, t);
            expected += p;
            best = std::max(best, p);
        }
        double got = std::exp(block.log_marginal(e));
        if (std::abs(got - expected) > 1e-9) marginal_ok = false;
        auto res = block.map_completion(e);
        double got_map = res.log_prob == evm::neg_inf ? 0.0 : std::exp(res.log_prob);
        if (std::abs(got_map - best) > 1e-9) map_ok = false;
    }
    ctx.report("block marginal vs enumeration", marginal_ok);
    ctx.report("block MAP vs enumeration", map_ok);
}

template <typename S>
bool check_statistic_counts(OracleContext& ctx, const S& stat, int trials) {
    int n = stat.num_vars();
    auto vals = stat.values();
    for (int trial = 0; trial < trials; ++trial) {
        auto e = random_evidence(ctx.rng, n, evm::next_unit(ctx.rng) * 0.8);
        std::uint64_t sum = 0;
        for (const auto& t : vals) {
            std::uint64_t expected = 0;
            for (std::uint64_t code = 0; code < (1ull << n); ++code) {
                auto x = bits_of(code, n);
                if (e.compatible_dense(x) && stat.value(x) == t) ++expected;
            }
            if (stat.count_completions(t, e) != expected) return false;
            auto witness = stat.complete(t, e);
            if (witness.has_value() != (expected > 0)) return false;
            if (witness && (stat.value(*witness) != t || !e.compatible_dense(*witness)))
                return false;
            sum += expected;
        }
        if (sum != (1ull << (n - static_cast<int>(e.size())))) return false;
    }
    return true;
}

void check_statistics(OracleContext& ctx, int trials) {
    ctx.report("cardinality counts vs enumeration",
               check_statistic_counts(ctx, evm::CardinalityStatistic(9), trials));
    ctx.report("transition counts vs enumeration",
               check_statistic_counts(ctx, evm::TransitionStatistic(10), trials));
    ctx.report("block-statistic counts vs enumeration",
               check_statistic_counts(ctx, evm::BlockCountStatistic({{{0, 2, 4}, {1, 3}}}, 64),
                                      trials));
    ctx.report("nested-pooling counts vs enumeration",
               check_statistic_counts(ctx, evm::NestedPoolingStatistic(4, 2, 1), trials / 4 + 1));
}

void check_mevm(OracleContext& ctx, int trials, int max_n) {
    bool mass_ok = true, partial_ok = true, estep_ok = true, fit_ok = true;
    for (int trial = 0; trial < trials; ++trial) {
        int n = 2 + static_cast<int>(evm::next_below(ctx.rng, static_cast<std::uint64_t>(
                                                                  std::min(max_n, 9))));
        int k = 1 + static_cast<int>(evm::next_below(ctx.rng, 3));
        // random model with random per-class partitions
        std::vector<evm::Partition> partitions;
        std::vector<std::vector<std::vector<double>>> weights;
        for (int y = 0; y < k; ++y) {
            evm::Partition p;
            std::vector<int> order(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
            evm::shuffle_inplace(order, ctx.rng);
            int n_blocks = 1 + static_cast<int>(evm::next_below(ctx.rng,
                                                                static_cast<std::uint64_t>(n)));
            p.blocks.resize(static_cast<std::size_t>(n_blocks));
            for (int i = 0; i < n; ++i) {
                std::size_t b = i < n_blocks
                                    ? static_cast<std::size_t>(i)
                                    : static_cast<std::size_t>(evm::next_below(
                                          ctx.rng, static_cast<std::uint64_t>(n_blocks)));
                p.blocks[b].push_back(order[static_cast<std::size_t>(i)]);
            }
            for (auto& blk : p.blocks) std::sort(blk.begin(), blk.end());
            std::vector<std::vector<double>> cw;
            for (const auto& blk : p.blocks)
                cw.push_back(random_simplex(ctx.rng, blk.size() + 1, trial % 2 ? 0.2 : 0.0));
            partitions.push_back(std::move(p));
            weights.push_back(std::move(cw));
        }
        evm::MevmModel model(random_simplex(ctx.rng, static_cast<std::size_t>(k), 0.0),
                             std::move(partitions), std::move(weights));

        double total = 0.0;
        for (int y = 0; y < k; ++y)
            for (std::uint64_t code = 0; code < (1ull << n); ++code) {
                double lp = model.log_joint(y, bits_of(code, n));
                if (lp != evm::neg_inf) total += std::exp(lp);
            }
        if (std::abs(total - 1.0) > 1e-9) mass_ok = false;

        auto e = random_evidence(ctx.rng, n, 0.5);
        for (int y = 0; y < k; ++y) {
            double expected = 0.0;
            for (std::uint64_t code = 0; code < (1ull << n); ++code) {
                auto x = bits_of(code, n);
                if (!e.compatible_dense(x)) continue;
                double lp = model.log_joint(y, x);
                if (lp != evm::neg_inf) expected += std::exp(lp);
            }
            if (std::abs(std::exp(model.log_joint_partial(y, e)) - expected) > 1e-9)
                partial_ok = false;
        }

        // random data: e-step rows normalize, supervised ratios exact
        evm::BinaryDataset data;
        data.n_vars = n;
        for (int i = 0; i < 40; ++i) {
            std::vector<int> row;
            for (int j = 0; j < n; ++j)
                if (evm::next_unit(ctx.rng) < 0.5) row.push_back(j);
            data.rows.push_back(row);
        }
        auto resp = evm::e_step(model, data);
        for (const auto& row : resp) {
            double s = 0.0;
            for (double r : row) s += r;
            if (std::abs(s - 1.0) > 1e-9) estep_ok = false;
        }

        evm::LabeledDataset labeled;
        labeled.data = data;
        labeled.n_classes = k;
        for (std::size_t i = 0; i < data.num_rows(); ++i)
            labeled.labels.push_back(static_cast<int>(
                evm::next_below(ctx.rng, static_cast<std::uint64_t>(k))));
        auto fitted = evm::fit_supervised(labeled, model.partitions(), 0.0);
        std::vector<std::size_t> class_count(static_cast<std::size_t>(k), 0);
        for (int y : labeled.labels) ++class_count[static_cast<std::size_t>(y)];
        for (int y = 0; y < k; ++y) {
            double want = static_cast<double>(class_count[static_cast<std::size_t>(y)]) /
                          static_cast<double>(data.num_rows());
            if (fitted.prior()[static_cast<std::size_t>(y)] != want) fit_ok = false;
        }
        if (fitted.free_param_count() != k + static_cast<std::int64_t>(k) * n - 1)
            fit_ok = false;
    }
    ctx.report("joint mass sums to one", mass_ok);
    ctx.report("partial joints vs enumeration", partial_ok);
    ctx.report("e-step rows normalized", estep_ok);
    ctx.report("supervised fit ratios and parameter count", fit_ok);
}

void check_welch(OracleContext& ctx, int trials) {
    bool ok = true;
    for (int trial = 0; trial < trials; ++trial) {
        double m1 = evm::next_unit(ctx.rng), m2 = evm::next_unit(ctx.rng);
        double n1 = 2 + evm::next_unit(ctx.rng) * 400, n2 = 2 + evm::next_unit(ctx.rng) * 400;
        double p = evm::welch_p_value(m1, m1 * (1 - m1), n1, m2, m2 * (1 - m2), n2);
        if (!(p >= 0.0 && p <= 1.0)) ok = false;
        if (p != evm::welch_p_value(m2, m2 * (1 - m2), n2, m1, m1 * (1 - m1), n1)) ok = false;
        // the two halves of the regularized incomplete beta must sum to one
        double a = 0.5 + evm::next_unit(ctx.rng) * 40;
        double b = 0.5 + evm::next_unit(ctx.rng) * 40;
        double x = evm::next_unit(ctx.rng);
        if (std::abs(evm::incomplete_beta(a, b, x) + evm::incomplete_beta(b, a, 1.0 - x) -
                     1.0) > 1e-11)
            ok = false;
    }
    ctx.report("welch test symmetry and beta identity", ok);
}

int run_oracle_check(const OracleArgs& args) {
    OracleContext ctx(args.seed);
    check_block_inference(ctx, args.trials, args.max_n);
    check_statistics(ctx, std::max(2, args.trials / 8));
    check_mevm(ctx, std::max(2, args.trials / 4), args.max_n);
    check_welch(ctx, args.trials * 4);
    std::cout << (ctx.ok ? "all checks passed\n" : "oracle checks FAILED\n");
    return ctx.ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exchangeable variable models: inference, learning, evaluation"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* cmd_gen = app.add_subcommand("generate", "write synthetic symmetric-function datasets");
    cmd_gen->add_option("--kind", gen.kind, "parity|counting|threshold|exact")
        ->check(CLI::IsMember({"parity", "counting", "threshold", "exact"}));
    cmd_gen->add_option("--n", gen.n, "number of attributes");
    cmd_gen->add_option("--train", gen.train, "training rows");
    cmd_gen->add_option("--test", gen.test, "test rows");
    cmd_gen->add_option("--residue", gen.residue, "counting: residue");
    cmd_gen->add_option("--modulus", gen.modulus, "counting: modulus");
    cmd_gen->add_option("--threshold", gen.threshold, "threshold: minimum count of ones");
    cmd_gen->add_option("--exact-set", gen.exact_set, "exact: comma-separated counts");
    cmd_gen->add_option("--seed", gen.seed, "generator seed");
    cmd_gen->add_option("--out", gen.out, "output prefix");

    TrainArgs train;
    auto* cmd_train = app.add_subcommand("train", "fit a classifier or density model");
    cmd_train->add_option("--task", train.task, "classify|density")
        ->check(CLI::IsMember({"classify", "density"}));
    cmd_train->add_option("--data", train.data, "input CSV")->required();
    cmd_train->add_option("--structure", train.structure, "test|nb|full")
        ->check(CLI::IsMember({"test", "nb", "full"}));
    cmd_train->add_option("--alpha", train.alpha, "additive smoothing");
    cmd_train->add_option("--significance", train.significance, "structure-test level");
    cmd_train->add_option("--k", train.k, "density: mixture components");
    cmd_train->add_option("--stop-delta", train.stop_delta, "density: EM stopping threshold");
    cmd_train->add_option("--max-iters", train.max_iters, "density: EM iteration cap");
    cmd_train->add_option("--restarts", train.restarts, "density: EM restarts");
    cmd_train->add_option("--seed", train.seed, "density: EM seed");
    cmd_train->add_option("--model", train.model, "model output path");
    cmd_train->add_option("--trace", train.trace, "density: fit-trace output path");

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "evaluate a model on a dataset");
    cmd_eval->add_option("--task", eval.task, "classify|density")
        ->check(CLI::IsMember({"classify", "density"}));
    cmd_eval->add_option("--model", eval.model, "model file")->required();
    cmd_eval->add_option("--data", eval.data, "input CSV")->required();

    InferArgs infer;
    auto* cmd_infer = app.add_subcommand("infer", "evidence queries against a model");
    cmd_infer->add_option("--model", infer.model, "model file")->required();
    cmd_infer->add_option("--evidence", infer.evidence, "e.g. \"3=1,17=0\"");

    OracleArgs oracle;
    auto* cmd_oracle = app.add_subcommand("oracle-check", "enumeration cross-checks");
    cmd_oracle->add_option("--trials", oracle.trials, "random instances per check");
    cmd_oracle->add_option("--max-n", oracle.max_n, "largest variable count");
    cmd_oracle->add_option("--seed", oracle.seed, "seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(cmd_gen)) return run_generate(gen);
        if (app.got_subcommand(cmd_train)) return run_train(train);
        if (app.got_subcommand(cmd_eval)) return run_eval(eval);
        if (app.got_subcommand(cmd_infer)) return run_infer(infer);
        if (app.got_subcommand(cmd_oracle)) return run_oracle_check(oracle);
    } catch (const evm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
