#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mggp/config.hpp"
#include "mggp/dataio.hpp"
#include "mggp/exprtree.hpp"
#include "mggp/fitting.hpp"
#include "mggp/rng.hpp"

namespace mggp {

/// Fitness assigned when evaluation fails; compares above every finite value.
inline constexpr double kWorstFitness = std::numeric_limits<double>::infinity();

/// A multi-gene model: y = w0 + sum_i w_i * gene_i(x), on scaled coordinates.
struct Individual {
    std::vector<ExprTree> genes;
    std::optional<WeightVector> weights;
    double fitness = kWorstFitness;
    int complexity = 0;
    bool evaluated = false;

    void invalidate() {
        weights.reset();
        fitness = kWorstFitness;
        evaluated = false;
        complexity = total_nodes();
    }

    int total_nodes() const {
        int n = 0;
        for (const auto& g : genes) n += static_cast<int>(g.size());
        return n;
    }
};

inline Individual make_individual(std::vector<ExprTree> genes) {
    Individual ind;
    ind.genes = std::move(genes);
    ind.complexity = ind.total_nodes();
    return ind;
}

/// Lexicographic order: fitness first, node count second.
inline bool lexicographically_better(const Individual& a, const Individual& b) noexcept {
    if (a.fitness != b.fitness) return a.fitness < b.fitness;
    return a.complexity < b.complexity;
}

/// Scaled training data shared by every evaluation in a run.
struct TrainingData {
    Eigen::MatrixXd x_scaled;
    Eigen::VectorXd y_scaled;
    Eigen::VectorXd y;
    ScalingParams scaling;

    static TrainingData from(const Dataset& train, const ScalingParams& p) {
        return {scale_inputs(train.inputs, p), scale_target(train.y(), p), train.y(), p};
    }
};

/// [1, gene_1(x), ..., gene_T(x)]; nullopt if any gene output is non-finite.
inline std::optional<Eigen::MatrixXd> gene_design(std::span<const ExprTree> genes, const Eigen::MatrixXd& x_scaled) {
    Eigen::MatrixXd d(x_scaled.rows(), static_cast<Eigen::Index>(genes.size()) + 1);
    d.col(0).setOnes();
    for (std::size_t g = 0; g < genes.size(); ++g) {
        auto out = eval_tree(genes[g], x_scaled);
        if (!out.finite) return std::nullopt;
        d.col(static_cast<Eigen::Index>(g) + 1) = out.values;
    }
    return d;
}

/// Predictions in original target units for raw (unscaled) inputs.
/// Rows where a gene is non-finite yield non-finite predictions.
inline Eigen::VectorXd predict(std::span<const ExprTree> genes, const WeightVector& w, const Eigen::MatrixXd& raw_inputs,
                               const ScalingParams& p) {
    const Eigen::MatrixXd xs = scale_inputs(raw_inputs, p);
    Eigen::MatrixXd d(xs.rows(), static_cast<Eigen::Index>(genes.size()) + 1);
    d.col(0).setOnes();
    for (std::size_t g = 0; g < genes.size(); ++g) d.col(static_cast<Eigen::Index>(g) + 1) = eval_tree(genes[g], xs).values;
    return unscale_target(d * w.stacked(), p);
}

inline Eigen::VectorXd predict(const Individual& ind, const Eigen::MatrixXd& raw_inputs, const ScalingParams& p) {
    if (!ind.weights) throw Error("predict: individual has not been evaluated");
    return predict(ind.genes, *ind.weights, raw_inputs, p);
}

/// Refits weights and computes fitness (RMSE in original target units).
inline void evaluate(Individual& ind, const TrainingData& data) {
    ind.complexity = ind.total_nodes();
    ind.evaluated = true;
    ind.weights.reset();
    ind.fitness = kWorstFitness;

    const auto design = gene_design(ind.genes, data.x_scaled);
    if (!design) return;
    try {
        WeightVector w = least_squares(*design, data.y_scaled);
        const Eigen::VectorXd yhat = unscale_target(*design * w.stacked(), data.scaling);
        if (!yhat.allFinite()) return;
        const double f = rmse(data.y, yhat);
        if (!std::isfinite(f)) return;
        ind.weights = std::move(w);
        ind.fitness = f;
    } catch (const IllConditioned&) {
    }
}

/// Evaluates every not-yet-evaluated individual. Each slot is written only by
/// the worker that owns it, so the result does not depend on `threads`.
inline void evaluate_pending(std::span<Individual> pop, const TrainingData& data, int threads = 1) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (!pop[i].evaluated) pending.push_back(i);
    }
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || pending.size() < 2) {
        for (auto i : pending) evaluate(pop[i], data);
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t k = t; k < pending.size(); k += workers) evaluate(pop[pending[k]], data);
        });
    }
}

// ---------------------------------------------------------------------------
// Initialization and selection

inline std::vector<Individual> initialize_population(Rng& rng, const GpConfig& cfg) {
    const auto lim = cfg.tree_limits();
    std::vector<Individual> pop;
    pop.reserve(static_cast<std::size_t>(cfg.population_size));
    for (int i = 0; i < cfg.population_size; ++i) {
        const auto count = 1 + uniform_index(rng, static_cast<std::size_t>(cfg.max_trees));
        std::vector<ExprTree> genes;
        genes.reserve(count);
        for (std::size_t g = 0; g < count; ++g) genes.push_back(ramped_tree(rng, lim));
        pop.push_back(make_individual(std::move(genes)));
    }
    return pop;
}

/// Plain lexicographic tournament: `size` distinct candidates; lowest fitness
/// wins, ties go to fewer nodes, remaining ties are broken uniformly.
inline std::size_t tournament_select(Rng& rng, std::span<const Individual> pop, int size) {
    const std::size_t k = std::min(pop.size(), static_cast<std::size_t>(std::max(1, size)));
    std::vector<std::size_t> drawn;
    drawn.reserve(k);
    while (drawn.size() < k) {
        const auto c = uniform_index(rng, pop.size());
        if (std::find(drawn.begin(), drawn.end(), c) == drawn.end()) drawn.push_back(c);
    }

    std::size_t winner = drawn[0];
    std::size_t ties = 1;
    for (std::size_t i = 1; i < drawn.size(); ++i) {
        const auto& cand = pop[drawn[i]];
        const auto& best = pop[winner];
        if (lexicographically_better(cand, best)) {
            winner = drawn[i];
            ties = 1;
        } else if (!lexicographically_better(best, cand)) {
            // Reservoir pick keeps the choice uniform among equals.
            ++ties;
            if (uniform_index(rng, ties) == 0) winner = drawn[i];
        }
    }
    return winner;
}

// ---------------------------------------------------------------------------
// Variation

/// Inclusive gene range [first, last].
struct GeneSegment {
    std::size_t first = 0;
    std::size_t last = 0;
};

/// Exchanges whole-gene segments between two gene lists.
inline std::pair<std::vector<ExprTree>, std::vector<ExprTree>> exchange_gene_segments(
    const std::vector<ExprTree>& a, GeneSegment sa, const std::vector<ExprTree>& b, GeneSegment sb) {
    auto splice = [](const std::vector<ExprTree>& host, GeneSegment hs, const std::vector<ExprTree>& donor, GeneSegment ds) {
        std::vector<ExprTree> out;
        out.insert(out.end(), host.begin(), host.begin() + static_cast<std::ptrdiff_t>(hs.first));
        out.insert(out.end(), donor.begin() + static_cast<std::ptrdiff_t>(ds.first),
                   donor.begin() + static_cast<std::ptrdiff_t>(ds.last + 1));
        out.insert(out.end(), host.begin() + static_cast<std::ptrdiff_t>(hs.last + 1), host.end());
        return out;
    };
    return {splice(a, sa, b, sb), splice(b, sb, a, sa)};
}

/// Deletes uniformly chosen genes until at most `max_trees` remain; an empty
/// list receives one fresh gene.
inline void conform_gene_count(Rng& rng, std::vector<ExprTree>& genes, int max_trees, const TreeLimits& lim) {
    while (genes.size() > static_cast<std::size_t>(max_trees)) {
        genes.erase(genes.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, genes.size())));
    }
    if (genes.empty()) genes.push_back(ramped_tree(rng, lim));
}

inline GeneSegment random_segment(Rng& rng, std::size_t gene_count) {
    auto i = uniform_index(rng, gene_count);
    auto j = uniform_index(rng, gene_count);
    if (i > j) std::swap(i, j);
    return {i, j};
}

/// Two-point gene-level crossover with independent segment endpoints per parent.
inline std::pair<Individual, Individual> high_level_crossover(Rng& rng, const Individual& a, const Individual& b, int max_trees,
                                                              const TreeLimits& lim) {
    const auto sa = random_segment(rng, a.genes.size());
    const auto sb = random_segment(rng, b.genes.size());
    auto [ga, gb] = exchange_gene_segments(a.genes, sa, b.genes, sb);
    conform_gene_count(rng, ga, max_trees, lim);
    conform_gene_count(rng, gb, max_trees, lim);
    return {make_individual(std::move(ga)), make_individual(std::move(gb))};
}

/// Subtree crossover between one uniformly chosen gene of each parent.
inline std::pair<Individual, Individual> low_level_crossover(Rng& rng, const Individual& a, const Individual& b, int max_depth) {
    const auto ia = uniform_index(rng, a.genes.size());
    const auto ib = uniform_index(rng, b.genes.size());
    auto [ta, tb] = subtree_crossover(rng, a.genes[ia], b.genes[ib], max_depth);
    auto ga = a.genes;
    auto gb = b.genes;
    ga[ia] = std::move(ta);
    gb[ib] = std::move(tb);
    return {make_individual(std::move(ga)), make_individual(std::move(gb))};
}

inline Individual mutate(Rng& rng, const Individual& a, const TreeLimits& lim) {
    const auto i = uniform_index(rng, a.genes.size());
    auto genes = a.genes;
    genes[i] = subtree_mutation(rng, genes[i], lim);
    return make_individual(std::move(genes));
}

enum class Variation { Crossover, Mutation, Reproduction };

inline Variation pick_variation(Rng& rng, const GpConfig& cfg) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u < cfg.p_crossover) return Variation::Crossover;
    if (u < cfg.p_crossover + cfg.p_mutation) return Variation::Mutation;
    return Variation::Reproduction;
}

/// Population indices from best to worst (fitness, then complexity, then index).
inline std::vector<std::size_t> rank_order(std::span<const Individual> pop) {
    std::vector<std::size_t> idx(pop.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return lexicographically_better(pop[a], pop[b]); });
    return idx;
}

/// One generation: elites copied, the rest bred by tournament selection and
/// variation, offspring evaluated before returning.
inline std::vector<Individual> step_generation(Rng& rng, std::span<const Individual> pop, const TrainingData& data,
                                               const GpConfig& cfg, int threads = 1) {
    const auto lim = cfg.tree_limits();
    const std::size_t n = pop.size();
    std::vector<Individual> next;
    next.reserve(n);

    const auto order = rank_order(pop);
    for (std::size_t e = 0; e < static_cast<std::size_t>(cfg.elitism_count) && e < n; ++e) next.push_back(pop[order[e]]);

    while (next.size() < n) {
        switch (pick_variation(rng, cfg)) {
        case Variation::Crossover: {
            const auto& pa = pop[tournament_select(rng, pop, cfg.tournament_size)];
            const auto& pb = pop[tournament_select(rng, pop, cfg.tournament_size)];
            // Gene exchange is meaningless with single-gene individuals.
            const bool high = cfg.max_trees > 1 && coin(rng, cfg.p_high_level_crossover);
            auto [ca, cb] = high ? high_level_crossover(rng, pa, pb, cfg.max_trees, lim) : low_level_crossover(rng, pa, pb, cfg.max_depth);
            next.push_back(std::move(ca));
            if (next.size() < n) next.push_back(std::move(cb));
            break;
        }
        case Variation::Mutation:
            next.push_back(mutate(rng, pop[tournament_select(rng, pop, cfg.tournament_size)], lim));
            break;
        case Variation::Reproduction:
            next.push_back(pop[tournament_select(rng, pop, cfg.tournament_size)]);
            break;
        }
    }

    evaluate_pending(next, data, threads);
    return next;
}

// ---------------------------------------------------------------------------
// Runs

struct GenerationRecord {
    int generation = 0;
    double best_fitness = kWorstFitness;
    double mean_fitness = kWorstFitness; // over individuals with finite fitness
    int best_complexity = 0;
};

struct RunTrace {
    std::vector<GenerationRecord> records;
    std::vector<Individual> population;
    Individual best;
    ScalingParams scaling;
    FitMetrics train;
    std::optional<FitMetrics> test;

    bool best_fitness_non_increasing() const {
        for (std::size_t i = 1; i < records.size(); ++i) {
            if (records[i].best_fitness > records[i - 1].best_fitness) return false;
        }
        return true;
    }
};

inline GenerationRecord summarize(int generation, std::span<const Individual> pop) {
    GenerationRecord r;
    r.generation = generation;
    const auto& best = pop[rank_order(pop).front()];
    r.best_fitness = best.fitness;
    r.best_complexity = best.complexity;
    double sum = 0.0;
    std::size_t finite = 0;
    for (const auto& ind : pop) {
        if (std::isfinite(ind.fitness)) {
            sum += ind.fitness;
            ++finite;
        }
    }
    r.mean_fitness = finite ? sum / static_cast<double>(finite) : kWorstFitness;
    return r;
}

/// Metrics in original units; R^2 is NaN when the target has no variance.
inline FitMetrics score(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
    FitMetrics m;
    m.rmse = rmse(y, yhat);
    try {
        m.r2 = y.size() >= 2 ? r_squared(y, yhat) : std::numeric_limits<double>::quiet_NaN();
    } catch (const DegenerateTarget&) {
        m.r2 = std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

/// Evolves on `train` (scaling fitted on it) until `cfg.generations` steps or
/// the best fitness drops below `cfg.fitness_target`. Generation 0 is the
/// initial population.
inline RunTrace run(const GpConfig& cfg, const Dataset& train, const Dataset* test = nullptr, int threads = 1) {
    cfg.validate();
    RunTrace trace;
    trace.scaling = fit_scaling(train);
    const auto data = TrainingData::from(train, trace.scaling);

    Rng rng(cfg.rng_seed);
    auto pop = initialize_population(rng, cfg);
    evaluate_pending(pop, data, threads);
    trace.records.push_back(summarize(0, pop));

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        if (trace.records.back().best_fitness < cfg.fitness_target) break;
        pop = step_generation(rng, pop, data, cfg, threads);
        trace.records.push_back(summarize(gen, pop));
    }

    trace.best = pop[rank_order(pop).front()];
    trace.population = std::move(pop);
    if (trace.best.weights) {
        trace.train = score(train.y(), predict(trace.best, train.inputs, trace.scaling));
        trace.train.rmse = trace.best.fitness;
        if (test && test->has_target() && test->rows() >= 1) {
            trace.test = score(test->y(), predict(trace.best, test->inputs, trace.scaling));
        }
    } else {
        trace.train = {kWorstFitness, std::numeric_limits<double>::quiet_NaN()};
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Repeated runs

inline std::vector<std::uint64_t> derive_seeds(std::uint64_t master, int n) {
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < n; ++k) seeds.push_back(mix_seed(master + static_cast<std::uint64_t>(k)));
    return seeds;
}

struct RunSummary {
    std::uint64_t seed = 0;
    double best_fitness = kWorstFitness;
    int best_complexity = 0;
    std::optional<FitMetrics> test;
    bool monotone = true;
};

struct MultiRunStats {
    double mean = 0.0;
    double std = 0.0; // sample (n - 1)
    double max = 0.0;
    double min = 0.0;
    std::vector<RunSummary> runs;
};

inline MultiRunStats summarize_runs(std::vector<RunSummary> runs) {
    MultiRunStats s;
    s.runs = std::move(runs);
    const auto n = static_cast<double>(s.runs.size());
    s.min = kWorstFitness;
    s.max = -kWorstFitness;
    for (const auto& r : s.runs) {
        s.mean += r.best_fitness;
        s.min = std::min(s.min, r.best_fitness);
        s.max = std::max(s.max, r.best_fitness);
    }
    s.mean /= n;
    double ss = 0.0;
    for (const auto& r : s.runs) ss += (r.best_fitness - s.mean) * (r.best_fitness - s.mean);
    s.std = s.runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return s;
}

/// One run per seed (each seed replaces cfg.rng_seed).
inline MultiRunStats multi_run_stats(const GpConfig& cfg, const Dataset& train, const Dataset* test,
                                     std::span<const std::uint64_t> seeds, int threads = 1) {
    if (seeds.size() < 2) throw Error("multi_run_stats needs at least 2 runs");
    std::vector<RunSummary> runs;
    for (auto seed : seeds) {
        GpConfig c = cfg;
        c.rng_seed = seed;
        const auto trace = run(c, train, test, threads);
        runs.push_back({seed, trace.best.fitness, trace.best.complexity, trace.test, trace.best_fitness_non_increasing()});
    }
    return summarize_runs(std::move(runs));
}

inline MultiRunStats multi_run_stats(const GpConfig& cfg, const Dataset& train, const Dataset* test, int n_runs, int threads = 1) {
    const auto seeds = derive_seeds(cfg.rng_seed, n_runs);
    return multi_run_stats(cfg, train, test, seeds, threads);
}

} // namespace mggp
