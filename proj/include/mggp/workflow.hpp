#pragma once

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "mggp/baselines.hpp"
#include "mggp/config.hpp"
#include "mggp/dataio.hpp"
#include "mggp/engine.hpp"
#include "mggp/pareto.hpp"

// End-to-end workflows behind the command-line tool, and the artifact
// formats they write. Everything here is deterministic given the inputs.

namespace mggp {

inline constexpr const char* kToolName = "mggp";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kModelFormatVersion = 1;

using ojson = nlohmann::ordered_json;

enum class Mode { Mggp, Sggp };

inline const char* mode_name(Mode m) { return m == Mode::Mggp ? "mggp" : "sggp"; }

inline GpConfig apply_mode(GpConfig cfg, Mode m) { return m == Mode::Sggp ? cfg.single_gene() : cfg; }

/// Finite numbers as JSON numbers, everything else as "inf", "-inf" or "nan".
inline ojson json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline double number_from_json(const ojson& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
}

inline std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_number(v);
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

inline ojson config_json(const GpConfig& c) {
    return {
        {"population_size", c.population_size},
        {"generations", c.generations},
        {"tournament_size", c.tournament_size},
        {"max_depth", c.max_depth},
        {"max_trees", c.max_trees},
        {"p_crossover", c.p_crossover},
        {"p_mutation", c.p_mutation},
        {"p_reproduction", c.p_reproduction},
        {"fitness_target", json_number(c.fitness_target)},
        {"elitism_count", c.elitism_count},
        {"rng_seed", c.rng_seed},
        {"const_range", {c.const_lo, c.const_hi}},
        {"p_var", c.p_var},
        {"p_high_level_crossover", c.p_high_level_crossover},
    };
}

/// Row count plus a checksum per column.
inline ojson dataset_fingerprint(const Dataset& d) {
    ojson sums = ojson::object();
    for (int c = 0; c < kInputCount; ++c) {
        sums[std::string(kInputColumns[static_cast<std::size_t>(c)])] = hex64(column_checksum(d.inputs.col(c)));
    }
    if (d.target) sums[std::string(kTargetColumn)] = hex64(column_checksum(*d.target));
    return {{"rows", d.rows()}, {"column_checksums", sums}};
}

/// Provenance embedded in every artifact: enough to regenerate it.
inline ojson manifest_json(const GpConfig& cfg, Mode mode, const Dataset& data, double train_fraction) {
    return {
        {"tool", kToolName},
        {"version", kToolVersion},
        {"format_version", kModelFormatVersion},
        {"mode", mode_name(mode)},
        {"seed", cfg.rng_seed},
        {"train_fraction", train_fraction},
        {"config", config_json(cfg)},
        {"dataset", dataset_fingerprint(data)},
    };
}

inline ojson metrics_json(const FitMetrics& m, Eigen::Index rows) {
    return {{"rows", rows}, {"rmse", json_number(m.rmse)}, {"r2", json_number(m.r2)}, {"percent_fit", json_number(100.0 * m.r2)}};
}

// ---------------------------------------------------------------------------
// fit

struct FitOutcome {
    GpConfig config;
    Dataset train;
    Dataset test;
    RunTrace trace;
    ojson manifest;
};

inline constexpr std::uint64_t kSplitSalt = 0x73706c6974ULL;

/// Split (seeded from cfg.rng_seed), scale, evolve.
inline FitOutcome fit_workflow(const Dataset& data, GpConfig cfg, Mode mode, int threads = 1, SplitSpec spec = {}) {
    cfg = apply_mode(cfg, mode);
    cfg.validate();
    FitOutcome out;
    out.config = cfg;
    Rng split_rng(mix_seed(cfg.rng_seed ^ kSplitSalt));
    std::tie(out.train, out.test) = split(split_rng, data, spec);
    out.trace = run(cfg, out.train, &out.test, threads);
    out.manifest = manifest_json(cfg, mode, data, spec.train_fraction);
    return out;
}

inline std::string model_json(const FitOutcome& fit) {
    const auto& best = fit.trace.best;
    const auto& sc = fit.trace.scaling;
    std::vector<std::string> names(kInputColumns.begin(), kInputColumns.end());

    ojson genes = ojson::array(), infix = ojson::array(), weights = ojson::array();
    for (const auto& g : best.genes) {
        genes.push_back(serialize(g));
        infix.push_back(to_infix(g, names));
    }
    double bias = 0.0;
    if (best.weights) {
        bias = best.weights->w0;
        for (Eigen::Index i = 0; i < best.weights->w.size(); ++i) weights.push_back(best.weights->w(i));
    }

    ojson metrics = {{"train", metrics_json(fit.trace.train, fit.train.rows())}};
    if (fit.trace.test) metrics["test"] = metrics_json(*fit.trace.test, fit.test.rows());

    ojson j = {
        {"manifest", fit.manifest},
        {"model",
         {{"genes", genes},
          {"infix", infix},
          {"weights", {{"bias", bias}, {"genes", weights}}},
          {"fitness", json_number(best.fitness)},
          {"complexity", best.complexity}}},
        {"scaling",
         {{"mu_x", std::vector<double>(sc.mu_x.data(), sc.mu_x.data() + sc.mu_x.size())},
          {"sigma_x", std::vector<double>(sc.sigma_x.data(), sc.sigma_x.data() + sc.sigma_x.size())},
          {"mu_y", sc.mu_y},
          {"sigma_y", sc.sigma_y}}},
        {"metrics", metrics},
        {"generations_run", fit.trace.records.empty() ? 0 : fit.trace.records.back().generation},
    };
    return j.dump(2) + "\n";
}

inline std::string manifest_comment(const ojson& manifest) { return "# manifest: " + manifest.dump() + "\n"; }

/// generation,best_fitness,mean_fitness,best_complexity
inline std::string trace_csv(const RunTrace& trace, const ojson& manifest) {
    std::string s = manifest_comment(manifest);
    s += "generation,best_fitness,mean_fitness,best_complexity\n";
    for (const auto& r : trace.records) {
        s += std::to_string(r.generation) + "," + csv_number(r.best_fitness) + "," + csv_number(r.mean_fitness) + "," +
             std::to_string(r.best_complexity) + "\n";
    }
    return s;
}

struct ParetoRow {
    std::size_t id;
    double fitness;
    int complexity;
    bool on_front;
    char tag; // 'A', 'B', 'C' or 0
};

/// Front membership and A/B/C tags for every individual of a population.
inline std::vector<ParetoRow> pareto_rows(std::span<const Individual> pop) {
    std::vector<ParetoPoint> pts;
    for (std::size_t i = 0; i < pop.size(); ++i) pts.push_back({i, pop[i].fitness, pop[i].complexity});
    const auto front = pareto_front(pts);
    std::vector<ParetoRow> rows;
    for (std::size_t i = 0; i < pop.size(); ++i) rows.push_back({i, pop[i].fitness, pop[i].complexity, false, 0});
    for (const auto& p : front) rows[p.id].on_front = true;
    if (const auto tags = tag_front(front)) {
        if (tags->b) rows[front[*tags->b].id].tag = 'B';
        rows[front[tags->c].id].tag = 'C';
        rows[front[tags->a].id].tag = 'A';
    }
    return rows;
}

/// id,fitness,complexity,on_front,tag
inline std::string pareto_csv(std::span<const Individual> pop, const ojson& manifest) {
    std::string s = manifest_comment(manifest);
    s += "id,fitness,complexity,on_front,tag\n";
    for (const auto& r : pareto_rows(pop)) {
        s += std::to_string(r.id) + "," + csv_number(r.fitness) + "," + std::to_string(r.complexity) + "," +
             (r.on_front ? "1" : "0") + "," + (r.tag ? std::string(1, r.tag) : std::string()) + "\n";
    }
    return s;
}

// ---------------------------------------------------------------------------
// predict

struct LoadedModel {
    std::vector<ExprTree> genes;
    WeightVector weights;
    ScalingParams scaling;
    std::optional<double> train_rmse;
};

inline LoadedModel parse_model_json(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        LoadedModel m;
        const auto& model = j.at("model");
        const auto& genes = model.at("genes");
        for (std::size_t g = 0; g < genes.size(); ++g) {
            try {
                m.genes.push_back(deserialize(genes[g].get<std::string>()));
            } catch (const ParseError& e) {
                throw Error("gene " + std::to_string(g + 1) + ": " + e.what());
            }
            if (m.genes.back().max_variable() >= kInputCount) {
                throw Error("gene " + std::to_string(g + 1) + ": variable index out of range");
            }
        }
        m.weights.w0 = model.at("weights").at("bias").get<double>();
        const auto w = model.at("weights").at("genes").get<std::vector<double>>();
        if (w.size() != m.genes.size()) throw Error("weight count does not match gene count");
        m.weights.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));

        const auto& sc = j.at("scaling");
        const auto mu = sc.at("mu_x").get<std::vector<double>>();
        const auto sigma = sc.at("sigma_x").get<std::vector<double>>();
        if (mu.size() != kInputCount || sigma.size() != kInputCount) throw Error("scaling must have 6 input entries");
        m.scaling.mu_x = Eigen::Map<const Eigen::VectorXd>(mu.data(), kInputCount);
        m.scaling.sigma_x = Eigen::Map<const Eigen::VectorXd>(sigma.data(), kInputCount);
        m.scaling.mu_y = sc.at("mu_y").get<double>();
        m.scaling.sigma_y = sc.at("sigma_y").get<double>();
        if (j.contains("metrics") && j["metrics"].contains("train")) {
            m.train_rmse = number_from_json(j["metrics"]["train"].at("rmse"));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("model file is missing a field: ") + e.what());
    }
}

inline Eigen::VectorXd predict(const LoadedModel& m, const Dataset& d) { return predict(m.genes, m.weights, d.inputs, m.scaling); }

// ---------------------------------------------------------------------------
// Tables

/// Reference statistics layout: one row per measure, one column per variable.
inline std::string stats_table(const Dataset& d) {
    const auto stats = summary_stats(d);
    std::string s = "measure";
    for (const auto& c : stats) s += "," + c.name;
    s += "\n";
    auto row = [&](const char* label, auto field) {
        s += label;
        for (const auto& c : stats) {
            char buf[40];
            std::snprintf(buf, sizeof buf, ",%.3f", field(c));
            s += buf;
        }
        s += "\n";
    };
    row("Minimum", [](const ColumnStats& c) { return c.min; });
    row("Maximum", [](const ColumnStats& c) { return c.max; });
    row("Mean", [](const ColumnStats& c) { return c.mean; });
    row("Standard deviation", [](const ColumnStats& c) { return c.std; });
    return s;
}

/// model,characteristics,rmse,r2
inline std::string baseline_table(const std::vector<BaselineRow>& rows) {
    std::string s = "model,characteristics,rmse,r2\n";
    for (const auto& r : rows) {
        char buf[64];
        std::snprintf(buf, sizeof buf, ",%.4f,%.3f\n", r.train.rmse, r.train.r2);
        s += std::string(baseline_name(r.kind)) + ",\"" + std::string(baseline_characteristics(r.kind)) + "\"" + buf;
    }
    return s;
}

/// algorithm,mean,std,max,min
inline std::string bench_table(const MultiRunStats& mggp, const MultiRunStats& sggp) {
    std::string s = "algorithm,mean,std,max,min\n";
    auto row = [&](const char* name, const MultiRunStats& m) {
        s += std::string(name) + "," + csv_number(m.mean) + "," + csv_number(m.std) + "," + csv_number(m.max) + "," +
             csv_number(m.min) + "\n";
    };
    row("MGGP", mggp);
    row("SGGP", sggp);
    return s;
}

struct BenchOutcome {
    MultiRunStats mggp;
    MultiRunStats sggp;
    ojson manifest;
};

/// Repeated MGGP and SGGP runs on the same seeded split and the same run seeds.
inline BenchOutcome bench_workflow(const Dataset& data, const GpConfig& cfg, int n_runs, int threads = 1, SplitSpec spec = {}) {
    cfg.validate();
    Rng split_rng(mix_seed(cfg.rng_seed ^ kSplitSalt));
    const auto [train, test] = split(split_rng, data, spec);
    const auto seeds = derive_seeds(cfg.rng_seed, n_runs);
    BenchOutcome out;
    out.mggp = multi_run_stats(apply_mode(cfg, Mode::Mggp), train, &test, seeds, threads);
    out.sggp = multi_run_stats(apply_mode(cfg, Mode::Sggp), train, &test, seeds, threads);
    out.manifest = manifest_json(cfg, Mode::Mggp, data, spec.train_fraction);
    out.manifest["runs"] = n_runs;
    return out;
}

} // namespace mggp
