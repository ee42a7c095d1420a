// Command-line front end: fit, predict, bench, baseline, stats, synth, solar.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mggp/baselines.hpp"
#include "mggp/config.hpp"
#include "mggp/dataio.hpp"
#include "mggp/engine.hpp"
#include "mggp/solar.hpp"
#include "mggp/workflow.hpp"

namespace fs = std::filesystem;
using namespace mggp;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

GpConfig resolve_config(const CommonOptions& o) {
    GpConfig cfg = o.config_path.empty() ? GpConfig{} : load_config(o.config_path);
    if (o.seed) cfg.rng_seed = *o.seed;
    cfg.validate();
    return cfg;
}

Dataset load_dataset(const std::string& path) {
    std::vector<std::string> warnings;
    Dataset d = load_csv(path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return d;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
}

std::string fixed(double v, int digits) {
    if (!std::isfinite(v)) return csv_number(v);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

int cmd_fit(const std::string& data_path, const CommonOptions& o, Mode mode, const std::string& out_dir) {
    const Dataset data = load_dataset(data_path);
    const GpConfig cfg = resolve_config(o);
    const auto fit = fit_workflow(data, cfg, mode, o.threads);

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "model.json", model_json(fit));
    write_file(fs::path(out_dir) / "trace.csv", trace_csv(fit.trace, fit.manifest));
    write_file(fs::path(out_dir) / "pareto.csv", pareto_csv(fit.trace.population, fit.manifest));

    const auto& tr = fit.trace;
    std::cout << "mode " << mode_name(mode) << ", seed " << fit.config.rng_seed << ", generations "
              << tr.records.back().generation << "\n";
    std::cout << "genes " << tr.best.genes.size() << ", complexity " << tr.best.complexity << "\n";
    std::cout << "train: rmse " << fixed(tr.train.rmse, 6) << ", r2 " << fixed(tr.train.r2, 4) << ", fit "
              << fixed(100.0 * tr.train.r2, 2) << "%\n";
    if (tr.test) {
        std::cout << "test:  rmse " << fixed(tr.test->rmse, 6) << ", r2 " << fixed(tr.test->r2, 4) << ", fit "
                  << fixed(100.0 * tr.test->r2, 2) << "%\n";
    }
    std::cout << "artifacts written to " << out_dir << "\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& out_path) {
    std::ifstream in(model_path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + model_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const LoadedModel model = parse_model_json(buf.str());
    const Dataset data = load_dataset(data_path);
    const Eigen::VectorXd yhat = predict(model, data);

    std::string s = "row,prediction\n";
    for (Eigen::Index r = 0; r < yhat.size(); ++r) s += std::to_string(r + 1) + "," + csv_number(yhat(r)) + "\n";
    emit(out_path, s);
    if (data.has_target()) {
        const auto m = score(data.y(), yhat);
        std::cout << "# rmse " << csv_number(m.rmse) << "\n# r2 " << csv_number(m.r2) << "\n";
    }
    return 0;
}

int cmd_bench(const std::string& data_path, const CommonOptions& o, int runs, const std::string& out_path) {
    const Dataset data = load_dataset(data_path);
    const GpConfig cfg = resolve_config(o);
    const auto bench = bench_workflow(data, cfg, runs, o.threads);
    emit(out_path, manifest_comment(bench.manifest) + bench_table(bench.mggp, bench.sggp));
    if (!out_path.empty()) std::cout << bench_table(bench.mggp, bench.sggp);
    return 0;
}

int cmd_baseline(const std::string& data_path, const std::string& out_path) {
    const Dataset data = load_dataset(data_path);
    emit(out_path, baseline_table(baseline_report(data)));
    return 0;
}

int cmd_stats(const std::string& data_path) {
    std::cout << stats_table(load_dataset(data_path));
    return 0;
}

int cmd_synth(int n, double noise, std::uint64_t seed, const std::string& out_path) {
    Rng rng(seed);
    const Dataset d = synth_generate(rng, n, noise);
    std::ostringstream s;
    s << "# synthetic clearness-index data: n=" << n << " noise=" << format_number(noise) << " seed=" << seed << "\n";
    write_csv(s, d);
    emit(out_path, s.str());
    return 0;
}

int cmd_solar(double latitude, int day) {
    const auto r = solar::compute(latitude, day);
    std::cout << "latitude " << fixed(latitude, 3) << " deg, day " << day << "\n";
    std::cout << "declination " << fixed(r.declination_deg, 3) << " deg\n";
    std::cout << "sunset hour angle " << fixed(r.sunset_angle_deg, 3) << " deg\n";
    std::cout << "S0 " << fixed(r.day_length_h, 3) << " h\n";
    std::cout << "H0 " << fixed(r.h0_j_per_m2, 0) << " J/m^2/day (" << fixed(r.h0_j_per_m2 / 1e6, 3) << " MJ/m^2/day)\n";
    return 0;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "key=value configuration file (defaults when omitted)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "master seed (overrides rng_seed)");
    cmd->add_option("--threads", o.threads, "fitness evaluation threads")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-gene genetic programming for clearness-index regression"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonOptions common;
    std::string dataset, model, out;
    std::string fit_out = "mggp_out";
    std::string mode_text = "mggp";
    int runs = 30;
    int synth_n = 192;
    double synth_noise = 0.01;
    std::uint64_t synth_seed = 1;
    double latitude = 0.0;
    int day = 1;

    auto* fit = app.add_subcommand("fit", "evolve a model: split, scale, run, write artifacts");
    fit->add_option("dataset", dataset, "CSV dataset")->required();
    add_common(fit, common);
    fit->add_option("--mode", mode_text, "mggp or sggp")->check(CLI::IsMember({"mggp", "sggp"}));
    fit->add_option("--out", fit_out, "output directory (default mggp_out)");

    auto* pred = app.add_subcommand("predict", "apply a saved model to a dataset");
    pred->add_option("model", model, "model JSON")->required();
    pred->add_option("dataset", dataset, "CSV dataset (clearness_index optional)")->required();
    pred->add_option("--out", out, "write predictions here instead of stdout");

    auto* bench = app.add_subcommand("bench", "repeated MGGP and SGGP runs, summary statistics");
    bench->add_option("dataset", dataset, "CSV dataset")->required();
    add_common(bench, common);
    bench->add_option("--runs", runs, "independent runs per variant")->check(CLI::Range(2, 100000));
    bench->add_option("--out", out, "write the table here");

    auto* base = app.add_subcommand("baseline", "linear / interactions / pure quadratic / quadratic regression");
    base->add_option("dataset", dataset, "CSV dataset")->required();
    base->add_option("--out", out, "write the table here");

    auto* stats = app.add_subcommand("stats", "min / max / mean / std per column");
    stats->add_option("dataset", dataset, "CSV dataset")->required();

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("-n,--rows", synth_n, "row count")->check(CLI::PositiveNumber);
    synth->add_option("--noise", synth_noise, "Gaussian noise std on the target")->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", synth_seed, "random seed");
    synth->add_option("--out", out, "output CSV (stdout when omitted)");

    auto* sol = app.add_subcommand("solar", "declination, sunset hour angle, day length, extraterrestrial irradiation");
    sol->add_option("latitude", latitude, "degrees north")->required();
    sol->add_option("day", day, "day of year (1..365)")->required()->check(CLI::Range(1, 365));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit) return cmd_fit(dataset, common, mode_text == "sggp" ? Mode::Sggp : Mode::Mggp, fit_out);
        if (*pred) return cmd_predict(model, dataset, out);
        if (*bench) return cmd_bench(dataset, common, runs, out);
        if (*base) return cmd_baseline(dataset, out);
        if (*stats) return cmd_stats(dataset);
        if (*synth) return cmd_synth(synth_n, synth_noise, synth_seed, out);
        if (*sol) return cmd_solar(latitude, day);
    } catch (const SchemaMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BadValue& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IllConditioned& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const PolarDayNight& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
