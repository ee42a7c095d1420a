#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mggp/error.hpp"
#include "mggp/exprtree.hpp"

namespace mggp {

/// Run parameters. Defaults are the reference MGGP settings.
struct GpConfig {
    int population_size = 100;
    int generations = 1000;
    int tournament_size = 3;
    int max_depth = 5;
    int max_trees = 15;
    double p_crossover = 0.85;
    double p_mutation = 0.10;
    double p_reproduction = 0.05;
    double fitness_target = 1e-5;
    int elitism_count = 1;
    std::uint64_t rng_seed = 1;
    double const_lo = -10.0;
    double const_hi = 10.0;
    double p_var = 0.8;
    double p_high_level_crossover = 0.5;

    TreeLimits tree_limits() const { return {max_depth, 6, const_lo, const_hi, p_var}; }

    /// Same settings restricted to one tree per individual.
    GpConfig single_gene() const {
        GpConfig c = *this;
        c.max_trees = 1;
        return c;
    }

    void validate() const {
        auto require = [](bool ok, const char* what) {
            if (!ok) throw ConfigError(what);
        };
        require(population_size >= 2, "population_size must be >= 2");
        require(generations >= 0, "generations must be >= 0");
        require(tournament_size >= 1, "tournament_size must be >= 1");
        require(max_depth >= 1, "max_depth must be >= 1");
        require(max_trees >= 1, "max_trees must be >= 1");
        require(p_crossover >= 0 && p_mutation >= 0 && p_reproduction >= 0, "operator probabilities must be non-negative");
        require(std::abs(p_crossover + p_mutation + p_reproduction - 1.0) <= 1e-12,
                "p_crossover + p_mutation + p_reproduction must equal 1");
        require(elitism_count >= 0 && elitism_count < population_size, "elitism_count must be in [0, population_size)");
        require(std::isfinite(const_lo) && std::isfinite(const_hi) && const_lo <= const_hi, "const_range must satisfy lo <= hi");
        require(p_var >= 0 && p_var <= 1, "p_var must be in [0, 1]");
        require(p_high_level_crossover >= 0 && p_high_level_crossover <= 1, "p_high_level_crossover must be in [0, 1]");
        require(!std::isnan(fitness_target), "fitness_target must be a number");
    }
};

namespace detail {

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
    T v{};
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || p != text.data() + text.size()) {
        throw ConfigError("bad value for '" + std::string(key) + "': '" + std::string(text) + "'");
    }
    return v;
}

inline std::string_view trim_ws(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Applies one key=value setting. Unknown keys are errors.
inline void apply_setting(GpConfig& c, std::string_view key, std::string_view value) {
    using detail::parse_value;
    if (key == "population_size") c.population_size = parse_value<int>(key, value);
    else if (key == "generations") c.generations = parse_value<int>(key, value);
    else if (key == "tournament_size") c.tournament_size = parse_value<int>(key, value);
    else if (key == "max_depth") c.max_depth = parse_value<int>(key, value);
    else if (key == "max_trees") c.max_trees = parse_value<int>(key, value);
    else if (key == "p_crossover") c.p_crossover = parse_value<double>(key, value);
    else if (key == "p_mutation") c.p_mutation = parse_value<double>(key, value);
    else if (key == "p_reproduction") c.p_reproduction = parse_value<double>(key, value);
    else if (key == "fitness_target") c.fitness_target = parse_value<double>(key, value);
    else if (key == "elitism_count") c.elitism_count = parse_value<int>(key, value);
    else if (key == "rng_seed") c.rng_seed = parse_value<std::uint64_t>(key, value);
    else if (key == "p_var") c.p_var = parse_value<double>(key, value);
    else if (key == "p_high_level_crossover") c.p_high_level_crossover = parse_value<double>(key, value);
    else if (key == "const_range") {
        const auto comma = value.find(',');
        if (comma == std::string_view::npos) throw ConfigError("const_range must be 'lo,hi'");
        c.const_lo = parse_value<double>(key, detail::trim_ws(value.substr(0, comma)));
        c.const_hi = parse_value<double>(key, detail::trim_ws(value.substr(comma + 1)));
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

/// Flat key=value text, '#' comments. Starts from the defaults.
inline GpConfig read_config(std::istream& in) {
    GpConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = line;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = detail::trim_ws(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        apply_setting(c, detail::trim_ws(s.substr(0, eq)), detail::trim_ws(s.substr(eq + 1)));
    }
    c.validate();
    return c;
}

inline GpConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return read_config(in);
}

/// Every field as (key, value text), in declaration order.
inline std::vector<std::pair<std::string, std::string>> config_entries(const GpConfig& c) {
    using detail::fmt_double;
    return {
        {"population_size", std::to_string(c.population_size)},
        {"generations", std::to_string(c.generations)},
        {"tournament_size", std::to_string(c.tournament_size)},
        {"max_depth", std::to_string(c.max_depth)},
        {"max_trees", std::to_string(c.max_trees)},
        {"p_crossover", fmt_double(c.p_crossover)},
        {"p_mutation", fmt_double(c.p_mutation)},
        {"p_reproduction", fmt_double(c.p_reproduction)},
        {"fitness_target", fmt_double(c.fitness_target)},
        {"elitism_count", std::to_string(c.elitism_count)},
        {"rng_seed", std::to_string(c.rng_seed)},
        {"const_range", fmt_double(c.const_lo) + "," + fmt_double(c.const_hi)},
        {"p_var", fmt_double(c.p_var)},
        {"p_high_level_crossover", fmt_double(c.p_high_level_crossover)},
    };
}

} // namespace mggp
