#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mggp/error.hpp"
#include "mggp/rng.hpp"

namespace mggp {

inline constexpr int kInputCount = 6;

inline constexpr std::array<std::string_view, kInputCount> kInputColumns = {
    "latitude", "longitude", "altitude", "month", "s_ratio", "t_ratio",
};
inline constexpr std::string_view kTargetColumn = "clearness_index";

/// Six inputs (latitude, longitude, altitude, month, S/S0, T/T0) and an
/// optional clearness-index target.
struct Dataset {
    Eigen::MatrixXd inputs; // n x 6
    std::optional<Eigen::VectorXd> target;

    Eigen::Index rows() const noexcept { return inputs.rows(); }
    bool has_target() const noexcept { return target.has_value(); }

    const Eigen::VectorXd& y() const {
        if (!target) throw Error("dataset has no clearness_index column");
        return *target;
    }

    /// Rows selected by `idx`, in the given order.
    Dataset subset(const std::vector<Eigen::Index>& idx) const {
        Dataset out;
        out.inputs.resize(static_cast<Eigen::Index>(idx.size()), inputs.cols());
        if (target) out.target = Eigen::VectorXd(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const auto r = static_cast<Eigen::Index>(k);
            out.inputs.row(r) = inputs.row(idx[k]);
            if (target) (*out.target)(r) = (*target)(idx[k]);
        }
        return out;
    }
};

/// Checks the dataset invariants; returns warnings for values outside the
/// ratio sanity range [0, 1.2]. Throws BadValue on hard violations.
inline std::vector<std::string> validate(const Dataset& d) {
    if (d.inputs.cols() != kInputCount) throw Error("dataset must have 6 input columns");
    if (d.rows() < 1) throw Error("dataset is empty");
    if (d.target && d.target->size() != d.rows()) throw Error("target length does not match row count");

    std::vector<std::string> warnings;
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
        const auto row = static_cast<std::size_t>(r + 1);
        for (int c = 0; c < kInputCount; ++c) {
            const double v = d.inputs(r, c);
            const std::string col(kInputColumns[static_cast<std::size_t>(c)]);
            if (!std::isfinite(v)) throw BadValue(row, col, std::to_string(v), "non-finite value");
            if (c == 3 && (v != std::floor(v) || v < 1 || v > 12)) {
                throw BadValue(row, col, std::to_string(v), "month must be an integer in [1, 12]");
            }
            if ((c == 4 || c == 5) && (v < 0.0 || v > 1.2)) {
                warnings.push_back("row " + std::to_string(row) + ": " + col + " outside [0, 1.2]");
            }
        }
        if (d.target && !std::isfinite((*d.target)(r))) {
            throw BadValue(row, std::string(kTargetColumn), std::to_string((*d.target)(r)), "non-finite value");
        }
    }
    return warnings;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline bool skippable(std::string_view line) {
    line = trim(line);
    return line.empty() || line.front() == '#';
}

} // namespace detail

/// Parses the documented CSV schema. The clearness_index column is optional;
/// without it the dataset carries inputs only.
inline Dataset read_csv(std::istream& in, std::vector<std::string>* warnings = nullptr) {
    std::string line;
    std::vector<std::string_view> header;
    std::string header_line;
    while (std::getline(in, line)) {
        if (detail::skippable(line)) continue;
        header_line = line;
        header = detail::split_commas(header_line);
        break;
    }
    for (std::size_t c = 0; c < kInputColumns.size(); ++c) {
        if (c >= header.size() || header[c] != kInputColumns[c]) throw SchemaMismatch(std::string(kInputColumns[c]));
    }
    bool with_target = false;
    if (header.size() == kInputColumns.size() + 1) {
        if (header.back() != kTargetColumn) throw SchemaMismatch(std::string(kTargetColumn));
        with_target = true;
    } else if (header.size() > kInputColumns.size() + 1) {
        throw SchemaMismatch(std::string(kTargetColumn));
    }
    const std::size_t width = header.size();

    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::skippable(line)) continue;
        ++row;
        const auto cells = detail::split_commas(line);
        if (cells.size() != width) {
            throw BadValue(row, std::string(cells.size() < width ? header[cells.size()] : header.back()), std::string(detail::trim(line)),
                           "expected " + std::to_string(width) + " fields, found " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            double v = 0.0;
            const auto cell = cells[c];
            const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc() || p != cell.data() + cell.size()) {
                throw BadValue(row, std::string(header[c]), std::string(cell), "not a decimal number");
            }
            if (!std::isfinite(v)) throw BadValue(row, std::string(header[c]), std::string(cell), "non-finite value");
            values.push_back(v);
        }
    }
    if (row == 0) throw Error("dataset has no data rows");

    Dataset d;
    const auto n = static_cast<Eigen::Index>(row);
    d.inputs.resize(n, kInputCount);
    if (with_target) d.target = Eigen::VectorXd(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto base = static_cast<std::size_t>(r) * width;
        for (int c = 0; c < kInputCount; ++c) d.inputs(r, c) = values[base + static_cast<std::size_t>(c)];
        if (with_target) (*d.target)(r) = values[base + kInputColumns.size()];
    }
    auto w = validate(d);
    if (warnings) warnings->insert(warnings->end(), w.begin(), w.end());
    return d;
}

inline Dataset load_csv(const std::string& path, std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open dataset file: " + path);
    return read_csv(in, warnings);
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& out, const Dataset& d) {
    for (std::size_t c = 0; c < kInputColumns.size(); ++c) out << (c ? "," : "") << kInputColumns[c];
    if (d.target) out << ',' << kTargetColumn;
    out << '\n';
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
        for (int c = 0; c < kInputCount; ++c) out << (c ? "," : "") << format_number(d.inputs(r, c));
        if (d.target) out << ',' << format_number((*d.target)(r));
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Summary statistics

struct ColumnStats {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double std = 0.0; // sample (n - 1)
};

inline ColumnStats column_stats(std::string name, const Eigen::VectorXd& v) {
    ColumnStats s;
    s.name = std::move(name);
    s.min = v.minCoeff();
    s.max = v.maxCoeff();
    s.mean = v.mean();
    s.std = v.size() > 1 ? std::sqrt((v.array() - s.mean).square().sum() / static_cast<double>(v.size() - 1)) : 0.0;
    return s;
}

/// Min/max/mean/sample std per column: six inputs, then the target when present.
inline std::vector<ColumnStats> summary_stats(const Dataset& d) {
    if (d.rows() < 2) throw Error("summary_stats needs at least 2 rows");
    std::vector<ColumnStats> out;
    for (int c = 0; c < kInputCount; ++c) {
        out.push_back(column_stats(std::string(kInputColumns[static_cast<std::size_t>(c)]), d.inputs.col(c)));
    }
    if (d.target) out.push_back(column_stats(std::string(kTargetColumn), *d.target));
    return out;
}

// ---------------------------------------------------------------------------
// Train/test split

struct SplitSpec {
    double train_fraction = 0.70;
};

inline Eigen::Index train_size(Eigen::Index n, double fraction) {
    return static_cast<Eigen::Index>(std::lround(fraction * static_cast<double>(n)));
}

/// Uniform random partition; each part keeps the original row order.
inline std::pair<Dataset, Dataset> split(Rng& rng, const Dataset& d, SplitSpec spec = {}) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) throw Error("train_fraction must be in (0, 1)");
    if (d.rows() < 10) throw Error("split needs at least 10 rows");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(d.rows()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto k = static_cast<std::size_t>(train_size(d.rows(), spec.train_fraction));
    std::vector<Eigen::Index> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<Eigen::Index> test(idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {d.subset(train), d.subset(test)};
}

// ---------------------------------------------------------------------------
// Z-score scaling

struct ScalingParams {
    Eigen::VectorXd mu_x;
    Eigen::VectorXd sigma_x;
    double mu_y = 0.0;
    double sigma_y = 1.0;
};

/// Per-column mean and sample std of the training subset.
inline ScalingParams fit_scaling(const Dataset& train) {
    if (train.rows() < 2) throw Error("fit_scaling needs at least 2 rows");
    ScalingParams p;
    p.mu_x.resize(kInputCount);
    p.sigma_x.resize(kInputCount);
    for (int c = 0; c < kInputCount; ++c) {
        const auto s = column_stats(std::string(kInputColumns[static_cast<std::size_t>(c)]), train.inputs.col(c));
        if (!(s.std > 0.0)) throw ConstantColumn(s.name);
        p.mu_x(c) = s.mean;
        p.sigma_x(c) = s.std;
    }
    const auto sy = column_stats(std::string(kTargetColumn), train.y());
    if (!(sy.std > 0.0)) throw ConstantColumn(sy.name);
    p.mu_y = sy.mean;
    p.sigma_y = sy.std;
    return p;
}

inline Eigen::MatrixXd scale_inputs(const Eigen::MatrixXd& x, const ScalingParams& p) {
    return ((x.rowwise() - p.mu_x.transpose()).array().rowwise() / p.sigma_x.transpose().array()).matrix();
}

inline Eigen::VectorXd scale_target(const Eigen::VectorXd& y, const ScalingParams& p) {
    return ((y.array() - p.mu_y) / p.sigma_y).matrix();
}

inline Eigen::VectorXd unscale_target(const Eigen::VectorXd& y, const ScalingParams& p) {
    return (p.sigma_y * y.array() + p.mu_y).matrix();
}

// ---------------------------------------------------------------------------
// Stations and the synthetic generator

struct Station {
    std::string_view name;
    double latitude;  // degrees N
    double longitude; // degrees E
    double altitude;  // metres above mean sea level
    std::string_view climate_zone;
};

/// The 23 radiation stations (see data/stations.csv).
inline constexpr std::array<Station, 23> kStations = {{
    {"New Delhi", 28.58, 77.2, 216, "Composite"},
    {"Nagpur", 21.1, 79.05, 31, "Composite"},
    {"Ahmedabad", 23.07, 72.63, 55, "Hot & Dry"},
    {"Jodhpur", 26.3, 73.02, 224, "Hot & Dry"},
    {"Kolkata", 22.65, 88.45, 6, "Warm & Humid"},
    {"Vishakhapatnam", 17.72, 83.23, 3, "Warm & Humid"},
    {"Shillong", 25.57, 91.88, 1600, "Cold & Cloudy"},
    {"Srinagar", 34.08, 74.83, 1586, "Cold & Cloudy"},
    {"Jaipur", 26.92, 75.98, 431, "Hot & Dry"},
    {"Varanasi", 25.33, 83, 80.71, "Composite"},
    {"Patna", 25.6, 85.12, 53, "Composite"},
    {"Bhopal", 23.26, 77.4, 427, "Composite"},
    {"Ranchi", 23.35, 85.33, 629, "Composite"},
    {"Bhavnagar", 21.77, 72.15, 24, "Hot & Dry"},
    {"Mumbai", 18.96, 72.82, 11, "Warm & Humid"},
    {"Pune", 18.54, 73.86, 560, "Hot and Dry"},
    {"Hyderabad", 17.36, 78.46, 542, "Composite"},
    {"Goa", 15.49, 73.82, 7, "Warm & Humid"},
    {"Chennai", 13, 80.18, 16, "Warm & Humid"},
    {"Bangalore", 12.96, 77.58, 921, "Moderate"},
    {"Port Blair", 11.62, 92.72, 79, "Warm & Humid"},
    {"Minicoy", 8.28, 73.03, 2, "Warm & Humid"},
    {"Thiruvananthapuram", 8.5, 76.9, 10, "Warm & Humid"},
}};

/// Indices into kStations of the 16 stations whose 12 monthly records make up
/// the 192-row reference table: this subset reproduces its latitude,
/// longitude and altitude means and ranges exactly.
inline constexpr std::array<int, 16> kSynthStations = {0, 2, 3, 4, 5, 7, 8, 11, 14, 15, 16, 17, 18, 19, 20, 21};

namespace synth {

// Latent normal parameters whose truncation to [lo, hi] has the reference mean and std
// (S/S0: mean 0.769, std 0.112 on [0.460, 1.002]; T/T0: mean 0.714, std 0.161 on [0.026, 0.940]).
inline constexpr double kSRatioMu = 0.7771824066209863;
inline constexpr double kSRatioSigma = 0.12474106430491282;
inline constexpr double kSRatioLo = 0.460;
inline constexpr double kSRatioHi = 1.002;
inline constexpr double kTRatioMu = 0.8608098611751799;
inline constexpr double kTRatioSigma = 0.24393906012266692;
inline constexpr double kTRatioLo = 0.026;
inline constexpr double kTRatioHi = 0.940;

inline double truncated_normal(Rng& rng, double mu, double sigma, double lo, double hi) {
    std::normal_distribution<double> dist(mu, sigma);
    while (true) {
        const double v = dist(rng);
        if (v >= lo && v <= hi) return v;
    }
}

} // namespace synth

/// Noiseless clearness index used by the synthetic generator: an
/// Angstrom-type line a + b * s_ratio whose coefficients vary sinusoidally
/// with month and latitude.
///   a = 0.21 + 0.08 sin(2 pi (month - 1) / 12) + 0.05 cos(3 latitude)
///   b = 0.42 + 0.12 cos(2 pi (month - 1) / 12) sin(2 latitude)
/// Latitude in degrees.
inline double synth_ground_truth(double latitude, double month, double s_ratio) {
    constexpr double pi = 3.14159265358979323846;
    const double season = 2.0 * pi * (month - 1.0) / 12.0;
    const double lat = latitude * pi / 180.0;
    const double a = 0.21 + 0.08 * std::sin(season) + 0.05 * std::cos(3.0 * lat);
    const double b = 0.42 + 0.12 * std::cos(season) * std::sin(2.0 * lat);
    return a + b * s_ratio;
}

/// Synthetic dataset matched to the reference summary statistics. Row i uses
/// station kSynthStations[(i / 12) % 16] and month (i % 12) + 1.
inline Dataset synth_generate(Rng& rng, Eigen::Index n, double noise_sigma) {
    if (n < 1) throw Error("synth_generate: n must be >= 1");
    Dataset d;
    d.inputs.resize(n, kInputCount);
    d.target = Eigen::VectorXd(n);
    std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& st = kStations[static_cast<std::size_t>(kSynthStations[static_cast<std::size_t>((i / 12) % 16)])];
        const double month = static_cast<double>(i % 12 + 1);
        const double s = synth::truncated_normal(rng, synth::kSRatioMu, synth::kSRatioSigma, synth::kSRatioLo, synth::kSRatioHi);
        const double t = synth::truncated_normal(rng, synth::kTRatioMu, synth::kTRatioSigma, synth::kTRatioLo, synth::kTRatioHi);
        d.inputs.row(i) << st.latitude, st.longitude, st.altitude, month, s, t;
        double y = synth_ground_truth(st.latitude, month, s);
        if (noise_sigma > 0.0) y += noise(rng);
        (*d.target)(i) = y;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Fingerprint

/// FNV-1a over the bit patterns of a column.
inline std::uint64_t column_checksum(const Eigen::VectorXd& v) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::uint64_t bits = 0;
        const double x = v(i);
        static_assert(sizeof bits == sizeof x);
        std::memcpy(&bits, &x, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

} // namespace mggp
