#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "mggp/error.hpp"

namespace mggp::solar {

inline constexpr double kSolarConstant = 1367.0; // W m^-2
inline constexpr double kPi = 3.14159265358979323846;

namespace detail {
inline double rad(double deg) { return deg * kPi / 180.0; }
inline double deg(double rad) { return rad * 180.0 / kPi; }

inline void check_day(int day) {
    if (day < 1 || day > 365) throw std::invalid_argument("day of year must be in [1, 365], got " + std::to_string(day));
}
} // namespace detail

/// Solar declination in degrees for day-of-year `day` (1..365).
inline double declination(int day) {
    detail::check_day(day);
    // 360 * (284 + n) / 365 is a whole number of turns at n = 81; reduce before
    // converting so the equinox lands on an exact zero.
    const double turns = std::fmod(284.0 + day, 365.0) / 365.0;
    return 23.45 * std::sin(2.0 * kPi * turns);
}

/// Sunset hour angle in degrees, in [0, 180]. Throws PolarDayNight when the
/// sun does not set or does not rise.
inline double sunset_hour_angle(double latitude_deg, double declination_deg) {
    const double arg = -std::tan(detail::rad(latitude_deg)) * std::tan(detail::rad(declination_deg));
    if (!(std::abs(arg) <= 1.0)) {
        throw PolarDayNight("no sunrise/sunset at latitude " + std::to_string(latitude_deg) + " deg, declination " +
                            std::to_string(declination_deg) + " deg");
    }
    return detail::deg(std::acos(arg));
}

/// Maximum possible sunshine duration in hours.
inline double day_length_S0(double sunset_angle_deg) { return 2.0 / 15.0 * sunset_angle_deg; }

/// 1 + 0.033 cos(360 n / 365).
inline double eccentricity_factor(double day) {
    return 1.0 + 0.033 * std::cos(detail::rad(360.0 * day / 365.0));
}

/// cos(phi) cos(delta) sin(ws) + (pi ws / 180) sin(phi) sin(delta), all angles in degrees.
inline double geometric_factor(double latitude_deg, double declination_deg, double sunset_angle_deg) {
    const double phi = detail::rad(latitude_deg);
    const double dec = detail::rad(declination_deg);
    const double ws = detail::rad(sunset_angle_deg);
    return std::cos(phi) * std::cos(dec) * std::sin(ws) + ws * std::sin(phi) * std::sin(dec);
}

/// Daily extraterrestrial irradiation on a horizontal surface, J m^-2 day^-1.
inline double extraterrestrial_H0(double latitude_deg, int day) {
    const double dec = declination(day);
    const double ws = sunset_hour_angle(latitude_deg, dec);
    return 24.0 * 3.6e3 * kSolarConstant / kPi * eccentricity_factor(day) * geometric_factor(latitude_deg, dec, ws);
}

struct SolarReport {
    double declination_deg;
    double sunset_angle_deg;
    double day_length_h;
    double h0_j_per_m2;
};

inline SolarReport compute(double latitude_deg, int day) {
    SolarReport r{};
    r.declination_deg = declination(day);
    r.sunset_angle_deg = sunset_hour_angle(latitude_deg, r.declination_deg);
    r.day_length_h = day_length_S0(r.sunset_angle_deg);
    r.h0_j_per_m2 = extraterrestrial_H0(latitude_deg, day);
    return r;
}

/// Clearness-index line a + b * (S/S0).
struct AngstromModel {
    double a = 0.0;
    double b = 0.0;

    double predict(double s_ratio) const noexcept { return a + b * s_ratio; }
};

inline double angstrom_predict(const AngstromModel& m, double s_ratio) noexcept { return m.predict(s_ratio); }

/// Ordinary least-squares line through (s_ratio, clearness).
inline AngstromModel angstrom_fit(std::span<const double> s_ratio, std::span<const double> clearness) {
    if (s_ratio.size() != clearness.size()) throw std::invalid_argument("angstrom_fit: length mismatch");
    if (s_ratio.size() < 2) throw DegenerateFit("angstrom_fit: need at least 2 points");
    const auto n = static_cast<double>(s_ratio.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < s_ratio.size(); ++i) {
        mx += s_ratio[i];
        my += clearness[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < s_ratio.size(); ++i) {
        sxx += (s_ratio[i] - mx) * (s_ratio[i] - mx);
        sxy += (s_ratio[i] - mx) * (clearness[i] - my);
    }
    if (sxx == 0.0) throw DegenerateFit("angstrom_fit: all sunshine ratios are equal");
    AngstromModel m;
    m.b = sxy / sxx;
    m.a = my - m.b * mx;
    return m;
}

} // namespace mggp::solar
