#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mggp/baselines.hpp"
#include "mggp/solar.hpp"

using namespace mggp;
using namespace mggp::solar;

namespace {
// Frozen before the implementation: independent evaluation at latitude 0, day 81.
constexpr double kH0EquatorEquinox = 37812970.3468155;
} // namespace

TEST(Declination, Examples) {
    EXPECT_NEAR(declination(81), 0.0, 1e-9);
    EXPECT_NEAR(declination(172), 23.45, 0.01);
    EXPECT_NEAR(declination(355), -23.45, 0.01);
}

TEST(Declination, BoundsAndDomain) {
    for (int n = 1; n <= 365; ++n) {
        EXPECT_LE(std::abs(declination(n)), 23.45);
    }
    EXPECT_THROW(declination(0), std::invalid_argument);
    EXPECT_THROW(declination(366), std::invalid_argument);
}

TEST(SunsetAngle, Examples) {
    for (double dec : {-23.45, -10.0, 0.0, 12.0, 23.45}) EXPECT_NEAR(sunset_hour_angle(0, dec), 90.0, 1e-12);
    for (double lat : {-60.0, -20.0, 35.0, 66.0}) EXPECT_NEAR(sunset_hour_angle(lat, 0), 90.0, 1e-12);
    EXPECT_THROW(sunset_hour_angle(70, 23.45), PolarDayNight);
    EXPECT_THROW(sunset_hour_angle(-70, 23.45), PolarDayNight);
    EXPECT_GT(sunset_hour_angle(30, 20), 90.0);
    EXPECT_LT(sunset_hour_angle(30, -20), 90.0);
}

TEST(DayLength, Examples) {
    EXPECT_EQ(day_length_S0(90), 12.0);
    EXPECT_EQ(day_length_S0(0), 0.0);
    EXPECT_NEAR(day_length_S0(105), 14.0, 1e-12);
}

TEST(DayLength, EquatorIsAlwaysTwelveHours) {
    for (int n = 1; n <= 365; ++n) EXPECT_EQ(day_length_S0(sunset_hour_angle(0, declination(n))), 12.0);
}

TEST(H0, EquatorAtEquinox) {
    EXPECT_NEAR(extraterrestrial_H0(0, 81), kH0EquatorEquinox, 1e-9 * kH0EquatorEquinox);
    EXPECT_NEAR(compute(0, 81).h0_j_per_m2 / 1e6, 37.8, 0.05);
}

TEST(H0, Factors) {
    EXPECT_NEAR(geometric_factor(0, 0, 90), 1.0, 1e-15);
    EXPECT_EQ(eccentricity_factor(91.25), 1.0);
}

TEST(H0, PositiveWhereDefined) {
    for (double lat = -66; lat <= 66; lat += 3) {
        for (int n = 1; n <= 365; n += 7) EXPECT_GT(extraterrestrial_H0(lat, n), 0.0) << lat << " " << n;
    }
    EXPECT_THROW(extraterrestrial_H0(80, 172), PolarDayNight);
}

TEST(H0, HemisphereAntisymmetry) {
    for (double lat = 0; lat <= 60; lat += 5) {
        for (double dec = -23.45; dec <= 23.45; dec += 2.345) {
            const double a = geometric_factor(lat, dec, sunset_hour_angle(lat, dec));
            const double b = geometric_factor(-lat, -dec, sunset_hour_angle(-lat, -dec));
            EXPECT_NEAR(a, b, 1e-14);
        }
    }
}

TEST(Angstrom, PredictAndFit) {
    EXPECT_EQ(angstrom_predict({0.25, 0.5}, 0.5), 0.5);
    std::vector<double> s, y;
    for (int i = 0; i < 10; ++i) {
        s.push_back(0.3 + 0.07 * i);
        y.push_back(0.2 + 0.6 * s.back());
    }
    const auto m = angstrom_fit(s, y);
    EXPECT_NEAR(m.a, 0.2, 1e-10);
    EXPECT_NEAR(m.b, 0.6, 1e-10);
}

TEST(Angstrom, DegenerateInputs) {
    const std::vector<double> same = {0.5, 0.5, 0.5};
    const std::vector<double> y = {0.4, 0.5, 0.6};
    EXPECT_THROW(angstrom_fit(same, y), DegenerateFit);
    EXPECT_THROW(angstrom_fit(std::vector<double>{0.5}, std::vector<double>{0.4}), DegenerateFit);
}

TEST(Angstrom, WorseThanQuadraticBaselineOnSyntheticData) {
    Rng rng(3);
    const Dataset d = synth_generate(rng, 192, 0.01);
    std::vector<double> s(d.inputs.col(4).data(), d.inputs.col(4).data() + d.rows());
    std::vector<double> y(d.y().data(), d.y().data() + d.rows());
    const auto m = angstrom_fit(s, y);
    double ss = 0;
    for (std::size_t i = 0; i < s.size(); ++i) ss += (y[i] - m.predict(s[i])) * (y[i] - m.predict(s[i]));
    const double angstrom_rmse = std::sqrt(ss / static_cast<double>(s.size()));
    EXPECT_GT(angstrom_rmse, fit_baseline(d, BaselineKind::Quadratic).second.rmse);
}
