#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cratos/detectors.hpp"

namespace {

using namespace cratos;

bool contains(const std::vector<std::size_t>& v, std::size_t i) {
    return std::find(v.begin(), v.end(), i) != v.end();
}

TEST(GlobalThreshold, FlagsOnlyTheSpike) {
    std::vector<double> x(100, 0.0);
    x[50] = 100.0;
    DetectorParams p;
    p.sensitivity = 3.0;
    auto flags = detect_global_threshold(x, p);
    ASSERT_EQ(flags.size(), 1u);
    EXPECT_EQ(flags[0], 50u);
}

TEST(GlobalThreshold, ConstantSeriesNeverFlags) {
    std::vector<double> x(50, 7.0);
    DetectorParams p;
    EXPECT_TRUE(detect_global_threshold(x, p).empty());
}

TEST(GlobalThreshold, UsesPopulationStdDev) {
    // x = {0, 0, 0, 4}: mean 1, population variance (1+1+1+9)/4 = 3.
    // At sensitivity 1.7 the limit is 1.7*sqrt(3) = 2.944 < 3, so the last
    // point (|4-1| = 3) flags; a sample stddev (2) would not flag it.
    std::vector<double> x{0.0, 0.0, 0.0, 4.0};
    DetectorParams p;
    p.sensitivity = 1.7;
    auto flags = detect_global_threshold(x, p);
    ASSERT_EQ(flags.size(), 1u);
    EXPECT_EQ(flags[0], 3u);
}

TEST(DynamicThreshold, RepeatingPatternStaysQuietUntilCorrupted) {
    // Period 4 pattern repeated 6 times with one corrupted value; history at
    // that phase is constant, so MAD is zero and the floor makes any deviation
    // flag regardless of size.
    std::vector<double> pattern{1.0, 5.0, 2.0, 8.0};
    std::vector<double> x;
    for (int rep = 0; rep < 6; ++rep)
        for (double v : pattern) x.push_back(v);
    x[17] = 5.5;  // phase 1 in cycle 4
    DetectorParams p;
    p.sensitivity = 3.0;
    p.period = 4;
    auto flags = detect_dynamic_threshold(x, p);
    ASSERT_EQ(flags.size(), 1u);
    EXPECT_EQ(flags[0], 17u);
}

TEST(DynamicThreshold, FirstPeriodHasNoHistory) {
    std::vector<double> x{100.0, -100.0, 50.0, 1.0, 1.0, 1.0};
    DetectorParams p;
    p.period = 3;
    auto flags = detect_dynamic_threshold(x, p);
    for (std::size_t i : flags) EXPECT_GE(i, 3u);
}

TEST(DynamicThreshold, HistoryExcludesTheTestedPoint) {
    // Two cycles: the second cycle's value differs wildly; its history holds
    // only the first cycle's value, so it must flag. If the tested point
    // leaked into its own history the median would follow it and mask it.
    std::vector<double> x{1.0, 1.0, 1.0, 1.0, 9.0, 1.0};
    DetectorParams p;
    p.period = 2;
    p.sensitivity = 3.0;
    auto flags = detect_dynamic_threshold(x, p);
    EXPECT_TRUE(contains(flags, 4u));
}

TEST(LocalSteep, StepEdgeFlagsOncePastHistory) {
    // Flat, then a jump: the jump increment towers over a zero-variance
    // trailing history. The flag lands on the point AFTER the increment.
    std::vector<double> x(20, 0.0);
    for (std::size_t i = 10; i < x.size(); ++i) x[i] = 10.0;
    DetectorParams p;
    p.sensitivity = 3.0;
    p.window = 5;
    auto flags = detect_local_steep(x, p);
    ASSERT_EQ(flags.size(), 1u);
    EXPECT_EQ(flags[0], 10u);
}

TEST(LocalSteep, SteadyRampNeverFlags) {
    // All increments equal: each one sits exactly on its history mean, so the
    // centered excess is zero everywhere no matter the sensitivity.
    std::vector<double> x(30);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 2.5 * static_cast<double>(i);
    DetectorParams p;
    p.sensitivity = 0.5;
    p.window = 4;
    EXPECT_TRUE(detect_local_steep(x, p).empty());
}

TEST(LocalSteep, FirstIncrementIsNeverTested) {
    // d[0] has no trailing history; even a huge opening jump cannot flag.
    std::vector<double> x{0.0, 100.0, 100.0, 100.0, 100.0, 100.0};
    DetectorParams p;
    p.window = 3;
    auto flags = detect_local_steep(x, p);
    EXPECT_FALSE(contains(flags, 1u));
}

TEST(LocalSteep, HistoryIsTrailingAndExclusive) {
    // Increments: 0,0,0,8,0,... With window 3, the i=3 increment (value 8) is
    // judged against {0,0,0}: flags. The next increment (0) is judged against
    // {0,0,8}: mean 8/3, sd sqrt(128/9) = 3.77; |0 - 8/3| = 2.67 < 2*3.77,
    // so including the spike in history (rather than the tested point) is
    // what lets it pass.
    std::vector<double> x{0.0, 0.0, 0.0, 0.0, 8.0, 8.0, 8.0, 8.0};
    DetectorParams p;
    p.sensitivity = 2.0;
    p.window = 3;
    auto flags = detect_local_steep(x, p);
    ASSERT_EQ(flags.size(), 1u);
    EXPECT_EQ(flags[0], 4u);
}

TEST(GlobalSteep, FlagsThePointAfterTheBigIncrement) {
    std::vector<double> x(20, 0.0);
    for (std::size_t i = 10; i < x.size(); ++i) x[i] = 10.0;
    DetectorParams p;
    p.sensitivity = 3.0;
    auto flags = detect_global_steep(x, p);
    ASSERT_EQ(flags.size(), 1u);
    EXPECT_EQ(flags[0], 10u);
}

TEST(GlobalSteep, CenteredOnMeanIncrementSoTrendsStayQuiet) {
    std::vector<double> x(40);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = -3.0 * static_cast<double>(i);
    DetectorParams p;
    p.sensitivity = 0.5;
    EXPECT_TRUE(detect_global_steep(x, p).empty());
}

TEST(AllDetectors, MonotoneInSensitivity) {
    std::mt19937_64 rng(71);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(300);
    for (auto& v : x) v = g(rng);
    for (std::size_t i = 20; i < x.size(); i += 60) x[i] += 6.0;  // sprinkle outliers
    for (DetectorKind k : all_detectors()) {
        std::vector<std::size_t> prev;
        bool first = true;
        for (double s : {1.0, 2.0, 4.0, 8.0}) {
            DetectorParams p;
            p.sensitivity = s;
            p.window = 30;
            p.period = 50;
            auto flags = run_detector(k, x, p);
            if (!first) {
                // Raising sensitivity can only drop flags, never add them.
                EXPECT_TRUE(std::includes(prev.begin(), prev.end(), flags.begin(), flags.end()))
                    << to_string(k) << " s=" << s;
            }
            prev = flags;
            first = false;
        }
    }
}

TEST(DetectorParams, ValidationBounds) {
    DetectorParams p;
    EXPECT_NO_THROW(validate(p));
    p.sensitivity = 0.4;
    EXPECT_THROW(validate(p), std::invalid_argument);
    p.sensitivity = 10.5;
    EXPECT_THROW(validate(p), std::invalid_argument);
    p.sensitivity = 3.0;
    p.window = 2;
    EXPECT_THROW(validate(p), std::invalid_argument);
    p.window = 361;
    EXPECT_THROW(validate(p), std::invalid_argument);
    p.window = 60;
    p.period = 1;
    EXPECT_THROW(validate(p), std::invalid_argument);
    p.period = 2;
    EXPECT_NO_THROW(validate(p));
}

TEST(DetectorNames, RoundTrip) {
    for (DetectorKind k : all_detectors()) EXPECT_EQ(detector_from_string(to_string(k)), k);
    EXPECT_THROW(detector_from_string("nope"), std::invalid_argument);
}

}  // namespace
