#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "cratos/metrics.hpp"

namespace {

using namespace cratos;

TEST(PrfFromCounts, HandComputedValues) {
    PrfMetrics m = prf_from_counts(3, 1, 2);
    EXPECT_DOUBLE_EQ(m.precision, 0.75);
    EXPECT_DOUBLE_EQ(m.recall, 0.6);
    EXPECT_DOUBLE_EQ(m.f1, 2.0 * 0.75 * 0.6 / (0.75 + 0.6));
}

TEST(PrfFromCounts, DegenerateCountsGiveZeroNotNan) {
    PrfMetrics m = prf_from_counts(0, 0, 0);
    EXPECT_EQ(m.precision, 0.0);
    EXPECT_EQ(m.recall, 0.0);
    EXPECT_EQ(m.f1, 0.0);
}

TEST(PrfFromCounts, PerfectCounts) {
    PrfMetrics m = prf_from_counts(5, 0, 0);
    EXPECT_DOUBLE_EQ(m.precision, 1.0);
    EXPECT_DOUBLE_EQ(m.recall, 1.0);
    EXPECT_DOUBLE_EQ(m.f1, 1.0);
}

std::vector<ClusterCode> each_code_times(int k) {
    std::vector<ClusterCode> codes;
    for (ClusterCode c : ClusterCode::all())
        for (int i = 0; i < k; ++i) codes.push_back(c);
    return codes;
}

TEST(ClusteringReport, PerfectPredictionIsAllOnesWithDiagonalConfusion) {
    std::vector<ClusterCode> truth = each_code_times(3);
    ClusteringReport r = clustering_report(truth, truth);
    EXPECT_EQ(r.total, 24u);
    for (int level = 0; level < 3; ++level) {
        for (int state = 0; state < 2; ++state) {
            const auto& m = r.metrics[level][state];
            EXPECT_DOUBLE_EQ(m.precision, 1.0);
            EXPECT_DOUBLE_EQ(m.recall, 1.0);
            EXPECT_DOUBLE_EQ(m.f1, 1.0);
        }
    }
    for (int t = 0; t < 8; ++t)
        for (int p = 0; p < 8; ++p) EXPECT_EQ(r.confusion[t][p], t == p ? 3u : 0u);
}

TEST(ClusteringReport, FullyInvertedPredictionScoresZero) {
    std::vector<ClusterCode> truth = each_code_times(2);
    std::vector<ClusterCode> predicted;
    for (const ClusterCode& c : truth)
        predicted.push_back(ClusterCode{!c.periodic, !c.large_amplitude, !c.dense_impulses});
    ClusteringReport r = clustering_report(predicted, truth);
    for (int level = 0; level < 3; ++level) {
        for (int state = 0; state < 2; ++state) {
            const auto& m = r.metrics[level][state];
            EXPECT_EQ(m.precision, 0.0);
            EXPECT_EQ(m.recall, 0.0);
            EXPECT_EQ(m.f1, 0.0);
        }
    }
    // Flipping all three bits maps leaf i onto leaf 7 - i.
    for (int t = 0; t < 8; ++t)
        for (int p = 0; p < 8; ++p) EXPECT_EQ(r.confusion[t][p], p == 7 - t ? 2u : 0u);
}

TEST(ClusteringReport, SingleMistakeMovesExactlyTheExpectedCells) {
    ClusterCode ttt = ClusterCode::from_string("TTT");
    ClusterCode tft = ClusterCode::from_string("TFT");
    ClusterCode fff = ClusterCode::from_string("FFF");
    std::vector<ClusterCode> truth{ttt, ttt, fff, fff};
    std::vector<ClusterCode> predicted{ttt, tft, fff, fff};
    ClusteringReport r = clustering_report(predicted, truth);

    // Levels 0 and 2 are untouched by the mistake.
    for (int level : {0, 2}) {
        for (int state = 0; state < 2; ++state) {
            EXPECT_DOUBLE_EQ(r.metrics[level][state].f1, 1.0) << level << state;
        }
    }
    // Level 1, T as positive: one of two true positives lost.
    EXPECT_DOUBLE_EQ(r.metrics[1][0].precision, 1.0);
    EXPECT_DOUBLE_EQ(r.metrics[1][0].recall, 0.5);
    EXPECT_DOUBLE_EQ(r.metrics[1][0].f1, 2.0 / 3.0);
    // Level 1, F as positive: the mistake shows up as a false positive.
    EXPECT_DOUBLE_EQ(r.metrics[1][1].precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.metrics[1][1].recall, 1.0);
    EXPECT_DOUBLE_EQ(r.metrics[1][1].f1, 0.8);

    EXPECT_EQ(r.confusion[7][7], 1u);
    EXPECT_EQ(r.confusion[7][5], 1u);
    EXPECT_EQ(r.confusion[0][0], 2u);
}

TEST(ClusteringReport, LengthMismatchNamesBothCounts) {
    std::vector<ClusterCode> a(3), b(5);
    try {
        clustering_report(a, b);
        FAIL() << "expected a size mismatch error";
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("3"), std::string::npos);
        EXPECT_NE(msg.find("5"), std::string::npos);
    }
}

TEST(PassRate, RatioAndBounds) {
    EXPECT_DOUBLE_EQ(pass_rate(8, 10), 0.8);
    EXPECT_DOUBLE_EQ(pass_rate(0, 5), 0.0);
    EXPECT_DOUBLE_EQ(pass_rate(5, 5), 1.0);
    EXPECT_THROW(pass_rate(1, 0), std::invalid_argument);
    EXPECT_THROW(pass_rate(-1, 5), std::invalid_argument);
    EXPECT_THROW(pass_rate(6, 5), std::invalid_argument);
}

TEST(ReportJson, CarriesLevelsAndConfusion) {
    std::vector<ClusterCode> truth = each_code_times(2);
    ClusteringReport r = clustering_report(truth, truth);
    nlohmann::json j = report_to_json(r);
    EXPECT_EQ(j.at("total").get<std::size_t>(), 16u);
    for (const char* level : {"section_sign", "swing", "diff_thres"}) {
        for (const char* state : {"T", "F"}) {
            const auto& m = j.at("levels").at(level).at(state);
            EXPECT_DOUBLE_EQ(m.at("precision").get<double>(), 1.0) << level << state;
            EXPECT_DOUBLE_EQ(m.at("f1").get<double>(), 1.0);
        }
    }
    for (int t = 0; t < 8; ++t) {
        const auto& row = j.at("confusion").at(ClusterCode::from_index(t).to_string());
        ASSERT_EQ(row.size(), 8u);
        for (int p = 0; p < 8; ++p)
            EXPECT_EQ(row[static_cast<std::size_t>(p)].get<std::size_t>(), t == p ? 2u : 0u);
    }
}

TEST(ReportTable, HasOneLabeledRowPerLevelAndState) {
    std::vector<ClusterCode> truth = each_code_times(1);
    std::string table = report_table(clustering_report(truth, truth));
    for (const char* level : {"section_sign", "swing", "diff_thres"})
        EXPECT_NE(table.find(level), std::string::npos) << level;
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 7);  // header + 6 rows
    EXPECT_NE(table.find("precision"), std::string::npos);
    EXPECT_NE(table.find("1.0000"), std::string::npos);
}

}  // namespace
