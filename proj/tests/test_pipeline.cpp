#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cratos/pipeline.hpp"

namespace {

using namespace cratos;

std::vector<double> spiky_series() {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 0.3);
    std::vector<double> x(400);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::sin(2.0 * 3.141592653589793 * static_cast<double>(i) / 40.0) + g(rng);
    x[120] += 9.0;
    x[121] -= 9.0;
    x[300] += 12.0;
    return x;
}

PipelineConfig full_config() {
    PipelineConfig cfg;
    cfg.normalize = false;
    cfg.smoother = {SmootherKind::mean, 3};
    cfg.detectors = {DetectorKind::global_threshold, DetectorKind::dynamic_threshold,
                     DetectorKind::local_steep, DetectorKind::global_steep};
    DetectorParams base;
    base.sensitivity = 4.0;
    base.window = 30;
    base.period = 40;
    for (DetectorKind k : cfg.detectors) cfg.params[k] = base;
    return cfg;
}

std::string message_of(const PipelineConfig& cfg, std::size_t length) {
    try {
        validate(cfg, length);
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    return "";
}

TEST(RunPipeline, UnionIsSortedUniqueMergeOfPerDetectorFlags) {
    TimeSeries ts(spiky_series());
    auto result = run_pipeline(full_config(), ts);
    ASSERT_FALSE(result.anomalous_indices.empty());
    EXPECT_TRUE(std::is_sorted(result.anomalous_indices.begin(), result.anomalous_indices.end()));
    EXPECT_EQ(std::adjacent_find(result.anomalous_indices.begin(), result.anomalous_indices.end()),
              result.anomalous_indices.end());

    std::vector<std::size_t> merged;
    for (const auto& [k, flags] : result.per_detector)
        merged.insert(merged.end(), flags.begin(), flags.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    EXPECT_EQ(result.anomalous_indices, merged);
}

TEST(RunPipeline, PerDetectorFlagsMatchRunningDetectorsDirectly) {
    PipelineConfig cfg = full_config();
    TimeSeries ts(spiky_series());
    auto result = run_pipeline(cfg, ts);
    std::vector<double> x = smooth_values(ts.values(), cfg.smoother);
    for (DetectorKind k : cfg.detectors)
        EXPECT_EQ(result.per_detector.at(k), run_detector(k, x, cfg.params.at(k)))
            << to_string(k);
}

TEST(RunPipeline, DetectorOrderDoesNotChangeTheUnion) {
    PipelineConfig a = full_config();
    PipelineConfig b = a;
    std::reverse(b.detectors.begin(), b.detectors.end());
    TimeSeries ts(spiky_series());
    EXPECT_EQ(run_pipeline(a, ts).anomalous_indices, run_pipeline(b, ts).anomalous_indices);
}

TEST(RunPipeline, MedianSmootherSwallowsAnIsolatedSpike) {
    std::vector<double> x(200, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2 == 0) ? 0.1 : -0.1;
    x[100] = 50.0;
    PipelineConfig cfg;
    cfg.detectors = {DetectorKind::global_threshold};
    cfg.params[DetectorKind::global_threshold].sensitivity = 5.0;

    cfg.smoother = {SmootherKind::median, 1};
    auto raw = run_pipeline(cfg, TimeSeries(x));
    EXPECT_TRUE(std::find(raw.anomalous_indices.begin(), raw.anomalous_indices.end(), 100u) !=
                raw.anomalous_indices.end());

    // A width-5 median removes the single-point spike before detection, which
    // pins down the stage order: smoothing happens first.
    cfg.smoother = {SmootherKind::median, 5};
    auto smoothed = run_pipeline(cfg, TimeSeries(x));
    EXPECT_TRUE(smoothed.anomalous_indices.empty());
}

TEST(RunPipeline, NormalizationLeavesScaleFreeDetectorsAlone) {
    // global_threshold and global_steep compare deviations against a stddev
    // computed from the same data, so a min-max rescale cannot move any point
    // across the decision boundary (away from exact ties).
    std::vector<double> x = spiky_series();
    for (auto& v : x) v = 400.0 * v + 12345.0;
    PipelineConfig cfg;
    cfg.detectors = {DetectorKind::global_threshold, DetectorKind::global_steep};
    DetectorParams p;
    p.sensitivity = 4.0;
    cfg.params[DetectorKind::global_threshold] = p;
    cfg.params[DetectorKind::global_steep] = p;

    cfg.normalize = false;
    auto plain = run_pipeline(cfg, TimeSeries(x));
    cfg.normalize = true;
    auto normed = run_pipeline(cfg, TimeSeries(x));
    EXPECT_EQ(plain.anomalous_indices, normed.anomalous_indices);
    ASSERT_FALSE(plain.anomalous_indices.empty());
}

TEST(PipelineValidate, RejectsEmptyAndDuplicateDetectors) {
    PipelineConfig cfg;
    EXPECT_NE(message_of(cfg, 100).find("no detectors"), std::string::npos);

    cfg.detectors = {DetectorKind::local_steep, DetectorKind::local_steep};
    cfg.params[DetectorKind::local_steep] = DetectorParams{};
    std::string msg = message_of(cfg, 1000);
    EXPECT_NE(msg.find("local_steep"), std::string::npos);
    EXPECT_NE(msg.find("listed twice"), std::string::npos);
}

TEST(PipelineValidate, SmootherWindowRules) {
    PipelineConfig cfg;
    cfg.detectors = {DetectorKind::global_threshold};
    DetectorParams tight;
    tight.window = 3;  // keep the detector window clear of short-series checks
    cfg.params[DetectorKind::global_threshold] = tight;

    cfg.smoother.window = 4;
    EXPECT_NE(message_of(cfg, 100).find("odd"), std::string::npos);
    cfg.smoother.window = 17;  // odd but beyond what a recipe may request
    EXPECT_NE(message_of(cfg, 100).find("within [1, 15]"), std::string::npos);
    cfg.smoother.window = 15;
    EXPECT_NE(message_of(cfg, 9).find("exceeds series length 9"), std::string::npos);
    EXPECT_EQ(message_of(cfg, 15), "");
}

TEST(PipelineValidate, NamesTheDetectorMissingParameters) {
    PipelineConfig cfg;
    cfg.detectors = {DetectorKind::global_threshold, DetectorKind::global_steep};
    cfg.params[DetectorKind::global_threshold] = DetectorParams{};
    std::string msg = message_of(cfg, 100);
    EXPECT_NE(msg.find("missing parameters"), std::string::npos);
    EXPECT_NE(msg.find("global_steep"), std::string::npos);
}

TEST(PipelineValidate, DetectorWindowMustFitTheSeries) {
    PipelineConfig cfg;
    cfg.detectors = {DetectorKind::local_steep};
    DetectorParams p;
    p.window = 120;
    cfg.params[DetectorKind::local_steep] = p;
    EXPECT_NE(message_of(cfg, 100).find("window 120 exceeds series length 100"),
              std::string::npos);
    EXPECT_EQ(message_of(cfg, 120), "");
}

TEST(PipelineValidate, DynamicThresholdNeedsTwoFullCycles) {
    PipelineConfig cfg;
    cfg.detectors = {DetectorKind::dynamic_threshold};
    DetectorParams p;
    p.period = 60;
    cfg.params[DetectorKind::dynamic_threshold] = p;
    EXPECT_NE(message_of(cfg, 119).find("two cycles"), std::string::npos);
    EXPECT_EQ(message_of(cfg, 120), "");
}

TEST(PipelineValidate, BadDetectorParamsPropagate) {
    PipelineConfig cfg;
    cfg.detectors = {DetectorKind::global_threshold};
    DetectorParams p;
    p.sensitivity = 99.0;
    cfg.params[DetectorKind::global_threshold] = p;
    EXPECT_THROW(validate(cfg, 100), std::invalid_argument);
}

TEST(PipelineJson, RoundTripPreservesConfigAndBehavior) {
    PipelineConfig cfg = full_config();
    cfg.normalize = true;
    cfg.smoother = {SmootherKind::median, 5};
    nlohmann::json j = pipeline_to_json(cfg);
    PipelineConfig back = pipeline_from_json(j);
    EXPECT_EQ(pipeline_to_json(back).dump(2), j.dump(2));

    TimeSeries ts(spiky_series());
    EXPECT_EQ(run_pipeline(cfg, ts).anomalous_indices,
              run_pipeline(back, ts).anomalous_indices);
}

TEST(PipelineJson, OnlyRelevantKnobsAreSerialized) {
    PipelineConfig cfg = full_config();
    nlohmann::json j = pipeline_to_json(cfg);
    for (const auto& d : j.at("detectors")) {
        std::string kind = d.at("kind").get<std::string>();
        EXPECT_EQ(d.contains("window"), kind == "local_steep") << kind;
        EXPECT_EQ(d.contains("period"), kind == "dynamic_threshold") << kind;
    }
}

TEST(PipelineJson, UnknownSmootherKindRejected) {
    nlohmann::json j = pipeline_to_json(full_config());
    j["smoother"]["kind"] = "boxcar";
    EXPECT_THROW(pipeline_from_json(j), std::runtime_error);
}

}  // namespace
