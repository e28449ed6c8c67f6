#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "cratos/cluster_tree.hpp"
#include "cratos/datagen.hpp"

namespace {

using namespace cratos;
namespace fs = std::filesystem;

LabeledDataset small_corpus(int per_cluster, std::size_t length, std::uint64_t seed) {
    return generate_dataset(per_cluster, length, seed);
}

TEST(ClusterTree, AssignmentsMatchPredictOnTrainingData) {
    auto data = small_corpus(4, 1440, 21);
    auto fit = hierarchical_fit(data, 5);
    ASSERT_EQ(fit.assignments.size(), data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        EXPECT_EQ(hierarchical_predict(fit.tree, data.entries()[i].series).to_string(),
                  fit.assignments[i].to_string())
            << "series " << data.entries()[i].name;
}

TEST(ClusterTree, RecoversGeneratorCodesOnEasyData) {
    auto data = small_corpus(8, 1440, 33);
    auto fit = hierarchical_fit(data, 9);
    int agree = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (fit.assignments[i].to_string() == data.entries()[i].truth_code->to_string()) ++agree;
    // The generator's archetypes are designed to be separable; allow a couple
    // of stragglers on this small cohort.
    EXPECT_GE(agree, static_cast<int>(data.size()) - 4);
}

TEST(ClusterTree, TinyDatasetFallsBackToPassthrough) {
    // Two series only: level 1 splits them 1/1 (or 2/0), so every deeper node
    // sees at most one member and must become a passthrough that reads F.
    std::vector<DatasetEntry> entries;
    auto specs = default_archetypes(720);
    for (int i = 0; i < 2; ++i) {
        ClusterCode code{i == 1, false, false};
        Rng rng(mix_seed(77, static_cast<std::uint64_t>(i)));
        auto [series, c] = synthesize(specs[static_cast<std::size_t>(code.index())], rng);
        entries.push_back({"s" + std::to_string(i), std::move(series), std::nullopt, c});
    }
    LabeledDataset data(std::move(entries));
    auto fit = hierarchical_fit(data, 3);
    for (const auto& code : fit.assignments) {
        EXPECT_FALSE(code.large_amplitude);
        EXPECT_FALSE(code.dense_impulses);
    }
}

TEST(ClusterTree, PredictRejectsWrongLength) {
    auto data = small_corpus(2, 720, 41);
    auto fit = hierarchical_fit(data, 1);
    TimeSeries other(std::vector<double>(719, 1.0));
    EXPECT_THROW(hierarchical_predict(fit.tree, other), std::runtime_error);
}

TEST(ClusterTree, FitIsDeterministicPerSeed) {
    auto data = small_corpus(3, 720, 43);
    auto a = hierarchical_fit(data, 17);
    auto b = hierarchical_fit(data, 17);
    EXPECT_EQ(tree_to_json(a.tree).dump(), tree_to_json(b.tree).dump());
    for (std::size_t i = 0; i < data.size(); ++i)
        EXPECT_EQ(a.assignments[i].to_string(), b.assignments[i].to_string());
}

TEST(ClusterTree, JsonRoundTripPreservesPredictions) {
    auto data = small_corpus(3, 720, 47);
    auto fit = hierarchical_fit(data, 29);
    fs::path path = fs::temp_directory_path() / "cratos_tree_roundtrip.json";
    save_tree(fit.tree, path);
    ClusterTree loaded = load_tree(path);
    EXPECT_EQ(tree_to_json(fit.tree).dump(), tree_to_json(loaded).dump());
    for (const auto& e : data.entries())
        EXPECT_EQ(hierarchical_predict(fit.tree, e.series).to_string(),
                  hierarchical_predict(loaded, e.series).to_string());
    fs::remove(path);
}

TEST(ClusterTree, LoadRejectsWrongFormatTag) {
    fs::path path = fs::temp_directory_path() / "cratos_tree_badtag.json";
    std::ofstream(path) << "{\"format\":\"something-else\",\"version\":1}";
    EXPECT_THROW(load_tree(path), std::runtime_error);
    fs::remove(path);
}

TEST(ClusterCode, IndexAndStringRoundTrip) {
    for (int i = 0; i < 8; ++i) {
        ClusterCode c = ClusterCode::from_index(i);
        EXPECT_EQ(c.index(), i);
        EXPECT_EQ(ClusterCode::from_string(c.to_string()).index(), i);
    }
    ClusterCode tft{true, false, true};
    EXPECT_EQ(ClusterCode::from_string("TFT").index(), tft.index());
    EXPECT_THROW(ClusterCode::from_string("TF"), std::invalid_argument);
    EXPECT_THROW(ClusterCode::from_string("TFX"), std::invalid_argument);
}

}  // namespace
