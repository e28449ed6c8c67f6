#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cratos/features.hpp"
#include "cratos/kmeans.hpp"
#include "cratos/rng.hpp"
#include "cratos/stats.hpp"
#include "cratos/time_series.hpp"

namespace cratos {

// One binary split. A branch with fewer than 2 members is not split further;
// it degenerates to a pass-through node that routes everything to child 0.
struct TreeNode {
    bool passthrough = true;
    KMeansModel model;
    int t_branch = 1;  // child index whose members read as T at this level
};

struct TreeOptions {
    WindowSpec section_window{90, 30};
    WindowSpec swing_window{90, 30};
    WindowSpec diff_window{180, 30};
    std::vector<int> divisors{2, 3, 4};
    CrossingRule rule = CrossingRule::stride2;
};

// Three-level binary hierarchy over the three behaviour features. Level 1
// splits on cyclic structure, level 2 on fluctuation breadth, level 3 on
// impulse density; the leaf path spells the ClusterCode.
struct ClusterTree {
    std::size_t training_length = 0;
    TreeOptions options;
    TreeNode level1;
    std::array<TreeNode, 2> level2;
    std::array<std::array<TreeNode, 2>, 2> level3;
};

namespace detail {

struct SeriesFeatures {
    std::vector<double> section;
    std::vector<double> swing_v;
    std::vector<double> diff_norm;
    std::vector<double> diff_raw;
};

inline SeriesFeatures compute_features(const TimeSeries& ts, const TreeOptions& opt) {
    SeriesFeatures f;
    f.section = section_sign(ts, opt.section_window).values;
    f.swing_v = swing(ts, opt.swing_window).values;
    f.diff_raw = diff_thres_counts(ts, opt.diff_window, opt.divisors, opt.rule);
    f.diff_norm = minmax_normalize_values(f.diff_raw);
    return f;
}

inline int descend(const TreeNode& node, std::span<const double> feature) {
    if (node.passthrough) return 0;
    return kmeans_predict(node.model, feature);
}

struct NodeFit {
    TreeNode node;
    std::array<std::vector<std::size_t>, 2> children;
};

// Split `members` in two with k-means; label the higher-scoring branch T.
// Degenerate branches (under 2 members, or a split that leaves one side
// empty) read as F.
inline NodeFit fit_node(const std::vector<std::size_t>& members,
                        const std::vector<std::vector<double>>& features,
                        const std::vector<double>& scores, std::uint64_t seed) {
    NodeFit out;
    if (members.size() < 2) {
        out.node.passthrough = true;
        out.node.t_branch = 1;
        out.children[0] = members;
        return out;
    }
    std::vector<std::vector<double>> pts;
    pts.reserve(members.size());
    for (std::size_t i : members) pts.push_back(features[i]);
    KMeansFit fit = kmeans_fit(pts, seed);
    out.node.passthrough = false;
    out.node.model = std::move(fit.model);
    for (std::size_t k = 0; k < members.size(); ++k)
        out.children[static_cast<std::size_t>(fit.assignment[k])].push_back(members[k]);
    if (out.children[0].empty() || out.children[1].empty()) {
        out.node.t_branch = out.children[0].empty() ? 0 : 1;
        return out;
    }
    std::array<double, 2> branch_score{};
    for (int b = 0; b < 2; ++b) {
        double s = 0.0;
        for (std::size_t i : out.children[static_cast<std::size_t>(b)]) s += scores[i];
        branch_score[static_cast<std::size_t>(b)] =
            s / static_cast<double>(out.children[static_cast<std::size_t>(b)].size());
    }
    out.node.t_branch = branch_score[1] >= branch_score[0] ? 1 : 0;
    return out;
}

}  // namespace detail

struct HierarchicalFit {
    ClusterTree tree;
    std::vector<ClusterCode> assignments;  // one per dataset entry, in order
};

inline HierarchicalFit hierarchical_fit(const LabeledDataset& data, std::uint64_t seed,
                                        const TreeOptions& opt = {}) {
    if (data.size() < 2) throw std::invalid_argument("hierarchical_fit: need at least 2 series");

    const std::size_t n = data.size();
    std::vector<detail::SeriesFeatures> feats(n);
    for (std::size_t i = 0; i < n; ++i)
        feats[i] = detail::compute_features(data.entries()[i].series, opt);

    std::vector<std::vector<double>> f1(n), f2(n), f3(n);
    std::vector<double> s1(n), s2(n), s3(n);
    for (std::size_t i = 0; i < n; ++i) {
        f1[i] = feats[i].section;
        f2[i] = feats[i].swing_v;
        f3[i] = feats[i].diff_norm;
        double a = 0.0;
        for (double v : feats[i].section) a += std::abs(v);
        s1[i] = a / static_cast<double>(feats[i].section.size());
        s2[i] = mean(feats[i].swing_v);
        s3[i] = mean(feats[i].diff_raw);
    }

    HierarchicalFit result;
    result.tree.training_length = data.common_length();
    result.tree.options = opt;

    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;

    auto root = detail::fit_node(all, f1, s1, mix_seed(seed, 1));
    result.tree.level1 = root.node;

    std::vector<int> b1(n), b2(n), b3(n);
    for (int a = 0; a < 2; ++a)
        for (std::size_t i : root.children[static_cast<std::size_t>(a)]) b1[i] = a;

    for (int a = 0; a < 2; ++a) {
        auto mid = detail::fit_node(root.children[static_cast<std::size_t>(a)], f2, s2,
                                    mix_seed(seed, 2, static_cast<std::uint64_t>(a)));
        result.tree.level2[static_cast<std::size_t>(a)] = mid.node;
        for (int b = 0; b < 2; ++b)
            for (std::size_t i : mid.children[static_cast<std::size_t>(b)]) b2[i] = b;

        for (int b = 0; b < 2; ++b) {
            auto leaf = detail::fit_node(
                mid.children[static_cast<std::size_t>(b)], f3, s3,
                mix_seed(seed, 3, static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)));
            result.tree.level3[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                leaf.node;
            for (int c = 0; c < 2; ++c)
                for (std::size_t i : leaf.children[static_cast<std::size_t>(c)]) b3[i] = c;
        }
    }

    result.assignments.reserve(n);
    const ClusterTree& t = result.tree;
    for (std::size_t i = 0; i < n; ++i) {
        result.assignments.push_back(ClusterCode{
            b1[i] == t.level1.t_branch,
            b2[i] == t.level2[static_cast<std::size_t>(b1[i])].t_branch,
            b3[i] == t.level3[static_cast<std::size_t>(b1[i])][static_cast<std::size_t>(b2[i])]
                         .t_branch});
    }
    return result;
}

inline ClusterCode hierarchical_predict(const ClusterTree& tree, const TimeSeries& ts) {
    if (ts.length() != tree.training_length)
        throw std::runtime_error("hierarchical_predict: series length " +
                                 std::to_string(ts.length()) + " does not match training length " +
                                 std::to_string(tree.training_length));
    auto f = detail::compute_features(ts, tree.options);
    int b1 = detail::descend(tree.level1, f.section);
    int b2 = detail::descend(tree.level2[static_cast<std::size_t>(b1)], f.swing_v);
    int b3 = detail::descend(
        tree.level3[static_cast<std::size_t>(b1)][static_cast<std::size_t>(b2)], f.diff_norm);
    return ClusterCode{
        b1 == tree.level1.t_branch,
        b2 == tree.level2[static_cast<std::size_t>(b1)].t_branch,
        b3 == tree.level3[static_cast<std::size_t>(b1)][static_cast<std::size_t>(b2)].t_branch};
}

// --- JSON serialization -----------------------------------------------------

namespace detail {

inline nlohmann::json node_to_json(const TreeNode& node) {
    nlohmann::json j;
    j["passthrough"] = node.passthrough;
    j["t_branch"] = node.t_branch;
    if (!node.passthrough) {
        j["centroids"] = {node.model.centroids[0], node.model.centroids[1]};
        j["inertia"] = node.model.inertia;
    }
    return j;
}

inline TreeNode node_from_json(const nlohmann::json& j) {
    TreeNode node;
    node.passthrough = j.at("passthrough").get<bool>();
    node.t_branch = j.at("t_branch").get<int>();
    if (node.t_branch != 0 && node.t_branch != 1)
        throw std::runtime_error("cluster tree: t_branch must be 0 or 1");
    if (!node.passthrough) {
        auto cents = j.at("centroids");
        if (cents.size() != 2) throw std::runtime_error("cluster tree: expected 2 centroids");
        node.model.centroids[0] = cents[0].get<std::vector<double>>();
        node.model.centroids[1] = cents[1].get<std::vector<double>>();
        if (node.model.centroids[0].size() != node.model.centroids[1].size())
            throw std::runtime_error("cluster tree: centroid dimensions differ");
        node.model.inertia = j.at("inertia").get<double>();
    }
    return node;
}

}  // namespace detail

inline nlohmann::json tree_to_json(const ClusterTree& tree) {
    nlohmann::json j;
    j["format"] = "cratos-cluster-tree";
    j["version"] = 1;
    j["training_length"] = tree.training_length;
    j["windows"] = {
        {"section_sign", {tree.options.section_window.size, tree.options.section_window.stride}},
        {"swing", {tree.options.swing_window.size, tree.options.swing_window.stride}},
        {"diff_thres", {tree.options.diff_window.size, tree.options.diff_window.stride}}};
    j["divisors"] = tree.options.divisors;
    j["crossing_rule"] = tree.options.rule == CrossingRule::stride2 ? "stride2" : "every_k";
    j["level1"] = detail::node_to_json(tree.level1);
    j["level2"] = {detail::node_to_json(tree.level2[0]), detail::node_to_json(tree.level2[1])};
    j["level3"] = {{detail::node_to_json(tree.level3[0][0]), detail::node_to_json(tree.level3[0][1])},
                   {detail::node_to_json(tree.level3[1][0]), detail::node_to_json(tree.level3[1][1])}};
    return j;
}

inline ClusterTree tree_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != std::string("cratos-cluster-tree"))
        throw std::runtime_error("cluster tree: unrecognized file format");
    ClusterTree tree;
    tree.training_length = j.at("training_length").get<std::size_t>();
    auto win = [&](const char* key) {
        auto w = j.at("windows").at(key);
        return WindowSpec{w.at(0).get<int>(), w.at(1).get<int>()};
    };
    tree.options.section_window = win("section_sign");
    tree.options.swing_window = win("swing");
    tree.options.diff_window = win("diff_thres");
    tree.options.divisors = j.at("divisors").get<std::vector<int>>();
    std::string rule = j.at("crossing_rule").get<std::string>();
    if (rule == "stride2") tree.options.rule = CrossingRule::stride2;
    else if (rule == "every_k") tree.options.rule = CrossingRule::every_k;
    else throw std::runtime_error("cluster tree: unknown crossing rule \"" + rule + "\"");
    tree.level1 = detail::node_from_json(j.at("level1"));
    for (int a = 0; a < 2; ++a) {
        tree.level2[static_cast<std::size_t>(a)] = detail::node_from_json(j.at("level2").at(a));
        for (int b = 0; b < 2; ++b)
            tree.level3[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                detail::node_from_json(j.at("level3").at(a).at(b));
    }
    return tree;
}

inline void save_tree(const ClusterTree& tree, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open \"" + path.string() + "\" for writing");
    out << tree_to_json(tree).dump(2) << '\n';
}

inline ClusterTree load_tree(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open \"" + path.string() + "\"");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("cannot parse \"" + path.string() + "\": " + e.what());
    }
    return tree_from_json(j);
}

}  // namespace cratos
