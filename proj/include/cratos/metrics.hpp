#pragma once

#include <array>
#include <cstddef>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "cratos/time_series.hpp"

namespace cratos {

struct PrfMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline PrfMetrics prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    PrfMetrics m;
    m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

inline constexpr std::array<const char*, 3> kLevelNames{"section_sign", "swing", "diff_thres"};

// Per-level, per-state precision/recall/F1 over code sequences, plus the full
// 8x8 leaf confusion (rows = truth, columns = predicted).
struct ClusteringReport {
    // metrics[level][state]: state 0 treats T as positive, state 1 treats F.
    std::array<std::array<PrfMetrics, 2>, 3> metrics{};
    std::array<std::array<std::size_t, 8>, 8> confusion{};
    std::size_t total = 0;
};

inline ClusteringReport clustering_report(std::span<const ClusterCode> predicted,
                                          std::span<const ClusterCode> truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("clustering_report: " + std::to_string(predicted.size()) +
                                    " predictions vs " + std::to_string(truth.size()) +
                                    " truth codes");
    ClusteringReport report;
    report.total = truth.size();

    auto level_bit = [](const ClusterCode& c, int level) {
        return level == 0 ? c.periodic : level == 1 ? c.large_amplitude : c.dense_impulses;
    };
    for (int level = 0; level < 3; ++level) {
        for (int state = 0; state < 2; ++state) {
            const bool positive = state == 0;
            std::size_t tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < truth.size(); ++i) {
                bool p = level_bit(predicted[i], level) == positive;
                bool t = level_bit(truth[i], level) == positive;
                if (p && t) ++tp;
                else if (p && !t) ++fp;
                else if (!p && t) ++fn;
            }
            report.metrics[static_cast<std::size_t>(level)][static_cast<std::size_t>(state)] =
                prf_from_counts(tp, fp, fn);
        }
    }
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++report.confusion[static_cast<std::size_t>(truth[i].index())]
                          [static_cast<std::size_t>(predicted[i].index())];
    return report;
}

inline double pass_rate(int pass_count, int total) {
    if (total < 1) throw std::invalid_argument("pass_rate: total must be at least 1");
    if (pass_count < 0 || pass_count > total)
        throw std::invalid_argument("pass_rate: pass count " + std::to_string(pass_count) +
                                    " outside [0, " + std::to_string(total) + "]");
    return static_cast<double>(pass_count) / static_cast<double>(total);
}

inline nlohmann::json report_to_json(const ClusteringReport& report) {
    nlohmann::json j;
    j["total"] = report.total;
    for (int level = 0; level < 3; ++level) {
        for (int state = 0; state < 2; ++state) {
            const auto& m =
                report.metrics[static_cast<std::size_t>(level)][static_cast<std::size_t>(state)];
            nlohmann::json mj;
            mj["precision"] = m.precision;
            mj["recall"] = m.recall;
            mj["f1"] = m.f1;
            j["levels"][kLevelNames[static_cast<std::size_t>(level)]][state == 0 ? "T" : "F"] = mj;
        }
    }
    for (int t = 0; t < 8; ++t) {
        nlohmann::json row = nlohmann::json::array();
        for (int p = 0; p < 8; ++p)
            row.push_back(report.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)]);
        j["confusion"][ClusterCode::from_index(t).to_string()] = row;
    }
    return j;
}

// Aligned text table, one row per level/state.
inline std::string report_table(const ClusteringReport& report) {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-14s %-5s %9s %9s %9s\n", "level", "state", "precision",
                  "recall", "f1");
    out += line;
    for (int level = 0; level < 3; ++level) {
        for (int state = 0; state < 2; ++state) {
            const auto& m =
                report.metrics[static_cast<std::size_t>(level)][static_cast<std::size_t>(state)];
            std::snprintf(line, sizeof line, "%-14s %-5s %9.4f %9.4f %9.4f\n",
                          kLevelNames[static_cast<std::size_t>(level)], state == 0 ? "T" : "F",
                          m.precision, m.recall, m.f1);
            out += line;
        }
    }
    return out;
}

}  // namespace cratos
