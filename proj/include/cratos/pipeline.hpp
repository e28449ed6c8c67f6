#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cratos/detectors.hpp"
#include "cratos/preprocess.hpp"
#include "cratos/time_series.hpp"

namespace cratos {

// A full detection recipe: optional normalization, one smoother, then an
// ordered set of detectors whose flags are unioned.
struct PipelineConfig {
    bool normalize = false;
    SmootherSpec smoother;
    std::vector<DetectorKind> detectors;
    std::map<DetectorKind, DetectorParams> params;
};

struct DetectionResult {
    std::vector<std::size_t> anomalous_indices;  // sorted union
    std::map<DetectorKind, std::vector<std::size_t>> per_detector;
};

// Largest smoother window the genome encoding can express.
inline constexpr int kMaxSmootherWindow = 15;

inline void validate(const PipelineConfig& cfg, std::size_t length) {
    if (cfg.detectors.empty()) throw std::invalid_argument("pipeline: no detectors selected");
    for (std::size_t i = 0; i < cfg.detectors.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.detectors.size(); ++j)
            if (cfg.detectors[i] == cfg.detectors[j])
                throw std::invalid_argument("pipeline: detector \"" +
                                            std::string(to_string(cfg.detectors[i])) +
                                            "\" listed twice");
    if (cfg.smoother.window < 1 || cfg.smoother.window % 2 == 0 ||
        cfg.smoother.window > kMaxSmootherWindow)
        throw std::invalid_argument("pipeline: smoother window must be odd and within [1, " +
                                    std::to_string(kMaxSmootherWindow) + "]");
    if (static_cast<std::size_t>(cfg.smoother.window) > length)
        throw std::invalid_argument("pipeline: smoother window " +
                                    std::to_string(cfg.smoother.window) +
                                    " exceeds series length " + std::to_string(length));
    for (DetectorKind k : cfg.detectors) {
        auto it = cfg.params.find(k);
        if (it == cfg.params.end())
            throw std::invalid_argument("pipeline: missing parameters for \"" +
                                        std::string(to_string(k)) + "\"");
        validate(it->second);
        // Only local_steep reads its window; the others carry the field
        // untouched, so length checks would reject configs over a dead knob.
        if (k == DetectorKind::local_steep &&
            static_cast<std::size_t>(it->second.window) > length)
            throw std::invalid_argument("pipeline: " + std::string(to_string(k)) + " window " +
                                        std::to_string(it->second.window) +
                                        " exceeds series length " + std::to_string(length));
        if (k == DetectorKind::dynamic_threshold &&
            2 * static_cast<std::size_t>(it->second.period) > length)
            throw std::invalid_argument(
                "pipeline: dynamic_threshold period " + std::to_string(it->second.period) +
                " needs at least two cycles but series length is " + std::to_string(length));
    }
}

inline DetectionResult run_pipeline(const PipelineConfig& cfg, const TimeSeries& ts) {
    validate(cfg, ts.length());
    std::vector<double> x = ts.values();
    if (cfg.normalize) x = minmax_normalize_values(x);
    x = smooth_values(x, cfg.smoother);

    DetectionResult result;
    for (DetectorKind k : cfg.detectors) {
        auto flags = run_detector(k, x, cfg.params.at(k));
        result.anomalous_indices.insert(result.anomalous_indices.end(), flags.begin(),
                                        flags.end());
        result.per_detector[k] = std::move(flags);
    }
    std::sort(result.anomalous_indices.begin(), result.anomalous_indices.end());
    result.anomalous_indices.erase(
        std::unique(result.anomalous_indices.begin(), result.anomalous_indices.end()),
        result.anomalous_indices.end());
    return result;
}

// --- JSON serialization -----------------------------------------------------

inline nlohmann::json pipeline_to_json(const PipelineConfig& cfg) {
    nlohmann::json j;
    j["normalize"] = cfg.normalize;
    j["smoother"] = {{"kind", cfg.smoother.kind == SmootherKind::mean ? "mean" : "median"},
                     {"window", cfg.smoother.window}};
    j["detectors"] = nlohmann::json::array();
    for (DetectorKind k : cfg.detectors) {
        const DetectorParams& p = cfg.params.at(k);
        nlohmann::json d;
        d["kind"] = std::string(to_string(k));
        d["sensitivity"] = p.sensitivity;
        if (k == DetectorKind::local_steep) d["window"] = p.window;
        if (k == DetectorKind::dynamic_threshold) d["period"] = p.period;
        j["detectors"].push_back(d);
    }
    return j;
}

inline PipelineConfig pipeline_from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    cfg.normalize = j.at("normalize").get<bool>();
    std::string sk = j.at("smoother").at("kind").get<std::string>();
    if (sk == "mean") cfg.smoother.kind = SmootherKind::mean;
    else if (sk == "median") cfg.smoother.kind = SmootherKind::median;
    else throw std::runtime_error("pipeline: unknown smoother \"" + sk + "\"");
    cfg.smoother.window = j.at("smoother").at("window").get<int>();
    for (const auto& d : j.at("detectors")) {
        DetectorKind k = detector_from_string(d.at("kind").get<std::string>());
        DetectorParams p;
        p.sensitivity = d.at("sensitivity").get<double>();
        if (d.contains("window")) p.window = d.at("window").get<int>();
        if (d.contains("period")) p.period = d.at("period").get<int>();
        cfg.detectors.push_back(k);
        cfg.params[k] = p;
    }
    return cfg;
}

}  // namespace cratos
