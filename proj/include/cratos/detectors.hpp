#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cratos/stats.hpp"

namespace cratos {

enum class DetectorKind { global_threshold, dynamic_threshold, local_steep, global_steep };

constexpr std::array<DetectorKind, 4> all_detectors() {
    return {DetectorKind::global_threshold, DetectorKind::dynamic_threshold,
            DetectorKind::local_steep, DetectorKind::global_steep};
}

inline std::string_view to_string(DetectorKind k) {
    switch (k) {
        case DetectorKind::global_threshold: return "global_threshold";
        case DetectorKind::dynamic_threshold: return "dynamic_threshold";
        case DetectorKind::local_steep: return "local_steep";
        case DetectorKind::global_steep: return "global_steep";
    }
    throw std::invalid_argument("unknown detector kind");
}

inline DetectorKind detector_from_string(std::string_view s) {
    for (DetectorKind k : all_detectors())
        if (s == to_string(k)) return k;
    throw std::invalid_argument("unknown detector \"" + std::string(s) + "\"");
}

struct DetectorParams {
    double sensitivity = 3.0;  // threshold multiplier; larger flags less
    int window = 60;           // trailing history length for local_steep
    int period = 1440;         // seasonal lag for dynamic_threshold
};

inline constexpr double kMinSensitivity = 0.5;
inline constexpr double kMaxSensitivity = 10.0;
inline constexpr int kMinDetectorWindow = 3;
inline constexpr int kMaxDetectorWindow = 360;

inline void validate(const DetectorParams& p) {
    if (p.sensitivity < kMinSensitivity || p.sensitivity > kMaxSensitivity)
        throw std::invalid_argument("sensitivity must lie in [0.5, 10], got " +
                                    std::to_string(p.sensitivity));
    if (p.window < kMinDetectorWindow || p.window > kMaxDetectorWindow)
        throw std::invalid_argument("detector window must lie in [3, 360], got " +
                                    std::to_string(p.window));
    if (p.period < 2) throw std::invalid_argument("period must be at least 2");
}

namespace detail {
inline constexpr double kScaleFloor = 1e-9;
}

// Flags points farther than sensitivity * stddev from the global mean.
inline std::vector<std::size_t> detect_global_threshold(std::span<const double> x,
                                                        const DetectorParams& p) {
    double m = mean(x);
    double limit = p.sensitivity * stddev(x);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - m) > limit) out.push_back(i);
    return out;
}

// Compares each point against the same phase of earlier cycles: the robust
// center is the history median, the scale 1.4826 * MAD (floored so that a
// perfectly repeating series never flags). Indices before one full period
// have no history and are never flagged.
inline std::vector<std::size_t> detect_dynamic_threshold(std::span<const double> x,
                                                         const DetectorParams& p) {
    const std::size_t n = x.size();
    const auto period = static_cast<std::size_t>(p.period);
    std::vector<std::vector<double>> history(period);
    for (auto& h : history) h.reserve(n / period + 1);
    std::vector<std::size_t> out;
    std::vector<double> scratch;
    for (std::size_t i = period; i < n; ++i) {
        auto& h = history[i % period];
        h.push_back(x[i - period]);
        scratch = h;
        std::sort(scratch.begin(), scratch.end());
        double med = percentile_sorted(scratch, 50.0);
        for (double& v : scratch) v = std::abs(v - med);
        std::sort(scratch.begin(), scratch.end());
        double scale = 1.4826 * percentile_sorted(scratch, 50.0) + detail::kScaleFloor;
        if (std::abs(x[i] - med) > p.sensitivity * scale) out.push_back(i);
    }
    return out;
}

// Flags a point when its increment is an outlier against the trailing window
// of previous increments. The window is centered on its own mean so steady
// trends stay quiet; the scale is floored so constant history never divides
// the decision by zero.
inline std::vector<std::size_t> detect_local_steep(std::span<const double> x,
                                                   const DetectorParams& p) {
    const std::size_t n = x.size();
    if (n < 2) return {};
    std::vector<double> d(n - 1);
    for (std::size_t i = 1; i < n; ++i) d[i - 1] = x[i] - x[i - 1];

    // Prefix sums over increments keep each window's mean/stddev O(1).
    std::vector<double> s1(d.size() + 1, 0.0), s2(d.size() + 1, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        s1[i + 1] = s1[i] + d[i];
        s2[i + 1] = s2[i] + d[i] * d[i];
    }

    const auto w = static_cast<std::size_t>(p.window);
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < d.size(); ++i) {
        std::size_t a = i > w ? i - w : 0;
        auto cnt = static_cast<double>(i - a);
        double m = (s1[i] - s1[a]) / cnt;
        double var = (s2[i] - s2[a]) / cnt - m * m;
        double sd = std::sqrt(std::max(var, 0.0));
        double scale = std::max(sd, detail::kScaleFloor);
        if (std::abs(d[i] - m) > p.sensitivity * scale) out.push_back(i + 1);
    }
    return out;
}

// Same increment test against whole-series statistics.
inline std::vector<std::size_t> detect_global_steep(std::span<const double> x,
                                                    const DetectorParams& p) {
    const std::size_t n = x.size();
    if (n < 2) return {};
    std::vector<double> d(n - 1);
    for (std::size_t i = 1; i < n; ++i) d[i - 1] = x[i] - x[i - 1];
    double m = mean(d);
    double limit = p.sensitivity * stddev(d);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (std::abs(d[i] - m) > limit) out.push_back(i + 1);
    return out;
}

inline std::vector<std::size_t> run_detector(DetectorKind kind, std::span<const double> x,
                                             const DetectorParams& p) {
    validate(p);
    switch (kind) {
        case DetectorKind::global_threshold: return detect_global_threshold(x, p);
        case DetectorKind::dynamic_threshold: return detect_dynamic_threshold(x, p);
        case DetectorKind::local_steep: return detect_local_steep(x, p);
        case DetectorKind::global_steep: return detect_global_steep(x, p);
    }
    throw std::invalid_argument("unknown detector kind");
}

}  // namespace cratos
