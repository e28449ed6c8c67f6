#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cratos/stats.hpp"
#include "cratos/time_series.hpp"

namespace cratos {

enum class SmootherKind { mean, median };

struct SmootherSpec {
    SmootherKind kind = SmootherKind::mean;
    int window = 1;  // odd, >= 1; window 1 is the identity
};

inline std::vector<double> clip_impulses_values(const std::vector<double>& v) {
    std::vector<double> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    double p99 = percentile_sorted(sorted, 99.0);
    double p1 = percentile_sorted(sorted, 1.0);
    // The 1% margins widen the band only when the percentile is positive
    // (resp. negative); the max/min keep the band valid for any sign.
    double upper = std::max(1.01 * p99, p99);
    double lower = std::min(0.99 * p1, p1);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i], lower, upper);
    return out;
}

// Clamps extreme points into [0.99 * p1, 1.01 * p99]. Idempotent.
inline TimeSeries clip_impulses(const TimeSeries& ts) {
    return TimeSeries(clip_impulses_values(ts.values()));
}

inline std::vector<double> minmax_normalize_values(const std::vector<double>& v) {
    auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(v.size());
    if (hi == lo) return out;  // constant input maps to all zeros
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) / (hi - lo);
    return out;
}

inline TimeSeries minmax_normalize(const TimeSeries& ts) {
    return TimeSeries(minmax_normalize_values(ts.values()));
}

inline std::vector<double> smooth_values(const std::vector<double>& v, const SmootherSpec& spec) {
    if (spec.window < 1 || spec.window % 2 == 0)
        throw std::invalid_argument("smooth: window must be odd and positive, got " +
                                    std::to_string(spec.window));
    const std::size_t n = v.size();
    if (static_cast<std::size_t>(spec.window) > n)
        throw std::invalid_argument("smooth: window " + std::to_string(spec.window) +
                                    " exceeds series length " + std::to_string(n));
    if (spec.window == 1) return v;

    const std::size_t half = static_cast<std::size_t>(spec.window) / 2;
    std::vector<double> out(n);
    std::vector<double> scratch;
    for (std::size_t i = 0; i < n; ++i) {
        // Centered window, truncated at the edges rather than padded.
        std::size_t a = i >= half ? i - half : 0;
        std::size_t b = std::min(n, i + half + 1);
        if (spec.kind == SmootherKind::mean) {
            double s = 0.0;
            for (std::size_t j = a; j < b; ++j) s += v[j];
            out[i] = s / static_cast<double>(b - a);
        } else {
            scratch.assign(v.begin() + static_cast<std::ptrdiff_t>(a),
                           v.begin() + static_cast<std::ptrdiff_t>(b));
            auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(scratch.size() / 2);
            std::nth_element(scratch.begin(), mid, scratch.end());
            if (scratch.size() % 2 == 1) {
                out[i] = *mid;
            } else {
                double hi = *mid;
                double lo = *std::max_element(scratch.begin(), mid);
                out[i] = 0.5 * (lo + hi);
            }
        }
    }
    return out;
}

inline TimeSeries smooth(const TimeSeries& ts, const SmootherSpec& spec) {
    return TimeSeries(smooth_values(ts.values(), spec));
}

inline std::vector<double> first_diff_values(const std::vector<double>& v, bool absolute) {
    if (v.size() < 2) throw std::invalid_argument("first_diff: need at least 2 points");
    std::vector<double> out(v.size() - 1);
    for (std::size_t i = 1; i < v.size(); ++i) {
        double d = v[i] - v[i - 1];
        out[i - 1] = absolute ? std::abs(d) : d;
    }
    return out;
}

inline TimeSeries first_diff(const TimeSeries& ts, bool absolute = false) {
    return TimeSeries(first_diff_values(ts.values(), absolute));
}

}  // namespace cratos
