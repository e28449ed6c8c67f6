#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace cratos {

inline double mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Population variance (divides by n, not n-1).
inline double variance(std::span<const double> v) {
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

inline double stddev(std::span<const double> v) { return std::sqrt(variance(v)); }

// Percentile by linear interpolation between order statistics on an already
// sorted array: rank = p/100 * (n-1), interpolate between floor and ceil.
inline double percentile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("percentile: empty input");
    if (p < 0.0 || p > 100.0) throw std::invalid_argument("percentile: p outside [0,100]");
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double rank = (p / 100.0) * static_cast<double>(n - 1);
    auto lo = static_cast<std::size_t>(rank);
    if (lo + 1 >= n) return sorted[n - 1];
    double frac = rank - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double percentile(std::span<const double> v, double p) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return percentile_sorted(s, p);
}

inline double median(std::span<const double> v) { return percentile(v, 50.0); }

// Median absolute deviation, unscaled.
inline double mad(std::span<const double> v) {
    double med = median(v);
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = std::abs(v[i] - med);
    return median(dev);
}

}  // namespace cratos
