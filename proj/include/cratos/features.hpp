#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cratos/preprocess.hpp"
#include "cratos/stats.hpp"
#include "cratos/time_series.hpp"

namespace cratos {

struct WindowSpec {
    int size = 90;
    int stride = 30;
};

inline void validate(const WindowSpec& w) {
    if (w.size < 2) throw std::invalid_argument("window size must be at least 2");
    if (w.stride < 1) throw std::invalid_argument("window stride must be positive");
}

// Number of full windows over n points; zero when n < size.
inline std::size_t window_count(std::size_t n, const WindowSpec& w) {
    if (n < static_cast<std::size_t>(w.size)) return 0;
    return (n - static_cast<std::size_t>(w.size)) / static_cast<std::size_t>(w.stride) + 1;
}

enum class FeatureKind { section_sign, swing, diff_thres };

struct FeatureVector {
    FeatureKind kind = FeatureKind::section_sign;
    std::vector<double> values;
};

namespace detail {

inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Center value of a window: the middle element for odd sizes, the mean of the
// two middle elements for even sizes. This is positional, not a sorted median.
inline double window_center(std::span<const double> w) {
    std::size_t m = w.size();
    if (m % 2 == 1) return w[m / 2];
    return 0.5 * (w[m / 2 - 1] + w[m / 2]);
}

}  // namespace detail

// For each window: subtract the center value, then emit the mean sign of the
// left half and of the right half. Captures cyclic rise/fall structure; a
// vertical shift of the series leaves the output unchanged.
inline FeatureVector section_sign(const TimeSeries& ts, const WindowSpec& w = {90, 30}) {
    validate(w);
    const std::vector<double> v = clip_impulses_values(ts.values());
    const std::size_t n = v.size();
    if (n < static_cast<std::size_t>(w.size))
        throw std::invalid_argument("section_sign: series length " + std::to_string(n) +
                                    " is below window size " + std::to_string(w.size));
    const std::size_t h = window_count(n, w);
    const std::size_t m = static_cast<std::size_t>(w.size);
    const std::size_t half = m / 2;

    FeatureVector out{FeatureKind::section_sign, {}};
    out.values.reserve(2 * h);
    for (std::size_t j = 0; j < h; ++j) {
        std::span<const double> win(v.data() + j * static_cast<std::size_t>(w.stride), m);
        double med = detail::window_center(win);
        double left = 0.0, right = 0.0;
        for (std::size_t i = 0; i < half; ++i) left += detail::sign_of(win[i] - med);
        for (std::size_t i = m - half; i < m; ++i) right += detail::sign_of(win[i] - med);
        out.values.push_back(left / static_cast<double>(half));
        out.values.push_back(right / static_cast<double>(half));
    }
    return out;
}

// Inter-percentile width (p80 - p20) of the first differences per window,
// computed on the clipped and normalized series. Gauges fluctuation breadth
// relative to the series' own range.
inline FeatureVector swing(const TimeSeries& ts, const WindowSpec& w = {90, 30}) {
    validate(w);
    if (ts.length() < static_cast<std::size_t>(w.size) + 1)
        throw std::invalid_argument("swing: series length " + std::to_string(ts.length()) +
                                    " is below window size + 1 = " + std::to_string(w.size + 1));
    std::vector<double> d =
        first_diff_values(minmax_normalize_values(clip_impulses_values(ts.values())), false);
    const std::size_t h = window_count(d.size(), w);
    const std::size_t m = static_cast<std::size_t>(w.size);

    FeatureVector out{FeatureKind::swing, {}};
    out.values.reserve(h);
    std::vector<double> sorted;
    for (std::size_t j = 0; j < h; ++j) {
        sorted.assign(d.begin() + static_cast<std::ptrdiff_t>(j * w.stride),
                      d.begin() + static_cast<std::ptrdiff_t>(j * w.stride + m));
        std::sort(sorted.begin(), sorted.end());
        out.values.push_back(percentile_sorted(sorted, 80.0) - percentile_sorted(sorted, 20.0));
    }
    return out;
}

enum class CrossingRule {
    stride2,  // disjoint pairs (0,1), (2,3), ...
    every_k,  // all adjacent pairs (0,1), (1,2), ...
};

// Counts pairs whose two values strictly straddle the threshold.
inline int count_threshold_crossings(std::span<const double> window, double threshold,
                                     CrossingRule rule) {
    int count = 0;
    const std::size_t step = rule == CrossingRule::stride2 ? 2 : 1;
    for (std::size_t k = 1; k < window.size(); k += step) {
        double a = window[k - 1], b = window[k];
        if ((a < threshold && threshold < b) || (b < threshold && threshold < a)) ++count;
    }
    return count;
}

// Raw threshold-crossing counts of |first difference| per window, one block
// per divisor (threshold = window max / divisor), blocks concatenated.
inline std::vector<double> diff_thres_counts(const TimeSeries& ts, const WindowSpec& w = {180, 30},
                                             std::span<const int> divisors = {},
                                             CrossingRule rule = CrossingRule::stride2) {
    validate(w);
    static constexpr int kDefaultDivisors[] = {2, 3, 4};
    if (divisors.empty()) divisors = kDefaultDivisors;
    for (int d : divisors)
        if (d < 1) throw std::invalid_argument("diff_thres: divisors must be positive");
    if (ts.length() < static_cast<std::size_t>(w.size) + 1)
        throw std::invalid_argument("diff_thres: series length " + std::to_string(ts.length()) +
                                    " is below window size + 1 = " + std::to_string(w.size + 1));
    std::vector<double> d = first_diff_values(ts.values(), true);
    const std::size_t h = window_count(d.size(), w);
    const std::size_t m = static_cast<std::size_t>(w.size);

    std::vector<double> counts;
    counts.reserve(divisors.size() * h);
    for (int div : divisors) {
        for (std::size_t j = 0; j < h; ++j) {
            std::span<const double> win(d.data() + j * static_cast<std::size_t>(w.stride), m);
            double thr = *std::max_element(win.begin(), win.end()) / static_cast<double>(div);
            counts.push_back(count_threshold_crossings(win, thr, rule));
        }
    }
    return counts;
}

// Crossing counts min-max normalized to [0,1] across the whole vector.
// Counts depend only on value ratios, so rescaling the series leaves the raw
// counts unchanged.
inline FeatureVector diff_thres(const TimeSeries& ts, const WindowSpec& w = {180, 30},
                                std::span<const int> divisors = {},
                                CrossingRule rule = CrossingRule::stride2) {
    FeatureVector out{FeatureKind::diff_thres, diff_thres_counts(ts, w, divisors, rule)};
    out.values = minmax_normalize_values(out.values);
    return out;
}

}  // namespace cratos
