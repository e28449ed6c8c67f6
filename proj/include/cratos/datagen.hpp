#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cratos/preprocess.hpp"
#include "cratos/rng.hpp"
#include "cratos/stats.hpp"
#include "cratos/time_series.hpp"

namespace cratos {

struct NoiseSpec {
    double gaussian_sigma = 0.0;     // stddev as a fraction of baseline amplitude
    double impulse_prob = 0.0;       // per-point probability of a salt/pepper impulse
    double impulse_magnitude = 0.0;  // impulse height as a multiple of amplitude
    // Extensions beyond plain white noise + fixed impulse heights:
    int noise_smooth = 1;            // odd window; > 1 correlates neighbouring noise
    double impulse_spread = 0.0;     // heights vary by up to this fraction of the magnitude
};

enum class BaselineKind { sinusoid, piecewise_flat, random_walk_smoothed };

struct ArchetypeSpec {
    ClusterCode code;
    std::size_t length = 5760;
    BaselineKind baseline = BaselineKind::sinusoid;
    double amplitude = 1.0;
    double period = 1440.0;  // sinusoid period in points
    double phase = 0.0;      // sinusoid phase in cycles
    int levels = 5;          // piecewise_flat segment count
    int level_ramp = 15;     // points of linear transition between levels
    double offset = 0.0;     // vertical placement of the baseline
    NoiseSpec noise;
};

// Reference recipe per behaviour code. The behaviour features ignore absolute
// scale, so amplitude semantics must live in the relative noise level; the
// absolute 10:1 ratio is kept on top for realism.
//
// The impulse settings are deliberately asymmetric. Dense impulses ride inside
// the noise band (a couple of noise sigmas), so every impulse edge straddles a
// max-relative threshold without pushing the window max up; sparse impulses
// tower over everything, so the windows they land in derive their thresholds
// from the impulse and the noise texture below stops registering. Both effects
// pull the per-window crossing counts apart in the same direction.
inline ArchetypeSpec default_archetype(ClusterCode code, std::size_t length = 5760) {
    ArchetypeSpec spec;
    spec.code = code;
    spec.length = length;
    // Non-periodic baselines are smoothed walks rather than stepped levels:
    // a walk always spans the same +-A band, its drift alternates direction
    // every few dozen points (no window-scale monotone stretch reads as a
    // cycle), and its per-step movement stays below the noise scale, so no
    // baseline transition ever mimics an abrupt-event signature.
    spec.baseline = code.periodic ? BaselineKind::sinusoid : BaselineKind::random_walk_smoothed;
    spec.amplitude = code.large_amplitude ? 10.0 : 1.0;
    spec.offset = 2.0 * spec.amplitude;
    spec.noise.gaussian_sigma = code.large_amplitude ? 0.05 : 0.01;
    spec.noise.noise_smooth = 3;
    spec.noise.impulse_prob = code.dense_impulses ? 0.08 : 0.009;
    spec.noise.impulse_magnitude =
        code.dense_impulses ? 1.5 * spec.noise.gaussian_sigma : 4.0;
    spec.noise.impulse_spread = 0.5;
    return spec;
}

// Recovers a smooth baseline from real data: median first (removes impulses),
// then mean (flattens the remaining noise).
inline TimeSeries extract_baseline(const TimeSeries& ts, int mean_window, int median_window) {
    TimeSeries med = smooth(ts, {SmootherKind::median, median_window});
    return smooth(med, {SmootherKind::mean, mean_window});
}

namespace detail {

inline std::vector<double> synth_baseline(const ArchetypeSpec& spec, Rng& rng) {
    const std::size_t n = spec.length;
    std::vector<double> base(n);
    switch (spec.baseline) {
        case BaselineKind::sinusoid: {
            if (spec.period <= 0.0)
                throw std::invalid_argument("synthesize: sinusoid period must be positive");
            for (std::size_t i = 0; i < n; ++i)
                base[i] = spec.offset +
                          spec.amplitude *
                              std::sin(2.0 * std::numbers::pi *
                                       (static_cast<double>(i) / spec.period + spec.phase));
            break;
        }
        case BaselineKind::piecewise_flat: {
            const int segs = std::max(1, spec.levels);
            const double seg_len = static_cast<double>(n) / segs;
            std::vector<std::size_t> starts(static_cast<std::size_t>(segs), 0);
            for (int k = 1; k < segs; ++k) {
                double jitter = std::uniform_real_distribution<double>(-0.15, 0.15)(rng);
                auto pos = static_cast<std::ptrdiff_t>((k + jitter) * seg_len);
                auto lo = static_cast<std::ptrdiff_t>(starts[static_cast<std::size_t>(k - 1)]) + 1;
                starts[static_cast<std::size_t>(k)] = static_cast<std::size_t>(
                    std::clamp(pos, lo, static_cast<std::ptrdiff_t>(n) - 1));
            }
            // Shuffled evenly spaced anchors with jitter: the levels land in a
            // fresh order every time but always span close to the full +-A, so
            // flat and cyclic baselines occupy comparable ranges.
            std::vector<double> heights(static_cast<std::size_t>(segs));
            for (std::size_t k = 0; k < heights.size(); ++k)
                heights[k] = segs == 1
                                 ? 0.0
                                 : -1.0 + 2.0 * static_cast<double>(k) /
                                              static_cast<double>(segs - 1);
            for (std::size_t k = heights.size(); k > 1; --k) {
                auto j = static_cast<std::size_t>(std::uniform_int_distribution<std::uint64_t>(
                    0, k - 1)(rng));
                std::swap(heights[k - 1], heights[j]);
            }
            for (auto& h : heights)
                h = spec.offset +
                    spec.amplitude *
                        (h + std::uniform_real_distribution<double>(-0.1, 0.1)(rng));
            for (int k = 0; k < segs; ++k) {
                std::size_t a = starts[static_cast<std::size_t>(k)];
                std::size_t b = k + 1 < segs ? starts[static_cast<std::size_t>(k + 1)] : n;
                double h = heights[static_cast<std::size_t>(k)];
                double prev = k == 0 ? h : heights[static_cast<std::size_t>(k - 1)];
                auto ramp = static_cast<std::size_t>(std::max(0, spec.level_ramp));
                for (std::size_t i = a; i < b; ++i) {
                    // Ramped transitions keep level changes from reading as
                    // single giant increments downstream.
                    if (k > 0 && ramp > 0 && i - a < ramp) {
                        double t = static_cast<double>(i - a + 1) / static_cast<double>(ramp + 1);
                        base[i] = prev + (h - prev) * t;
                    } else {
                        base[i] = h;
                    }
                }
            }
            break;
        }
        case BaselineKind::random_walk_smoothed: {
            std::vector<double> walk(n);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += std::normal_distribution<double>(0.0, 1.0)(rng);
                walk[i] = acc;
            }
            int w = static_cast<int>(std::min<std::size_t>(31, n));
            if (w % 2 == 0) --w;
            walk = smooth_values(walk, {SmootherKind::mean, std::max(1, w)});
            walk = minmax_normalize_values(walk);
            for (std::size_t i = 0; i < n; ++i)
                base[i] = spec.offset + spec.amplitude * (2.0 * walk[i] - 1.0);
            break;
        }
    }
    return base;
}

}  // namespace detail

// Baseline plus correlated Gaussian noise plus salt-and-pepper impulses; an
// impulse replaces the noisy point by baseline +- height, sign uniform. Zero
// noise reproduces the baseline exactly.
inline std::pair<TimeSeries, ClusterCode> synthesize(const ArchetypeSpec& spec, Rng& rng) {
    if (spec.length == 0) throw std::invalid_argument("synthesize: length must be positive");
    if (spec.noise.impulse_prob < 0.0 || spec.noise.impulse_prob > 1.0)
        throw std::invalid_argument("synthesize: impulse_prob outside [0,1]");
    if (spec.noise.noise_smooth < 1 || spec.noise.noise_smooth % 2 == 0)
        throw std::invalid_argument("synthesize: noise_smooth must be odd and positive");

    std::vector<double> base = detail::synth_baseline(spec, rng);
    std::vector<double> x = base;

    if (spec.noise.gaussian_sigma > 0.0) {
        std::vector<double> e(spec.length);
        for (auto& v : e) v = std::normal_distribution<double>(0.0, 1.0)(rng);
        if (spec.noise.noise_smooth > 1) {
            // Smoothing shrinks the marginal deviation; rescale so sigma
            // still means what it says while neighbours stay correlated.
            e = smooth_values(e, {SmootherKind::mean, spec.noise.noise_smooth});
            double k = std::sqrt(static_cast<double>(spec.noise.noise_smooth));
            for (auto& v : e) v *= k;
        }
        double s = spec.noise.gaussian_sigma * spec.amplitude;
        for (std::size_t i = 0; i < spec.length; ++i) x[i] += s * e[i];
    }

    if (spec.noise.impulse_prob > 0.0 && spec.noise.impulse_magnitude > 0.0) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (std::size_t i = 0; i < spec.length; ++i) {
            if (u01(rng) >= spec.noise.impulse_prob) continue;
            double sign = u01(rng) < 0.5 ? 1.0 : -1.0;
            double h = spec.noise.impulse_magnitude * spec.amplitude;
            if (spec.noise.impulse_spread > 0.0)
                h *= 1.0 + spec.noise.impulse_spread *
                                std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
            x[i] = base[i] + sign * h;
        }
    }
    return {TimeSeries(std::move(x)), spec.code};
}

// Applies per-series jitter so archetype members differ without losing their
// shared character; periodic series keep nearly aligned phases, the way
// same-business KPIs share wall-clock seasonality.
inline ArchetypeSpec jitter_archetype(ArchetypeSpec spec, Rng& rng) {
    spec.period *= std::uniform_real_distribution<double>(0.97, 1.03)(rng);
    spec.phase = std::uniform_real_distribution<double>(0.0, 0.03)(rng);
    spec.amplitude *= std::uniform_real_distribution<double>(0.95, 1.05)(rng);
    return spec;
}

namespace detail {

inline std::string series_name(const ClusterCode& code, int k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03d", k);
    return code.to_string() + "/series_" + buf;
}

}  // namespace detail

struct PlantedAnomalies {
    TimeSeries series;
    AnomalyLabels labels;
};

inline PlantedAnomalies plant_anomalies(const TimeSeries& ts, int count, Rng& rng,
                                        double noise_scale = 0.0);

// per_cluster series per archetype spec, truth codes attached; anomalies
// planted and labeled when requested. Each series draws from its own seed
// stream, so the dataset is stable under reordering or parallel generation.
inline LabeledDataset generate_custom_dataset(const std::array<ArchetypeSpec, 8>& specs,
                                              int per_cluster, std::uint64_t seed,
                                              int anomalies_per_series) {
    if (per_cluster < 1) throw std::invalid_argument("generate_dataset: per_cluster must be >= 1");
    std::vector<DatasetEntry> entries;
    entries.reserve(static_cast<std::size_t>(per_cluster) * 8);
    std::size_t global_index = 0;
    for (ClusterCode code : ClusterCode::all()) {
        const ArchetypeSpec& base_spec = specs[static_cast<std::size_t>(code.index())];
        for (int k = 0; k < per_cluster; ++k, ++global_index) {
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(code.index()),
                             static_cast<std::uint64_t>(k)));
            ArchetypeSpec spec = jitter_archetype(base_spec, rng);
            auto [series, truth] = synthesize(spec, rng);
            std::optional<AnomalyLabels> labels;
            if (anomalies_per_series > 0) {
                Rng plant_rng(mix_seed(seed, 0xa0a0, global_index));
                // The generator knows its own noise level; estimating it back
                // from the series would shrink under correlated noise and
                // make the injections quietly smaller than advertised.
                double known_scale = spec.noise.gaussian_sigma * spec.amplitude;
                PlantedAnomalies planted =
                    plant_anomalies(series, anomalies_per_series, plant_rng, known_scale);
                series = std::move(planted.series);
                labels = std::move(planted.labels);
            }
            entries.push_back(
                {detail::series_name(code, k), std::move(series), std::move(labels), truth});
        }
    }
    return LabeledDataset(std::move(entries));
}

inline std::array<ArchetypeSpec, 8> default_archetypes(std::size_t length) {
    std::array<ArchetypeSpec, 8> specs;
    for (ClusterCode code : ClusterCode::all())
        specs[static_cast<std::size_t>(code.index())] = default_archetype(code, length);
    return specs;
}

// per_cluster series per code, truth codes attached, no anomaly labels.
inline LabeledDataset generate_dataset(int per_cluster, std::size_t length, std::uint64_t seed) {
    return generate_custom_dataset(default_archetypes(length), per_cluster, seed, 0);
}

// Injects count anomaly segments: sustained level shifts or same-sign spike
// bursts, sized ~10x the point-noise scale so they are genuinely outside
// normal behaviour but not comically so. Pass the noise scale when it is
// known (a generator knows its own sigma); 0 estimates it from the series.
// Labels run one point past the modified range to cover the recovery edge.
inline PlantedAnomalies plant_anomalies(const TimeSeries& ts, int count, Rng& rng,
                                        double noise_scale) {
    if (count < 0) throw std::invalid_argument("plant_anomalies: count must be non-negative");
    if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale))
        throw std::invalid_argument("plant_anomalies: noise_scale must be finite and >= 0");
    const std::size_t n = ts.length();
    if (count == 0) return {ts, AnomalyLabels({}, n)};

    // Robust point-noise scale: MAD of residuals against a median trend.
    // Diff-based scales underestimate correlated noise, which would make the
    // planted anomalies quietly sub-threshold.
    int trend_w = static_cast<int>(std::min<std::size_t>(61, n));
    if (trend_w % 2 == 0) --trend_w;
    std::vector<double> trend = smooth_values(ts.values(), {SmootherKind::median, trend_w});
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = ts.values()[i] - trend[i];
    double est = std::max(1.4826 * mad(resid), 1e-12);
    double sigma = noise_scale > 0.0 ? noise_scale : est;

    // A segment boundary butting against a pre-existing outlier (a salt or
    // pepper impulse, say) is ambiguous ground truth: smoothing merges the
    // two events and the recovery edge lands outside the label. Keep the
    // edges clear of such points; interiors may swallow them freely.
    std::vector<bool> hot(n, false);
    for (std::size_t i = 0; i < n; ++i) hot[i] = std::abs(resid[i]) > 5.0 * std::max(sigma, est);
    const std::size_t clear = 8;
    auto edge_clear = [&](std::size_t at) {
        std::size_t lo = at > clear ? at - clear : 0;
        std::size_t hi = std::min(n, at + clear + 1);
        for (std::size_t j = lo; j < hi; ++j)
            if (hot[j]) return false;
        return true;
    };

    const std::size_t margin_start = std::min<std::size_t>(100, n / 8);
    const std::size_t margin_end = 10;
    const std::size_t gap = 30;

    std::vector<double> x = ts.values();
    std::vector<LabelSegment> segments;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int a = 0; a < count; ++a) {
        bool placed = false;
        for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
            bool shift = u01(rng) < 0.5;
            auto len = static_cast<std::size_t>(
                shift ? std::uniform_int_distribution<int>(20, 60)(rng)
                      : std::uniform_int_distribution<int>(6, 15)(rng));
            if (margin_start + len + margin_end + 1 >= n) continue;
            auto start = std::uniform_int_distribution<std::size_t>(
                margin_start, n - margin_end - len - 2)(rng);
            LabelSegment seg{start, start + len + 1};
            bool clash = false;
            for (const auto& s : segments) {
                if (seg.start < s.end + gap && s.start < seg.end + gap) {
                    clash = true;
                    break;
                }
            }
            if (clash) continue;
            if (!edge_clear(seg.start) || !edge_clear(seg.end - 1)) continue;

            double sign = u01(rng) < 0.5 ? 1.0 : -1.0;
            if (shift) {
                double delta = sign * sigma * std::uniform_real_distribution<double>(9.0, 13.0)(rng);
                for (std::size_t i = start; i < start + len; ++i) x[i] += delta;
            } else {
                for (std::size_t i = start; i < start + len; ++i)
                    x[i] += sign * sigma * std::uniform_real_distribution<double>(11.0, 15.0)(rng);
            }
            segments.push_back(seg);
            placed = true;
        }
        if (!placed)
            throw std::runtime_error("plant_anomalies: cannot fit " + std::to_string(count) +
                                     " disjoint segments into " + std::to_string(n) + " points");
    }
    std::sort(segments.begin(), segments.end(),
              [](const LabelSegment& a, const LabelSegment& b) { return a.start < b.start; });
    return {TimeSeries(std::move(x)), AnomalyLabels(std::move(segments), n)};
}

// generate_dataset plus planted anomalies and labels on every series.
inline LabeledDataset generate_labeled_dataset(int per_cluster, std::size_t length,
                                               std::uint64_t seed, int anomalies_per_series) {
    return generate_custom_dataset(default_archetypes(length), per_cluster, seed,
                                   anomalies_per_series);
}

}  // namespace cratos
