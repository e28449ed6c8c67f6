#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cratos/rng.hpp"

namespace cratos {

struct KMeansModel {
    std::array<std::vector<double>, 2> centroids;
    double inertia = 0.0;  // sum of squared distances at convergence

    std::size_t dimension() const { return centroids[0].size(); }
};

namespace detail {

inline double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace detail

// Nearest centroid by squared Euclidean distance; exact ties go to index 0.
inline int kmeans_predict(const KMeansModel& model, std::span<const double> v) {
    if (v.size() != model.dimension())
        throw std::invalid_argument("kmeans_predict: vector dimension " + std::to_string(v.size()) +
                                    " does not match model dimension " +
                                    std::to_string(model.dimension()));
    double d0 = detail::dist2(v, model.centroids[0]);
    double d1 = detail::dist2(v, model.centroids[1]);
    return d1 < d0 ? 1 : 0;
}

struct LloydRun {
    KMeansModel model;
    std::vector<int> assignment;
    std::vector<double> inertia_trace;  // one entry per assignment step, non-increasing
};

// Lloyd iteration from the given initial centroids. An empty cluster is
// repaired by promoting the point farthest from the surviving centroid.
inline LloydRun lloyd_run(const std::vector<std::vector<double>>& points,
                          std::array<std::vector<double>, 2> init, int max_iters = 300) {
    const std::size_t n = points.size();
    const std::size_t dim = init[0].size();
    LloydRun run;
    run.model.centroids = std::move(init);
    run.assignment.assign(n, -1);

    std::vector<int> prev(n, -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d0 = detail::dist2(points[i], run.model.centroids[0]);
            double d1 = detail::dist2(points[i], run.model.centroids[1]);
            run.assignment[i] = d1 < d0 ? 1 : 0;
            inertia += run.assignment[i] == 1 ? d1 : d0;
        }
        run.inertia_trace.push_back(inertia);
        run.model.inertia = inertia;
        if (run.assignment == prev) break;
        prev = run.assignment;

        std::array<std::vector<double>, 2> sums{std::vector<double>(dim, 0.0),
                                                std::vector<double>(dim, 0.0)};
        std::array<std::size_t, 2> counts{0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[static_cast<std::size_t>(run.assignment[i])];
            for (std::size_t j = 0; j < dim; ++j) s[j] += points[i][j];
            ++counts[static_cast<std::size_t>(run.assignment[i])];
        }
        for (int c = 0; c < 2; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) continue;
            auto& cen = run.model.centroids[static_cast<std::size_t>(c)];
            for (std::size_t j = 0; j < dim; ++j)
                cen[j] = sums[static_cast<std::size_t>(c)][j] /
                         static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
        for (int c = 0; c < 2; ++c) {
            if (counts[static_cast<std::size_t>(c)] != 0) continue;
            const auto& other = run.model.centroids[static_cast<std::size_t>(1 - c)];
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d = detail::dist2(points[i], other);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            run.model.centroids[static_cast<std::size_t>(c)] = points[far];
        }
    }
    return run;
}

namespace detail {

// k-means++ for k=2: first centroid uniform, second weighted by squared
// distance to the first. Identical points fall back to an arbitrary second.
inline std::array<std::vector<double>, 2> seed_centroids(
    const std::vector<std::vector<double>>& points, Rng& rng) {
    const std::size_t n = points.size();
    std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = dist2(points[i], points[first]);
        total += w[i];
    }
    std::size_t second;
    if (total <= 0.0) {
        second = (first + 1) % n;
    } else {
        double draw = std::uniform_real_distribution<double>(0.0, total)(rng);
        double acc = 0.0;
        second = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            acc += w[i];
            if (draw < acc) {
                second = i;
                break;
            }
        }
    }
    return {points[first], points[second]};
}

}  // namespace detail

struct KMeansFit {
    KMeansModel model;
    std::vector<int> assignment;
};

// Best of n_restarts seeded Lloyd runs by final inertia; earlier restart wins
// ties. Deterministic for a given seed.
inline KMeansFit kmeans_fit(const std::vector<std::vector<double>>& points, std::uint64_t seed,
                            int n_restarts = 10, int max_iters = 300) {
    if (points.size() < 2) throw std::invalid_argument("kmeans_fit: need at least 2 vectors");
    const std::size_t dim = points[0].size();
    if (dim == 0) throw std::invalid_argument("kmeans_fit: zero-dimensional vectors");
    for (const auto& p : points) {
        if (p.size() != dim)
            throw std::invalid_argument("kmeans_fit: mixed vector dimensions (" +
                                        std::to_string(dim) + " vs " + std::to_string(p.size()) +
                                        ")");
    }

    LloydRun best;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < n_restarts; ++r) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        LloydRun run = lloyd_run(points, detail::seed_centroids(points, rng), max_iters);
        if (run.model.inertia < best_inertia) {
            best_inertia = run.model.inertia;
            best = std::move(run);
        }
    }
    // Re-derive the assignment through predict so that downstream partitioning
    // agrees with prediction even if the iteration cap was hit.
    KMeansFit fit{std::move(best.model), {}};
    fit.assignment.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        fit.assignment[i] = kmeans_predict(fit.model, points[i]);
    return fit;
}

}  // namespace cratos
