#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cratos/genome.hpp"
#include "cratos/pipeline.hpp"
#include "cratos/rng.hpp"
#include "cratos/time_series.hpp"

namespace cratos {

struct EvolutionConfig {
    int population = 200;
    int survivors = 40;
    int offspring = 160;
    int generations = 40;
    std::uint64_t seed = 0;
    int delay_tolerance = 5;
    int workers = 1;
};

inline void validate(const EvolutionConfig& cfg) {
    if (cfg.survivors < 1) throw std::invalid_argument("evolution: survivors must be at least 1");
    if (cfg.offspring < 0) throw std::invalid_argument("evolution: offspring must be non-negative");
    if (cfg.survivors + cfg.offspring != cfg.population)
        throw std::invalid_argument("evolution: survivors + offspring must equal population (" +
                                    std::to_string(cfg.survivors) + " + " +
                                    std::to_string(cfg.offspring) +
                                    " != " + std::to_string(cfg.population) + ")");
    if (cfg.generations < 1)
        throw std::invalid_argument("evolution: generations must be at least 1");
    if (cfg.delay_tolerance < 1)
        throw std::invalid_argument("evolution: delay_tolerance must be at least 1");
    if (cfg.workers < 1) throw std::invalid_argument("evolution: workers must be at least 1");
}

// A series passes when every labeled segment is flagged within its first
// delay_tolerance points and nothing is flagged outside the segments.
inline bool series_passes(const DetectionResult& result, const AnomalyLabels& labels,
                          int delay_tolerance) {
    const auto& idx = result.anomalous_indices;
    for (const auto& seg : labels.segments()) {
        std::size_t window_end = std::min(seg.end, seg.start + static_cast<std::size_t>(delay_tolerance));
        auto it = std::lower_bound(idx.begin(), idx.end(), seg.start);
        if (it == idx.end() || *it >= window_end) return false;
    }
    for (std::size_t i : idx)
        if (!labels.contains(i)) return false;
    return true;
}

// Pass count of the decoded pipeline over the dataset.
inline int fitness(const Genome& g, const LabeledDataset& data, int delay_tolerance) {
    PipelineConfig cfg = decode_pipeline(g);
    int passes = 0;
    for (const auto& entry : data.entries()) {
        if (!entry.labels)
            throw std::runtime_error("fitness: series \"" + entry.name + "\" has no labels");
        if (series_passes(run_pipeline(cfg, entry.series), *entry.labels, delay_tolerance))
            ++passes;
    }
    return passes;
}

struct GenerationStats {
    int generation = 0;
    int best = 0;
    double mean = 0.0;
};

struct EvolveResult {
    Genome best;
    std::vector<GenerationStats> history;
    std::uint64_t evaluations = 0;  // genome evaluations actually performed
};

using FitnessFn = std::function<int(const Genome&)>;

// Elitist clone-and-mutate search: every generation evaluates the whole
// population, keeps the best `survivors` (ties resolved by creation order,
// which the stable sort on descending fitness preserves), and refills with
// mutated clones of uniformly chosen survivors. Offspring mutation streams
// are seeded per genome id, so evaluation order and worker count do not
// affect the outcome.
inline EvolveResult evolve_with(const GeneSpace& space, const EvolutionConfig& cfg,
                                const FitnessFn& evaluate) {
    validate(cfg);

    std::vector<Genome> population;
    population.reserve(static_cast<std::size_t>(cfg.population));
    std::uint64_t next_id = 0;
    for (int i = 0; i < cfg.population; ++i) {
        Rng rng(mix_seed(cfg.seed, 0x1717, next_id));
        Genome g = init_genome(space, rng);
        g.id = next_id++;
        population.push_back(std::move(g));
    }

    EvolveResult result;
    auto eval_population = [&]() {
        const std::size_t n = population.size();
        if (cfg.workers <= 1) {
            for (auto& g : population) g.fitness = evaluate(g);
        } else {
            auto worker = [&](std::size_t start) {
                for (std::size_t i = start; i < n; i += static_cast<std::size_t>(cfg.workers))
                    population[i].fitness = evaluate(population[i]);
            };
            std::vector<std::jthread> threads;
            threads.reserve(static_cast<std::size_t>(cfg.workers) - 1);
            for (int t = 1; t < cfg.workers; ++t)
                threads.emplace_back(worker, static_cast<std::size_t>(t));
            worker(0);
        }
        result.evaluations += n;
    };

    for (int gen = 0; gen < cfg.generations; ++gen) {
        eval_population();

        std::stable_sort(population.begin(), population.end(), [](const Genome& a, const Genome& b) {
            if (*a.fitness != *b.fitness) return *a.fitness > *b.fitness;
            return a.id < b.id;
        });

        GenerationStats stats;
        stats.generation = gen;
        stats.best = *population.front().fitness;
        double sum = 0.0;
        for (const auto& g : population) sum += *g.fitness;
        stats.mean = sum / static_cast<double>(population.size());
        result.history.push_back(stats);

        if (gen == 0 || *population.front().fitness > *result.best.fitness)
            result.best = population.front();

        if (gen + 1 == cfg.generations) break;

        population.resize(static_cast<std::size_t>(cfg.survivors));
        Rng pick(mix_seed(cfg.seed, 0x9a9e, static_cast<std::uint64_t>(gen)));
        for (int k = 0; k < cfg.offspring; ++k) {
            Genome child = population[detail::uniform_index(pick, static_cast<std::size_t>(cfg.survivors))];
            child.id = next_id++;
            Rng rng(mix_seed(cfg.seed, 0x3b3b, child.id));
            mutate_genome(space, child, rng);
            population.push_back(std::move(child));
        }
    }
    return result;
}

inline EvolveResult evolve(const GeneSpace& space, const EvolutionConfig& cfg,
                           const LabeledDataset& data) {
    if (data.empty()) throw std::invalid_argument("evolve: dataset is empty");
    return evolve_with(space, cfg,
                       [&](const Genome& g) { return fitness(g, data, cfg.delay_tolerance); });
}

}  // namespace cratos
