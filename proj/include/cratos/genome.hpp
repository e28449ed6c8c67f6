#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cratos/pipeline.hpp"
#include "cratos/rng.hpp"

namespace cratos {

// Selection-style genes re-initialize wholesale when mutation fires; the
// Numeric gene instead takes a normal step sized by its own rate.
struct FlagGene {
    bool value = false;
    double rate = 0.5;
};

struct ChoiceGene {
    std::vector<std::string> options;
    std::string value;
    double rate = 0.5;
};

struct SubsetGene {
    std::vector<std::string> options;
    std::vector<std::string> value;  // non-empty ordered subset of options
    double rate = 0.5;
};

struct NumericGene {
    double lo = 0.0;
    double hi = 1.0;
    bool is_int = false;
    double value = 0.0;
    double rate = 0.1;
};

using Gene = std::variant<FlagGene, ChoiceGene, SubsetGene, NumericGene>;

// Rates of selection-style genes live in (0,1); clamping to these bounds
// keeps "always mutate" and "never mutate" unreachable.
inline constexpr double kSelectionRateLo = 0.001;
inline constexpr double kSelectionRateHi = 0.999;

// A Numeric gene's rate is a step size; its legal range scales with the span
// of the value range so steps stay meaningful after self-adaptation.
inline std::pair<double, double> numeric_rate_bounds(double lo, double hi) {
    double span = hi - lo;
    if (span <= 0.0) return {1e-9, 1e-9};
    return {span / 1000.0, span / 2.0};
}

struct GeneSpace {
    std::vector<std::pair<std::string, Gene>> prototypes;  // value fields ignored at init
    double meta_rate = 0.1;       // step size for rate self-adaptation; never mutated
    bool literal_rate_rule = true;  // fire mutation when r > rate; false flips to r < rate
};

struct Genome {
    std::uint64_t id = 0;  // creation order; used for tie-breaks and rng streams
    std::map<std::string, Gene> genes;
    std::optional<int> fitness;
};

namespace detail {

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

template <typename T>
void fisher_yates(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

inline double init_selection_rate(Rng& rng) {
    return std::uniform_real_distribution<double>(kSelectionRateLo, kSelectionRateHi)(rng);
}

inline void init_value(FlagGene& g, Rng& rng) { g.value = uniform01(rng) < 0.5; }

inline void init_value(ChoiceGene& g, Rng& rng) {
    if (g.options.empty()) throw std::invalid_argument("Choice gene with empty option list");
    g.value = g.options[uniform_index(rng, g.options.size())];
}

// Uniform over all non-empty subsets, then a uniform shuffle of the chosen
// elements.
inline void init_value(SubsetGene& g, Rng& rng) {
    if (g.options.empty()) throw std::invalid_argument("Subset gene with empty option list");
    if (g.options.size() > 20) throw std::invalid_argument("Subset gene option list too large");
    auto mask = std::uniform_int_distribution<std::uint64_t>(
        1, (std::uint64_t{1} << g.options.size()) - 1)(rng);
    g.value.clear();
    for (std::size_t i = 0; i < g.options.size(); ++i)
        if (mask & (std::uint64_t{1} << i)) g.value.push_back(g.options[i]);
    fisher_yates(g.value, rng);
}

inline void init_value(NumericGene& g, Rng& rng) {
    if (g.hi < g.lo) throw std::invalid_argument("Numeric gene with inverted range");
    g.value = g.lo == g.hi ? g.lo : std::uniform_real_distribution<double>(g.lo, g.hi)(rng);
    if (g.is_int) g.value = std::round(g.value);
}

inline Gene init_gene(const Gene& proto, Rng& rng) {
    Gene g = proto;
    std::visit(
        [&](auto& gene) {
            init_value(gene, rng);
            using T = std::decay_t<decltype(gene)>;
            if constexpr (std::is_same_v<T, NumericGene>) {
                auto [lo, hi] = numeric_rate_bounds(gene.lo, gene.hi);
                gene.rate = lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
            } else {
                gene.rate = init_selection_rate(rng);
            }
        },
        g);
    return g;
}

}  // namespace detail

// Whether a selection-style gene's mutation fires for this draw. The literal
// rule mutates when r > rate, so a larger rate means a more stable gene; the
// conventional reading is available behind the flag.
inline bool selection_mutation_fires(double rate, Rng& rng, bool literal_rule) {
    double r = detail::uniform01(rng);
    return literal_rule ? r > rate : r < rate;
}

inline Genome init_genome(const GeneSpace& space, Rng& rng) {
    Genome g;
    for (const auto& [name, proto] : space.prototypes) g.genes[name] = detail::init_gene(proto, rng);
    return g;
}

// Per-gene: maybe re-initialize (selection kinds) or take a clamped normal
// step (numeric), then let the rate itself drift by meta_rate. Draw order is
// fixed by gene name so results depend only on the rng stream.
inline void mutate_genome(const GeneSpace& space, Genome& g, Rng& rng) {
    for (auto& [name, gene] : g.genes) {
        std::visit(
            [&](auto& gn) {
                using T = std::decay_t<decltype(gn)>;
                if constexpr (std::is_same_v<T, NumericGene>) {
                    double next = std::normal_distribution<double>(gn.value, gn.rate)(rng);
                    next = std::clamp(next, gn.lo, gn.hi);
                    gn.value = gn.is_int ? std::round(next) : next;
                    auto [lo, hi] = numeric_rate_bounds(gn.lo, gn.hi);
                    gn.rate = std::clamp(
                        std::normal_distribution<double>(gn.rate, space.meta_rate)(rng), lo, hi);
                } else {
                    if (selection_mutation_fires(gn.rate, rng, space.literal_rate_rule)) {
                        double keep_rate = gn.rate;
                        detail::init_value(gn, rng);
                        gn.rate = keep_rate;
                    }
                    gn.rate = std::clamp(
                        std::normal_distribution<double>(gn.rate, space.meta_rate)(rng),
                        kSelectionRateLo, kSelectionRateHi);
                }
            },
            gene);
    }
    g.fitness.reset();
}

// --- Pipeline gene space ----------------------------------------------------

inline constexpr int kMaxSmootherHalfwidth = (kMaxSmootherWindow - 1) / 2;

// The searchable encoding of a detection pipeline for series of the given
// length. Parameter genes exist for every detector whether or not the subset
// currently includes it, so toggling a detector back in recovers its tuning.
inline GeneSpace make_pipeline_space(std::size_t series_length) {
    if (series_length < 16)
        throw std::invalid_argument("pipeline gene space needs series of at least 16 points");
    GeneSpace space;
    auto num = [](double lo, double hi, bool is_int) {
        NumericGene g;
        g.lo = lo;
        g.hi = hi;
        g.is_int = is_int;
        return Gene{g};
    };

    SubsetGene detectors;
    for (DetectorKind k : all_detectors()) detectors.options.emplace_back(to_string(k));
    space.prototypes.emplace_back("detectors", detectors);
    space.prototypes.emplace_back("normalize", FlagGene{});
    space.prototypes.emplace_back("smoother_kind",
                                  ChoiceGene{{"mean", "median"}, "mean", 0.5});
    space.prototypes.emplace_back("smoother_halfwidth",
                                  num(0, kMaxSmootherHalfwidth, true));

    const double max_window = std::min<double>(kMaxDetectorWindow,
                                               static_cast<double>(series_length));
    for (DetectorKind k : all_detectors()) {
        std::string name(to_string(k));
        space.prototypes.emplace_back(name + "_sensitivity",
                                      num(kMinSensitivity, kMaxSensitivity, false));
        if (k == DetectorKind::local_steep)
            space.prototypes.emplace_back(name + "_window", num(kMinDetectorWindow, max_window, true));
        if (k == DetectorKind::dynamic_threshold)
            space.prototypes.emplace_back(name + "_period",
                                          num(2, static_cast<double>(series_length / 2), true));
    }
    return space;
}

namespace detail {

template <typename T>
const T& gene_as(const Genome& g, const std::string& name) {
    auto it = g.genes.find(name);
    if (it == g.genes.end())
        throw std::invalid_argument("genome is missing gene \"" + name + "\"");
    const T* p = std::get_if<T>(&it->second);
    if (!p) throw std::invalid_argument("genome gene \"" + name + "\" has the wrong kind");
    return *p;
}

}  // namespace detail

inline PipelineConfig decode_pipeline(const Genome& g) {
    PipelineConfig cfg;
    cfg.normalize = detail::gene_as<FlagGene>(g, "normalize").value;
    cfg.smoother.kind = detail::gene_as<ChoiceGene>(g, "smoother_kind").value == "median"
                            ? SmootherKind::median
                            : SmootherKind::mean;
    cfg.smoother.window =
        2 * static_cast<int>(detail::gene_as<NumericGene>(g, "smoother_halfwidth").value) + 1;
    for (const auto& name : detail::gene_as<SubsetGene>(g, "detectors").value)
        cfg.detectors.push_back(detector_from_string(name));
    for (DetectorKind k : all_detectors()) {
        std::string name(to_string(k));
        DetectorParams p;
        p.sensitivity = detail::gene_as<NumericGene>(g, name + "_sensitivity").value;
        if (k == DetectorKind::local_steep)
            p.window = static_cast<int>(detail::gene_as<NumericGene>(g, name + "_window").value);
        if (k == DetectorKind::dynamic_threshold)
            p.period = static_cast<int>(detail::gene_as<NumericGene>(g, name + "_period").value);
        cfg.params[k] = p;
    }
    return cfg;
}

// --- JSON serialization -----------------------------------------------------

inline nlohmann::json gene_to_json(const Gene& gene) {
    nlohmann::json j;
    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, FlagGene>) {
                j["kind"] = "flag";
                j["value"] = g.value;
            } else if constexpr (std::is_same_v<T, ChoiceGene>) {
                j["kind"] = "choice";
                j["options"] = g.options;
                j["value"] = g.value;
            } else if constexpr (std::is_same_v<T, SubsetGene>) {
                j["kind"] = "subset";
                j["options"] = g.options;
                j["value"] = g.value;
            } else {
                j["kind"] = "numeric";
                j["lo"] = g.lo;
                j["hi"] = g.hi;
                j["int"] = g.is_int;
                j["value"] = g.value;
            }
            j["rate"] = g.rate;
        },
        gene);
    return j;
}

inline Gene gene_from_json(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    Gene gene;
    if (kind == "flag") {
        FlagGene g;
        g.value = j.at("value").get<bool>();
        gene = g;
    } else if (kind == "choice") {
        ChoiceGene g;
        g.options = j.at("options").get<std::vector<std::string>>();
        g.value = j.at("value").get<std::string>();
        gene = g;
    } else if (kind == "subset") {
        SubsetGene g;
        g.options = j.at("options").get<std::vector<std::string>>();
        g.value = j.at("value").get<std::vector<std::string>>();
        gene = g;
    } else if (kind == "numeric") {
        NumericGene g;
        g.lo = j.at("lo").get<double>();
        g.hi = j.at("hi").get<double>();
        g.is_int = j.at("int").get<bool>();
        g.value = j.at("value").get<double>();
        gene = g;
    } else {
        throw std::runtime_error("unknown gene kind \"" + kind + "\"");
    }
    std::visit([&](auto& g) { g.rate = j.at("rate").get<double>(); }, gene);
    return gene;
}

inline nlohmann::json genome_to_json(const Genome& g) {
    nlohmann::json j;
    j["genes"] = nlohmann::json::object();
    for (const auto& [name, gene] : g.genes) j["genes"][name] = gene_to_json(gene);
    if (g.fitness) j["fitness"] = *g.fitness;
    j["pipeline"] = pipeline_to_json(decode_pipeline(g));
    return j;
}

inline Genome genome_from_json(const nlohmann::json& j) {
    Genome g;
    for (const auto& [name, gj] : j.at("genes").items()) g.genes[name] = gene_from_json(gj);
    if (j.contains("fitness")) g.fitness = j.at("fitness").get<int>();
    return g;
}

}  // namespace cratos
