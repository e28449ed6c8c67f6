// Command-line front end: generate synthetic datasets, fit the behaviour
// cluster tree, evolve per-cluster detection pipelines, run detection on a
// single series, and score clustering output.
//
// Exit codes: 0 success, 1 usage problem, 2 data or runtime problem.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cratos/cratos.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open \"" + path.string() + "\" for writing");
    return out;
}

json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open \"" + path.string() + "\"");
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw std::runtime_error("cannot parse \"" + path.string() + "\": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
    std::string out_dir;
    std::string spec_path;
    int per_cluster = 50;
    int length = 5760;
    int anomalies = 1;
};

void apply_archetype_overrides(cratos::ArchetypeSpec& spec, const json& j) {
    if (j.contains("baseline")) {
        std::string b = j.at("baseline").get<std::string>();
        if (b == "sinusoid") spec.baseline = cratos::BaselineKind::sinusoid;
        else if (b == "piecewise_flat") spec.baseline = cratos::BaselineKind::piecewise_flat;
        else if (b == "random_walk_smoothed")
            spec.baseline = cratos::BaselineKind::random_walk_smoothed;
        else throw std::runtime_error("unknown baseline \"" + b + "\"");
    }
    if (j.contains("amplitude")) spec.amplitude = j.at("amplitude").get<double>();
    if (j.contains("period")) spec.period = j.at("period").get<double>();
    if (j.contains("phase")) spec.phase = j.at("phase").get<double>();
    if (j.contains("levels")) spec.levels = j.at("levels").get<int>();
    if (j.contains("level_ramp")) spec.level_ramp = j.at("level_ramp").get<int>();
    if (j.contains("offset")) spec.offset = j.at("offset").get<double>();
    if (j.contains("gaussian_sigma")) spec.noise.gaussian_sigma = j.at("gaussian_sigma").get<double>();
    if (j.contains("noise_smooth")) spec.noise.noise_smooth = j.at("noise_smooth").get<int>();
    if (j.contains("impulse_prob")) spec.noise.impulse_prob = j.at("impulse_prob").get<double>();
    if (j.contains("impulse_magnitude"))
        spec.noise.impulse_magnitude = j.at("impulse_magnitude").get<double>();
    if (j.contains("impulse_spread"))
        spec.noise.impulse_spread = j.at("impulse_spread").get<double>();
}

int cmd_gen(const GenArgs& args, std::uint64_t seed) {
    int per_cluster = args.per_cluster;
    int length = args.length;
    int anomalies = args.anomalies;
    json overrides = json::object();
    if (!args.spec_path.empty()) {
        json spec = load_json(args.spec_path);
        if (spec.contains("per_cluster")) per_cluster = spec.at("per_cluster").get<int>();
        if (spec.contains("length")) length = spec.at("length").get<int>();
        if (spec.contains("anomalies")) anomalies = spec.at("anomalies").get<int>();
        if (spec.contains("archetypes")) overrides = spec.at("archetypes");
    }
    if (per_cluster < 1) throw UsageError("--per-cluster must be at least 1");
    if (length < 1) throw UsageError("--length must be at least 1");
    if (anomalies < 0) throw UsageError("--anomalies must be non-negative");

    auto specs = cratos::default_archetypes(static_cast<std::size_t>(length));
    for (const auto& [key, value] : overrides.items()) {
        cratos::ClusterCode code = cratos::ClusterCode::from_string(key);
        apply_archetype_overrides(specs[static_cast<std::size_t>(code.index())], value);
    }

    cratos::LabeledDataset data =
        cratos::generate_custom_dataset(specs, per_cluster, seed, anomalies);

    fs::path out(args.out_dir);
    fs::create_directories(out);
    for (cratos::ClusterCode code : cratos::ClusterCode::all())
        fs::create_directories(out / code.to_string());

    std::vector<cratos::ManifestEntry> manifest;
    manifest.reserve(data.size());
    for (const auto& e : data.entries()) {
        std::string series_rel = e.name + ".csv";
        cratos::save_series(e.series, out / series_rel);
        cratos::ManifestEntry m;
        m.series = series_rel;
        m.code = e.truth_code;
        if (e.labels) {
            std::string labels_rel = e.name;
            auto pos = labels_rel.rfind("series_");
            labels_rel.replace(pos, 7, "labels_");
            labels_rel += ".csv";
            cratos::save_labels(*e.labels, out / labels_rel);
            m.labels = labels_rel;
        }
        manifest.push_back(std::move(m));
    }
    cratos::save_manifest(manifest, out / "manifest.json");
    std::cout << "wrote " << data.size() << " series to " << out.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// cluster

struct ClusterArgs {
    std::string data;
    std::string out_model;
    std::string assignments;
};

int cmd_cluster(const ClusterArgs& args, std::uint64_t seed) {
    cratos::LabeledDataset data = cratos::load_dataset(args.data);
    cratos::HierarchicalFit fit = cratos::hierarchical_fit(data, seed);
    fs::path model_path(args.out_model);
    if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());
    cratos::save_tree(fit.tree, model_path);

    fs::path assign_path = args.assignments.empty()
                               ? model_path.parent_path() / "assignments.csv"
                               : fs::path(args.assignments);
    std::ofstream out = open_out(assign_path);
    out << "series,code\n";
    std::map<std::string, std::size_t> occupancy;
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << data.entries()[i].name << ',' << fit.assignments[i].to_string() << '\n';
        ++occupancy[fit.assignments[i].to_string()];
    }
    std::cout << "model: " << model_path.string() << "\n";
    for (const auto& [code, count] : occupancy)
        std::cout << code << ": " << count << " series\n";
    return 0;
}

// ---------------------------------------------------------------------------
// evolve

struct EvolveArgs {
    std::string data;
    std::string model;
    std::string out_dir;
    std::string code = "all";
    int population = 200;
    int survivors = 40;
    int offspring = 160;
    int generations = 40;
    int delay_tolerance = 5;
    int workers = 1;
    double meta_rate = 0.1;
    bool conventional_rate = false;
};

int cmd_evolve(const EvolveArgs& args, std::uint64_t seed) {
    if (args.survivors + args.offspring != args.population)
        throw UsageError("survivors + offspring must equal population (" +
                         std::to_string(args.survivors) + " + " + std::to_string(args.offspring) +
                         " != " + std::to_string(args.population) + ")");
    if (args.generations < 1) throw UsageError("--generations must be at least 1");
    if (args.workers < 1) throw UsageError("--workers must be at least 1");

    cratos::LabeledDataset data = cratos::load_dataset(args.data);
    if (data.empty()) throw std::runtime_error("dataset is empty");
    for (const auto& e : data.entries())
        if (!e.labels)
            throw std::runtime_error("series \"" + e.name +
                                     "\" has no labels; evolve needs labeled data");
    cratos::ClusterTree tree = cratos::load_tree(args.model);

    std::array<std::vector<std::size_t>, 8> groups;
    for (std::size_t i = 0; i < data.size(); ++i) {
        cratos::ClusterCode code = cratos::hierarchical_predict(tree, data.entries()[i].series);
        groups[static_cast<std::size_t>(code.index())].push_back(i);
    }

    std::vector<cratos::ClusterCode> selected;
    if (args.code == "all") {
        for (cratos::ClusterCode code : cratos::ClusterCode::all())
            if (!groups[static_cast<std::size_t>(code.index())].empty()) selected.push_back(code);
    } else {
        cratos::ClusterCode code = cratos::ClusterCode::from_string(args.code);
        if (groups[static_cast<std::size_t>(code.index())].empty())
            throw std::runtime_error("no series assigned to code " + args.code);
        selected.push_back(code);
    }

    fs::path out(args.out_dir);
    fs::create_directories(out);

    cratos::GeneSpace space = cratos::make_pipeline_space(data.common_length());
    space.meta_rate = args.meta_rate;
    space.literal_rate_rule = !args.conventional_rate;

    json genome_files = json::object();
    for (cratos::ClusterCode code : selected) {
        const auto& members = groups[static_cast<std::size_t>(code.index())];
        std::vector<cratos::DatasetEntry> sub;
        sub.reserve(members.size());
        for (std::size_t i : members) sub.push_back(data.entries()[i]);
        cratos::LabeledDataset subset(std::move(sub));

        cratos::EvolutionConfig cfg;
        cfg.population = args.population;
        cfg.survivors = args.survivors;
        cfg.offspring = args.offspring;
        cfg.generations = args.generations;
        cfg.delay_tolerance = args.delay_tolerance;
        cfg.workers = args.workers;
        cfg.seed = cratos::mix_seed(seed, 0xe0e0, static_cast<std::uint64_t>(code.index()));
        cratos::EvolveResult result = cratos::evolve(space, cfg, subset);

        std::string code_str = code.to_string();
        std::string history_rel = "history_" + code_str + ".csv";
        {
            std::ofstream hist = open_out(out / history_rel);
            hist << "generation,best,mean\n";
            char buf[64];
            for (const auto& g : result.history) {
                std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", g.generation, g.best, g.mean);
                hist << buf;
            }
        }
        json gj;
        gj["format"] = "cratos-genome";
        gj["code"] = code_str;
        gj["series"] = members.size();
        gj["history"] = history_rel;
        gj["best"] = cratos::genome_to_json(result.best);
        gj["pass_rate"] =
            cratos::pass_rate(*result.best.fitness, static_cast<int>(members.size()));
        std::string genome_rel = "genome_" + code_str + ".json";
        open_out(out / genome_rel) << gj.dump(2) << '\n';
        genome_files[code_str] = genome_rel;

        std::cout << code_str << ": best " << *result.best.fitness << "/" << members.size()
                  << " pass rate "
                  << cratos::pass_rate(*result.best.fitness, static_cast<int>(members.size()))
                  << "\n";
    }

    json run;
    run["format"] = "cratos-run";
    run["version"] = cratos::kVersion;
    run["seed"] = seed;
    run["dataset"] = args.data;
    run["model"] = args.model;
    run["genomes"] = genome_files;
    open_out(out / "run_manifest.json") << run.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
    std::string series;
    std::string model;
    std::string genomes_dir;
    std::string run_manifest;
    std::string out_csv;
};

int cmd_detect(const DetectArgs& args) {
    fs::path model_path;
    std::map<std::string, fs::path> genome_paths;
    if (!args.run_manifest.empty()) {
        json run = load_json(args.run_manifest);
        if (run.value("format", "") != "cratos-run")
            throw std::runtime_error("\"" + args.run_manifest + "\" is not a run manifest");
        fs::path base = fs::path(args.run_manifest).parent_path();
        // The model path is stored as given to evolve, so it resolves against
        // the invoking directory; genome paths are relative to the manifest.
        model_path = run.at("model").get<std::string>();
        for (const auto& [code, rel] : run.at("genomes").items())
            genome_paths[code] = base / rel.get<std::string>();
    } else {
        if (args.model.empty() || args.genomes_dir.empty())
            throw UsageError("detect needs either --run or both --model and --genomes");
        model_path = args.model;
        for (cratos::ClusterCode code : cratos::ClusterCode::all())
            genome_paths[code.to_string()] =
                fs::path(args.genomes_dir) / ("genome_" + code.to_string() + ".json");
    }

    cratos::ClusterTree tree = cratos::load_tree(model_path);
    cratos::TimeSeries series = cratos::load_series(args.series);
    cratos::ClusterCode code = cratos::hierarchical_predict(tree, series);

    auto it = genome_paths.find(code.to_string());
    if (it == genome_paths.end() || !fs::exists(it->second))
        throw std::runtime_error("no genome for code " + code.to_string() +
                                 (it == genome_paths.end() ? "" : " at \"" + it->second.string() + "\""));
    json gj = load_json(it->second);
    cratos::PipelineConfig cfg;
    if (gj.contains("best"))
        cfg = cratos::decode_pipeline(cratos::genome_from_json(gj.at("best")));
    else
        cfg = cratos::pipeline_from_json(gj.at("pipeline"));

    cratos::DetectionResult result = cratos::run_pipeline(cfg, series);

    if (!args.out_csv.empty()) {
        fs::path out_path(args.out_csv);
        if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
        std::ofstream out = open_out(out_path);
        out << "index,detector\n";
        for (cratos::DetectorKind k : cfg.detectors)
            for (std::size_t i : result.per_detector.at(k))
                out << i << ',' << cratos::to_string(k) << '\n';
    }
    std::cout << "code: " << code.to_string() << "\n";
    std::cout << "anomalies: " << result.anomalous_indices.size() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string predictions;
    std::string truth;
    std::string out_prefix;
};

int cmd_eval(const EvalArgs& args) {
    std::ifstream in(args.predictions);
    if (!in) throw std::runtime_error("cannot open \"" + args.predictions + "\"");
    std::map<std::string, cratos::ClusterCode> predicted;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line == "series,code") continue;
        auto comma = line.rfind(',');
        if (comma == std::string::npos)
            throw std::runtime_error("expected \"series,code\" at line " +
                                     std::to_string(line_no) + " of \"" + args.predictions + "\"");
        predicted[line.substr(0, comma)] =
            cratos::ClusterCode::from_string(line.substr(comma + 1));
    }

    std::vector<cratos::ManifestEntry> manifest = cratos::load_manifest(args.truth);
    std::vector<cratos::ClusterCode> pred, truth;
    for (const auto& e : manifest) {
        if (!e.code)
            throw std::runtime_error("manifest entry \"" + e.series + "\" has no truth code");
        auto it = predicted.find(e.series);
        if (it == predicted.end())
            throw std::runtime_error("no prediction for series \"" + e.series + "\"");
        pred.push_back(it->second);
        truth.push_back(*e.code);
    }
    cratos::ClusteringReport report = cratos::clustering_report(pred, truth);

    if (!args.out_prefix.empty()) {
        fs::path json_path(args.out_prefix + ".json");
        if (json_path.has_parent_path()) fs::create_directories(json_path.parent_path());
        open_out(json_path) << cratos::report_to_json(report).dump(2) << '\n';
        open_out(fs::path(args.out_prefix + ".txt")) << cratos::report_table(report);
    }
    std::cout << cratos::report_table(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behaviour-clustered anomaly detection for service KPIs"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "Master seed for all randomness")
        ->envname("CRATOS_SEED");

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic labeled dataset");
    gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();
    gen_cmd->add_option("--spec", gen.spec_path, "JSON file overriding archetype parameters");
    gen_cmd->add_option("--per-cluster", gen.per_cluster, "Series per behaviour code");
    gen_cmd->add_option("--length", gen.length, "Points per series");
    gen_cmd->add_option("--anomalies", gen.anomalies, "Planted anomaly segments per series");

    ClusterArgs cluster;
    CLI::App* cluster_cmd = app.add_subcommand("cluster", "Fit the behaviour cluster tree");
    cluster_cmd->add_option("--data", cluster.data, "Dataset manifest")->required();
    cluster_cmd->add_option("--out", cluster.out_model, "Model output path")->required();
    cluster_cmd->add_option("--assignments", cluster.assignments,
                            "Assignments CSV path (default: assignments.csv beside the model)");

    EvolveArgs evolve;
    CLI::App* evolve_cmd =
        app.add_subcommand("evolve", "Evolve detection pipelines per behaviour cluster");
    evolve_cmd->add_option("--data", evolve.data, "Labeled dataset manifest")->required();
    evolve_cmd->add_option("--model", evolve.model, "Cluster tree model")->required();
    evolve_cmd->add_option("--out", evolve.out_dir, "Output directory")->required();
    evolve_cmd->add_option("--code", evolve.code, "Behaviour code to evolve, or \"all\"");
    evolve_cmd->add_option("--population", evolve.population, "Population size");
    evolve_cmd->add_option("--survivors", evolve.survivors, "Genomes kept each generation");
    evolve_cmd->add_option("--offspring", evolve.offspring, "Children created each generation");
    evolve_cmd->add_option("--generations", evolve.generations, "Generations to run");
    evolve_cmd->add_option("--delay-tolerance", evolve.delay_tolerance,
                           "Points within which a segment must be flagged");
    evolve_cmd->add_option("--workers", evolve.workers, "Concurrent fitness workers");
    evolve_cmd->add_option("--meta-rate", evolve.meta_rate, "Step size for rate self-adaptation");
    evolve_cmd->add_flag("--conventional-rate", evolve.conventional_rate,
                         "Mutate when r < rate instead of the literal r > rate");

    DetectArgs detect;
    CLI::App* detect_cmd = app.add_subcommand("detect", "Classify a series and run its pipeline");
    detect_cmd->add_option("--series", detect.series, "Series CSV")->required();
    detect_cmd->add_option("--model", detect.model, "Cluster tree model");
    detect_cmd->add_option("--genomes", detect.genomes_dir, "Directory of evolved genomes");
    detect_cmd->add_option("--run", detect.run_manifest, "Run manifest from evolve");
    detect_cmd->add_option("--out", detect.out_csv, "Detection result CSV");

    EvalArgs eval;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Score predicted codes against truth");
    eval_cmd->add_option("--pred", eval.predictions, "Assignments CSV")->required();
    eval_cmd->add_option("--truth", eval.truth, "Manifest with truth codes")->required();
    eval_cmd->add_option("--out-prefix", eval.out_prefix, "Write <prefix>.json and <prefix>.txt");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen, seed);
        if (cluster_cmd->parsed()) return cmd_cluster(cluster, seed);
        if (evolve_cmd->parsed()) return cmd_evolve(evolve, seed);
        if (detect_cmd->parsed()) return cmd_detect(detect);
        if (eval_cmd->parsed()) return cmd_eval(eval);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
