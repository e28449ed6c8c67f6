#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cratos/time_series.hpp"

namespace cratos {

namespace detail {

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

inline double parse_double(const std::string& text, const std::filesystem::path& path,
                           std::size_t line_no) {
    const char* s = text.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s, &end);
    while (end && *end == ' ') ++end;
    if (end == s || (end && *end != '\0') || errno == ERANGE)
        throw std::runtime_error("cannot parse \"" + text + "\" as a number at line " +
                                 std::to_string(line_no) + " of \"" + path.string() + "\"");
    return v;
}

inline std::size_t parse_index(const std::string& text, const std::filesystem::path& path,
                               std::size_t line_no) {
    const char* s = text.c_str();
    char* end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || (end && *end != '\0') || errno == ERANGE || text.find('-') != std::string::npos)
        throw std::runtime_error("cannot parse \"" + text + "\" as an index at line " +
                                 std::to_string(line_no) + " of \"" + path.string() + "\"");
    return static_cast<std::size_t>(v);
}

// Shortest text that reloads to the same double.
inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// One value per row; a leading "value" header row is accepted and skipped.
inline TimeSeries load_series(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open \"" + path.string() + "\"");
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        if (line_no == 1 && line == "value") continue;
        double v = detail::parse_double(line, path, line_no);
        if (!std::isfinite(v))
            throw std::runtime_error("non-finite value at line " + std::to_string(line_no) +
                                     " of \"" + path.string() + "\"");
        values.push_back(v);
    }
    if (values.empty()) throw std::runtime_error("empty series in \"" + path.string() + "\"");
    return TimeSeries(std::move(values));
}

inline void save_series(const TimeSeries& ts, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open \"" + path.string() + "\" for writing");
    for (double v : ts.values()) out << detail::format_value(v) << '\n';
}

// Rows of "start,end" (half-open); a "start,end" header row is accepted.
inline AnomalyLabels load_labels(const std::filesystem::path& path, std::size_t series_length) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open \"" + path.string() + "\"");
    std::vector<LabelSegment> segments;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        if (line_no == 1 && line == "start,end") continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("expected \"start,end\" at line " + std::to_string(line_no) +
                                     " of \"" + path.string() + "\"");
        segments.push_back({detail::parse_index(line.substr(0, comma), path, line_no),
                            detail::parse_index(line.substr(comma + 1), path, line_no)});
    }
    try {
        return AnomalyLabels(std::move(segments), series_length);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string(e.what()) + " in \"" + path.string() + "\"");
    }
}

inline void save_labels(const AnomalyLabels& labels, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open \"" + path.string() + "\" for writing");
    out << "start,end\n";
    for (const auto& s : labels.segments()) out << s.start << ',' << s.end << '\n';
}

struct ManifestEntry {
    std::string series;                 // path relative to the manifest
    std::optional<std::string> labels;  // ditto
    std::optional<ClusterCode> code;
};

inline std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open \"" + path.string() + "\"");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("cannot parse \"" + path.string() + "\": " + e.what());
    }
    if (!j.is_array()) throw std::runtime_error("manifest \"" + path.string() + "\" must be a JSON array");
    std::vector<ManifestEntry> entries;
    for (const auto& item : j) {
        ManifestEntry e;
        e.series = item.at("series").get<std::string>();
        if (item.contains("labels")) e.labels = item.at("labels").get<std::string>();
        if (item.contains("code")) {
            try {
                e.code = ClusterCode::from_string(item.at("code").get<std::string>());
            } catch (const std::invalid_argument& err) {
                throw std::runtime_error("manifest \"" + path.string() + "\": " + err.what());
            }
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

inline void save_manifest(const std::vector<ManifestEntry>& entries,
                          const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json item;
        item["series"] = e.series;
        if (e.labels) item["labels"] = *e.labels;
        if (e.code) item["code"] = e.code->to_string();
        j.push_back(item);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open \"" + path.string() + "\" for writing");
    out << j.dump(2) << '\n';
}

// Loads every series (and optional labels/codes) referenced by a manifest;
// relative paths resolve against the manifest's directory.
inline LabeledDataset load_dataset(const std::filesystem::path& manifest_path) {
    std::vector<ManifestEntry> manifest = load_manifest(manifest_path);
    std::filesystem::path dir = manifest_path.parent_path();
    std::vector<DatasetEntry> entries;
    entries.reserve(manifest.size());
    for (const auto& m : manifest) {
        TimeSeries series = load_series(dir / m.series);
        std::optional<AnomalyLabels> labels;
        if (m.labels) labels = load_labels(dir / *m.labels, series.length());
        entries.push_back({m.series, std::move(series), std::move(labels), m.code});
    }
    return LabeledDataset(std::move(entries));
}

}  // namespace cratos
