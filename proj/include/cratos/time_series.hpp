#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cratos {

// Evenly spaced univariate series. Values are guaranteed finite and the
// series non-empty from construction onward.
class TimeSeries {
  public:
    explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw std::invalid_argument("TimeSeries: empty value list");
        for (double v : values_) {
            if (!std::isfinite(v)) throw std::invalid_argument("TimeSeries: non-finite value");
        }
    }

    std::size_t length() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

  private:
    std::vector<double> values_;
};

struct LabelSegment {
    std::size_t start = 0;  // inclusive
    std::size_t end = 0;    // exclusive

    bool operator==(const LabelSegment&) const = default;
};

// Half-open anomalous index ranges, kept sorted and non-overlapping.
class AnomalyLabels {
  public:
    AnomalyLabels() = default;

    AnomalyLabels(std::vector<LabelSegment> segments, std::size_t series_length)
        : segments_(std::move(segments)) {
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            const auto& s = segments_[i];
            if (s.start >= s.end)
                throw std::invalid_argument("AnomalyLabels: segment start must precede end");
            if (s.end > series_length)
                throw std::invalid_argument("AnomalyLabels: segment exceeds series length");
            if (i > 0 && segments_[i - 1].end > s.start)
                throw std::invalid_argument("AnomalyLabels: segments overlap or are unsorted");
        }
    }

    const std::vector<LabelSegment>& segments() const { return segments_; }
    bool empty() const { return segments_.empty(); }

    bool contains(std::size_t index) const {
        for (const auto& s : segments_) {
            if (index >= s.start && index < s.end) return true;
        }
        return false;
    }

  private:
    std::vector<LabelSegment> segments_;
};

// Three-letter behaviour code: periodic / large amplitude / dense impulses,
// each T or F. Index order matches the string read left to right.
struct ClusterCode {
    bool periodic = false;
    bool large_amplitude = false;
    bool dense_impulses = false;

    auto operator<=>(const ClusterCode&) const = default;

    std::string to_string() const {
        std::string s(3, 'F');
        if (periodic) s[0] = 'T';
        if (large_amplitude) s[1] = 'T';
        if (dense_impulses) s[2] = 'T';
        return s;
    }

    static ClusterCode from_string(std::string_view s) {
        if (s.size() != 3) throw std::invalid_argument("ClusterCode: need exactly 3 letters");
        ClusterCode c;
        bool* fields[3] = {&c.periodic, &c.large_amplitude, &c.dense_impulses};
        for (int i = 0; i < 3; ++i) {
            if (s[i] == 'T') *fields[i] = true;
            else if (s[i] == 'F') *fields[i] = false;
            else throw std::invalid_argument("ClusterCode: letters must be T or F");
        }
        return c;
    }

    int index() const {
        return (periodic ? 4 : 0) + (large_amplitude ? 2 : 0) + (dense_impulses ? 1 : 0);
    }

    static ClusterCode from_index(int i) {
        if (i < 0 || i > 7) throw std::invalid_argument("ClusterCode: index outside [0,7]");
        return ClusterCode{(i & 4) != 0, (i & 2) != 0, (i & 1) != 0};
    }

    static std::array<ClusterCode, 8> all() {
        std::array<ClusterCode, 8> out{};
        for (int i = 0; i < 8; ++i) out[i] = from_index(i);
        return out;
    }
};

struct DatasetEntry {
    std::string name;  // as referenced by the manifest, used in messages
    TimeSeries series;
    std::optional<AnomalyLabels> labels;
    std::optional<ClusterCode> truth_code;
};

// A collection of series sharing one length; labels and truth codes optional.
class LabeledDataset {
  public:
    LabeledDataset() = default;

    explicit LabeledDataset(std::vector<DatasetEntry> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) return;
        common_length_ = entries_.front().series.length();
        for (const auto& e : entries_) {
            if (e.series.length() != common_length_) {
                throw std::runtime_error("dataset length mismatch: \"" + entries_.front().name +
                                         "\" has " + std::to_string(common_length_) +
                                         " points but \"" + e.name + "\" has " +
                                         std::to_string(e.series.length()));
            }
        }
    }

    const std::vector<DatasetEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::size_t common_length() const { return common_length_; }

  private:
    std::vector<DatasetEntry> entries_;
    std::size_t common_length_ = 0;
};

}  // namespace cratos
