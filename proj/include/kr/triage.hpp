#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kr/acting.hpp"
#include "kr/match_cache.hpp"
#include "kr/series.hpp"
#include "kr/sip.hpp"
#include "kr/store.hpp"

namespace kr {

struct DetectionConfig {
    double warning = 0.5;
    double alert = 0.8;
    std::size_t min_len = 5;
    std::size_t gap = 10;
    std::size_t context = 1000;  // samples on each side
};

enum class Severity { Warning, Alert };

struct Mark {
    std::size_t start;
    std::size_t end;
    Severity level;

    bool operator==(const Mark&) const = default;
};

struct Detection {
    std::vector<sip::Incident> incidents;
    std::vector<Mark> marks;  // sorted, non-overlapping
};

/// Maximal runs of rating >= threshold; runs separated by fewer than `gap`
/// samples are merged and merged runs shorter than `min_len` dropped.
inline std::vector<std::pair<std::size_t, std::size_t>> threshold_runs(const std::vector<double>& ratings,
                                                                       double threshold, std::size_t min_len,
                                                                       std::size_t gap) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    const std::size_t n = ratings.size();
    for (std::size_t i = 0; i < n;) {
        if (ratings[i] < threshold) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && ratings[j] >= threshold) ++j;
        if (!runs.empty() && i - runs.back().second < gap)
            runs.back().second = j;
        else
            runs.emplace_back(i, j);
        i = j;
    }
    std::erase_if(runs, [&](const auto& r) { return r.second - r.first < min_len; });
    return runs;
}

inline Detection detect_incidents(const DeviceSeries& series, const DetectionConfig& cfg = {}) {
    if (!(0.0 <= cfg.warning && cfg.warning <= cfg.alert && cfg.alert <= 1.0))
        throw DataError("detect_incidents: need 0 <= warning <= alert <= 1");
    if (cfg.min_len < 1) throw DataError("detect_incidents: min_len must be at least 1");

    Detection out;
    const auto alerts = threshold_runs(series.ratings, cfg.alert, cfg.min_len, cfg.gap);
    for (const auto& [s, e] : alerts) out.incidents.push_back(sip::make_incident(series, s, e, cfg.context));

    // Warning marks are the warning runs with alert intervals cut out.
    const auto warnings = threshold_runs(series.ratings, cfg.warning, cfg.min_len, cfg.gap);
    for (const auto& [s, e] : warnings) {
        std::size_t cur = s;
        for (const auto& [as, ae] : alerts) {
            if (ae <= cur || as >= e) continue;
            if (as > cur) out.marks.push_back({cur, as, Severity::Warning});
            cur = std::max(cur, ae);
        }
        if (cur < e) out.marks.push_back({cur, e, Severity::Warning});
    }
    for (const auto& [s, e] : alerts) out.marks.push_back({s, e, Severity::Alert});
    std::sort(out.marks.begin(), out.marks.end(), [](const Mark& a, const Mark& b) { return a.start < b.start; });
    return out;
}

/// Normal ranges for every device in `data`: the stored range when the store
/// has one, otherwise one learned from the device's samples rated below
/// `warning`. Devices without any such samples are left out.
inline std::map<std::string, NormalRange> resolve_ranges(const KnowledgeStore* store, const SeriesMap& data,
                                                         double warning, double eps = 0.01) {
    std::map<std::string, NormalRange> out;
    std::map<std::string, NormalRange> stored;
    if (store != nullptr)
        stored = store->normal_ranges();
    for (const auto& [device, series] : data) {
        if (auto it = stored.find(device); it != stored.end()) {
            out[device] = it->second;
            continue;
        }
        auto training = sip::incident_free(series, warning);
        if (!training.readings.empty()) out[device] = sip::learn_normal_range(training, eps);
    }
    return out;
}

struct IncidentClassification {
    sip::Incident incident;
    std::optional<ClassificationResult> result;
    std::string error;  // set when a callback failed
};

struct TriageResult {
    LabelSet labels;  // (device, class) of every completed incident
    std::vector<IncidentClassification> items;
    std::vector<std::string> unclassified;  // incident ids needing manual classification

    std::map<Label, std::optional<std::string>> qualifiers() const {
        std::map<Label, std::optional<std::string>> out;
        for (const auto& it : items)
            if (it.result && it.result->complete)
                out[{it.incident.device, it.result->final_class}] = it.result->qualifier;
        return out;
    }
};

/// Runs every incident through the acting ontology. Failures stay local to
/// their incident.
inline TriageResult classify_incidents(const std::vector<sip::Incident>& incidents, const Ontology& ontology,
                                       const CallbackRegistry<sip::IncidentContext>& registry,
                                       const KnowledgeStore* store, const SeriesMap& data,
                                       const std::map<std::string, NormalRange>& ranges, MatchCache* cache,
                                       const sip::SipConfig& config) {
    TriageResult out;
    for (const auto& inc : incidents) {
        IncidentClassification item{inc, std::nullopt, {}};
        sip::IncidentContext ctx{&inc, store, &data, &ranges, cache, &config};
        try {
            item.result = classify(ontology, registry, ctx);
            if (item.result->complete)
                out.labels.insert({inc.device, item.result->final_class});
            else
                out.unclassified.push_back(inc.id());
        } catch (const ClassificationError& e) {
            item.error = e.what();
            out.unclassified.push_back(inc.id());
        }
        out.items.push_back(std::move(item));
    }
    return out;
}

struct DatasetTriage {
    std::map<std::string, std::vector<Mark>> marks;
    TriageResult result;
};

/// Detects incidents on every device of `data` and classifies them.
inline DatasetTriage triage_dataset(const Dataset& data, const Ontology& ontology,
                                    const CallbackRegistry<sip::IncidentContext>& registry,
                                    const KnowledgeStore* store, MatchCache* cache, const DetectionConfig& detection,
                                    const sip::SipConfig& config) {
    DatasetTriage out;
    std::vector<sip::Incident> found;
    for (const auto& dev : data.devices) {
        auto det = detect_incidents(data.series.at(dev), detection);
        for (auto& inc : det.incidents) found.push_back(std::move(inc));
        out.marks[dev] = std::move(det.marks);
    }
    const auto ranges = resolve_ranges(store, data.series, detection.warning);
    out.result = classify_incidents(found, ontology, registry, store, data.series, ranges, cache, config);
    return out;
}

enum class RankMode { Literal, Similarity };

struct Suggestion {
    std::string instance;
    double rank_value = 0.0;
    LabelSet matched_labels;
    std::size_t initial_offset = 0;

    bool operator==(const Suggestion&) const = default;
};

/// Ranks stored instances against the current label set. Literal mode sums
/// d_min over labels shared with `current`; similarity mode sums 1/(1+d_min). Highest
/// values first, ties by instance id; instances without shared labels are
/// dropped. Labels whose device cannot be matched contribute nothing.
inline std::vector<Suggestion> rank_instances(const LabelSet& current, const KnowledgeStore& store, MatchCache& cache,
                                              const SeriesMap& data, RankMode mode = RankMode::Literal,
                                              std::size_t k = 5) {
    std::vector<Suggestion> all;
    for (const auto& inst : store.snapshot()) {
        Suggestion s{inst->id, 0.0, {}, 0};
        double best_d = 0.0;
        std::string best_device;
        for (const auto& label : inst->labels) {
            if (!current.count(label)) continue;
            auto m = cache.get_or_compute(*inst, label.device, data);
            if (!m) continue;
            s.matched_labels.insert(label);
            s.rank_value += mode == RankMode::Literal ? m->d_min : 1.0 / (1.0 + m->d_min);
            if (best_device.empty() || m->d_min < best_d || (m->d_min == best_d && label.device < best_device)) {
                best_d = m->d_min;
                best_device = label.device;
                s.initial_offset = m->position;
            }
        }
        if (!s.matched_labels.empty()) all.push_back(std::move(s));
    }
    std::sort(all.begin(), all.end(), [](const Suggestion& a, const Suggestion& b) {
        if (a.rank_value != b.rank_value) return a.rank_value > b.rank_value;
        return a.instance < b.instance;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

}  // namespace kr
