#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "kr/error.hpp"
#include "kr/matching.hpp"
#include "kr/series.hpp"
#include "kr/store.hpp"

namespace kr {

/// Best alignment of one stored instance segment inside the analyzed series.
struct MatchResult {
    std::string instance;
    std::string device;
    double d_min = 0.0;
    std::size_t position = 0;

    bool operator==(const MatchResult&) const = default;
};

struct InstanceMatch {
    std::vector<MatchResult> results;
    /// Instance devices that could not be matched (absent or too short).
    std::vector<std::string> skipped;
};

/// Matches every segment of `instance` against the same device in `data`.
/// Throws DataError when no device can be matched.
inline InstanceMatch match_instance(const StoredInstance& instance, const SeriesMap& data,
                                    ts::MatchMode mode = ts::MatchMode::Accelerated) {
    InstanceMatch out;
    for (const auto& [device, segment] : instance.segments) {
        auto it = data.find(device);
        if (it == data.end() || segment.size() < 2 || segment.size() > it->second.size()) {
            out.skipped.push_back(device);
            continue;
        }
        auto m = ts::sliding_min_distance(segment.readings, it->second.readings, mode);
        out.results.push_back({instance.id, device, m.d_min, m.position});
    }
    if (out.results.empty())
        throw DataError("instance '" + instance.id + "' shares no matchable device with the analyzed data");
    return out;
}

/// (instance, device) -> MatchResult for one analyzed dataset.
/// Single writer at a time, many concurrent readers.
class MatchCache {
public:
    std::optional<MatchResult> get(const std::string& instance, const std::string& device) const {
        std::shared_lock lock(mutex_);
        auto it = entries_.find({instance, device});
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void put(const MatchResult& r) {
        std::unique_lock lock(mutex_);
        entries_[{r.instance, r.device}] = r;
    }

    bool contains_instance(const std::string& instance) const {
        std::shared_lock lock(mutex_);
        auto it = entries_.lower_bound({instance, std::string()});
        return it != entries_.end() && it->first.first == instance;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return entries_.size();
    }

    bool empty() const { return size() == 0; }

    void clear() {
        std::unique_lock lock(mutex_);
        entries_.clear();
    }

    /// Looks up (instance, device), computing and caching it on a miss.
    /// Returns nullopt when the device cannot be matched.
    std::optional<MatchResult> get_or_compute(const StoredInstance& instance, const std::string& device,
                                              const SeriesMap& data) {
        if (auto hit = get(instance.id, device)) return hit;
        auto seg = instance.segments.find(device);
        auto series = data.find(device);
        if (seg == instance.segments.end() || series == data.end()) return std::nullopt;
        if (seg->second.size() < 2 || seg->second.size() > series->second.size()) return std::nullopt;
        auto m = ts::sliding_min_distance(seg->second.readings, series->second.readings);
        MatchResult r{instance.id, device, m.d_min, m.position};
        put(r);
        return r;
    }

private:
    std::map<std::pair<std::string, std::string>, MatchResult> entries_;
    mutable std::shared_mutex mutex_;
};

}  // namespace kr
