#pragma once

// Callbacks of the incident ontology (callbackFalsePositiveCheck,
// callbackAnomalyType, callbackPeriodicTest, callbackDisruptType) and the
// normal-range estimator they rely on.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "kr/acting.hpp"
#include "kr/error.hpp"
#include "kr/match_cache.hpp"
#include "kr/matching.hpp"
#include "kr/periodicity.hpp"
#include "kr/series.hpp"
#include "kr/store.hpp"

namespace kr::sip {

inline constexpr const char* kFalsePositiveCheck = "callbackFalsePositiveCheck";
inline constexpr const char* kAnomalyType = "callbackAnomalyType";
inline constexpr const char* kPeriodicTest = "callbackPeriodicTest";
inline constexpr const char* kDisruptType = "callbackDisruptType";

/// A contiguous high-abnormality interval [start, end) on one device.
struct Incident {
    std::string device;
    std::size_t start = 0;
    std::size_t end = 0;
    std::vector<double> segment;
    std::vector<double> ratings;
    std::vector<double> pre_context;   // readings ending at start
    std::vector<double> post_context;  // readings starting at end

    std::string id() const { return device + "@" + std::to_string(start) + "-" + std::to_string(end); }
    std::size_t length() const { return end - start; }
};

/// Cuts an incident out of `series` with context windows of `context` samples.
inline Incident make_incident(const DeviceSeries& series, std::size_t start, std::size_t end, std::size_t context) {
    if (!(start < end) || end > series.size())
        throw DataError("incident interval [" + std::to_string(start) + "," + std::to_string(end) + ") is invalid");
    Incident inc;
    inc.device = series.device;
    inc.start = start;
    inc.end = end;
    auto r = std::span<const double>(series.readings);
    auto q = std::span<const double>(series.ratings);
    inc.segment.assign(r.begin() + start, r.begin() + end);
    inc.ratings.assign(q.begin() + start, q.begin() + end);
    const std::size_t pre = std::min(context, start);
    inc.pre_context.assign(r.begin() + (start - pre), r.begin() + start);
    const std::size_t post = std::min(context, series.size() - end);
    inc.post_context.assign(r.begin() + end, r.begin() + end + post);
    return inc;
}

struct SipConfig {
    double fp_distance = 1.0;                          // match distance for a false alert
    std::map<std::string, double> fp_distance_device;  // per-device override
    ts::PeriodConfig period;                           // min period, rho
    double period_tolerance = 0.05;
    std::string false_positive_class = "FalsePositive";

    double fp_threshold(const std::string& device) const {
        auto it = fp_distance_device.find(device);
        return it == fp_distance_device.end() ? fp_distance : it->second;
    }
};

/// Everything a callback may look at while classifying one incident.
struct IncidentContext {
    const Incident* incident = nullptr;
    const KnowledgeStore* store = nullptr;
    const SeriesMap* data = nullptr;
    const std::map<std::string, NormalRange>* ranges = nullptr;
    MatchCache* cache = nullptr;
    const SipConfig* config = nullptr;
};

namespace detail {

inline std::string num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

/// Linear-interpolated quantile of sorted data.
inline double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

/// Bounds from incident-free readings: [q0.1% - eps*span, q99.9% + eps*span].
inline NormalRange learn_normal_range(const DeviceSeries& training, double eps = 0.01) {
    if (training.readings.empty()) throw DataError("learn_normal_range: no training data for '" + training.device + "'");
    if (eps < 0.0) throw DataError("learn_normal_range: eps must be non-negative");
    auto sorted = training.readings;
    std::sort(sorted.begin(), sorted.end());
    const double span = sorted.back() - sorted.front();
    return {training.device, detail::quantile(sorted, 0.001) - eps * span, detail::quantile(sorted, 0.999) + eps * span};
}

/// Samples of `series` rated below `max_rating`.
inline DeviceSeries incident_free(const DeviceSeries& series, double max_rating) {
    DeviceSeries out;
    out.device = series.device;
    out.t0 = series.t0;
    out.dt = series.dt;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.ratings[i] < max_rating) {
            out.readings.push_back(series.readings[i]);
            out.ratings.push_back(series.ratings[i]);
        }
    }
    return out;
}

/// Distance between a stored segment and an incident window: the shorter one
/// slides over the longer one.
inline double segment_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() > b.size()) std::swap(a, b);
    return ts::sliding_min_distance(a, b).d_min;
}

inline CallbackResult false_positive_check(const IncidentContext& ctx) {
    if (ctx.store == nullptr) throw DataError("knowledge store unavailable");
    const auto& inc = *ctx.incident;
    if (inc.segment.size() < 2) throw DataError("incident segment needs at least 2 samples");
    const auto& cfg = *ctx.config;

    const auto instances = ctx.store->snapshot();
    if (ctx.cache != nullptr && ctx.data != nullptr) {
        for (const auto& inst : instances)
            for (const auto& [device, seg] : inst->segments) ctx.cache->get_or_compute(*inst, device, *ctx.data);
    }

    const Label wanted{inc.device, cfg.false_positive_class};
    const StoredInstance* best = nullptr;
    double best_d = 0.0;
    for (const auto& inst : instances) {
        if (!inst->labels.count(wanted)) continue;
        auto seg = inst->segments.find(inc.device);
        if (seg == inst->segments.end() || seg->second.size() < 2) continue;
        const double d = segment_distance(seg->second.readings, inc.segment);
        if (best == nullptr || d < best_d) {
            best = inst.get();
            best_d = d;
        }
    }

    CallbackResult r;
    const bool hit = best != nullptr && best_d <= cfg.fp_threshold(inc.device);
    r.token = hit ? "True" : "False";
    if (best != nullptr) {
        r.diagnostics["fp.best_instance"] = best->id;
        r.diagnostics["fp.best_distance"] = detail::num(best_d);
    }
    return r;
}

inline CallbackResult anomaly_type(const IncidentContext& ctx) {
    const auto& inc = *ctx.incident;
    if (ctx.ranges == nullptr) throw DataError("no normal ranges available");
    auto it = ctx.ranges->find(inc.device);
    if (it == ctx.ranges->end()) throw NotFound("no normal range for device '" + inc.device + "'");
    const auto& range = it->second;

    double above = 0.0, below = 0.0;
    for (double v : inc.segment) {
        above = std::max(above, v - range.hi);
        below = std::max(below, range.lo - v);
    }
    CallbackResult r;
    if (above <= 0.0 && below <= 0.0) {
        r.token = "abnormal occurrence";
        return r;
    }
    const bool high = above >= below;
    r.token = "abnormal values";
    r.qualifier = high ? "High" : "Low";
    std::size_t first = inc.segment.size(), last = 0;
    for (std::size_t i = 0; i < inc.segment.size(); ++i) {
        const bool out = high ? inc.segment[i] > range.hi : inc.segment[i] < range.lo;
        if (out) {
            first = std::min(first, i);
            last = i;
        }
    }
    r.diagnostics["range.lo"] = detail::num(range.lo);
    r.diagnostics["range.hi"] = detail::num(range.hi);
    r.diagnostics["excursion"] = detail::num(high ? above : below);
    r.diagnostics["excursion.start"] = std::to_string(inc.start + first);
    r.diagnostics["excursion.end"] = std::to_string(inc.start + last + 1);
    return r;
}

inline CallbackResult periodic_test(const IncidentContext& ctx) {
    const auto& inc = *ctx.incident;
    const auto& pcfg = ctx.config->period;
    CallbackResult r;
    const std::span<const double> pre_full(inc.pre_context);
    const std::span<const double> post_full(inc.post_context);
    const auto pre = ts::trim_constant_runs(pre_full, false, true);
    const auto post = ts::trim_constant_runs(post_full, true, false);
    const std::size_t need = 4 * std::max<std::size_t>(pcfg.min_period, 2);
    if (pre.size() < need || post.size() < need) {
        r.token = "3";
        r.diagnostics["periodic.note"] = "insufficient context";
        return r;
    }
    const auto p_pre = ts::estimate_period(pre, pcfg);
    const auto p_post = ts::estimate_period(post, pcfg);
    r.diagnostics["period.pre"] = detail::num(p_pre.period);
    r.diagnostics["period.pre.score"] = detail::num(p_pre.score);
    r.diagnostics["period.post"] = detail::num(p_post.period);
    r.diagnostics["period.post.score"] = detail::num(p_post.score);
    if (!(p_pre.periodic && p_post.periodic)) {
        r.token = "3";
        return r;
    }
    if (std::abs(p_pre.period - p_post.period) > ctx.config->period_tolerance * p_pre.period) {
        r.token = "2";
        return r;
    }
    r.token = "1";
    const double period = 0.5 * (p_pre.period + p_post.period);
    const auto p = static_cast<double>(std::lround(period));
    if (pre.size() >= 2 * p && post.size() >= 2 * p && p > 1.0) {
        // Raw offset is relative to each slice's own start; convert to a shift
        // on the common time axis.
        const double raw = ts::phase_offset(pre, post, period);
        const double pre_start = static_cast<double>(inc.start - inc.pre_context.size());
        const double post_start = static_cast<double>(inc.end + (post.data() - post_full.data()));
        double shift = std::fmod(raw + (post_start - pre_start), p);
        if (shift < 0) shift += p;
        r.diagnostics["phase_offset"] = detail::num(shift);
    }
    return r;
}

inline CallbackResult disrupt_type(const IncidentContext& ctx) {
    const auto& inc = *ctx.incident;
    const auto& pcfg = ctx.config->period;
    CallbackResult r;
    const auto pre = ts::trim_constant_runs(std::span<const double>(inc.pre_context), false, true);
    bool periodic = false;
    if (pre.size() >= 4 * std::max<std::size_t>(pcfg.min_period, 2)) {
        const auto est = ts::estimate_period(pre, pcfg);
        periodic = est.periodic;
        r.diagnostics["disrupt.pre.period"] = detail::num(est.period);
        r.diagnostics["disrupt.pre.score"] = detail::num(est.score);
    }
    r.token = periodic ? "period" : "pattern";
    return r;
}

/// Registry with the four incident-ontology callbacks under their ontology names.
inline CallbackRegistry<IncidentContext> make_registry() {
    CallbackRegistry<IncidentContext> reg;
    reg.add(kFalsePositiveCheck, false_positive_check,
            "Matches every stored instance against the analyzed data and fills the match cache. Returns True when a "
            "stored False Positive instance of the same device lies within the false-positive distance of the "
            "incident window.",
            {"True", "False"});
    reg.add(kAnomalyType, anomaly_type,
            "Compares the incident readings with the device's normal range. Any reading outside it yields "
            "'abnormal values' typed High or Low by the larger excursion; otherwise 'abnormal occurrence'.",
            {"abnormal values", "abnormal occurrence"});
    reg.add(kPeriodicTest, periodic_test,
            "Estimates the period before and after the incident by autocorrelation. Both periodic with periods "
            "within 5% gives 1, both periodic with different periods gives 2, anything else gives 3.",
            {"1", "2", "3"});
    reg.add(kDisruptType, disrupt_type,
            "Returns 'period' when the series was periodic before the incident, otherwise 'pattern'.",
            {"pattern", "period"});
    return reg;
}

}  // namespace kr::sip
