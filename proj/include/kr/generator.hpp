#pragma once

// Synthetic plant recordings with labelled anomaly injections. Each device is
// a noisy periodic wave; injections change readings and raise ratings over
// their interval, and the ground truth names the expected ontology leaf.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kr/error.hpp"
#include "kr/series.hpp"

namespace kr::gen {

enum class Kind { High, Low, PhaseShift, FreqChange, PeriodDisrupt, PatternDisrupt, FalsePositive };

inline constexpr Kind kAllKinds[] = {Kind::High,          Kind::Low,           Kind::PhaseShift,   Kind::FreqChange,
                                     Kind::PeriodDisrupt, Kind::PatternDisrupt, Kind::FalsePositive};

inline std::string_view to_string(Kind k) {
    switch (k) {
        case Kind::High: return "high";
        case Kind::Low: return "low";
        case Kind::PhaseShift: return "phase-shift";
        case Kind::FreqChange: return "freq-change";
        case Kind::PeriodDisrupt: return "period-disrupt";
        case Kind::PatternDisrupt: return "pattern-disrupt";
        case Kind::FalsePositive: return "false-positive";
    }
    return "";
}

inline std::optional<Kind> parse_kind(std::string_view s) {
    for (auto k : kAllKinds)
        if (to_string(k) == s) return k;
    return std::nullopt;
}

/// Ontology leaf id an injection of this kind should classify to.
inline std::string_view expected_class(Kind k) {
    switch (k) {
        case Kind::High:
        case Kind::Low: return "AbnormalValues";
        case Kind::PhaseShift: return "PhaseShift";
        case Kind::FreqChange: return "FrequencyChange";
        case Kind::PeriodDisrupt: return "PeriodDisrupt";
        case Kind::PatternDisrupt: return "PatternDisrupt";
        case Kind::FalsePositive: return "FalsePositive";
    }
    return "";
}

/// Display name of expected_class(k) in the shipped incident ontology.
inline std::string_view expected_name(Kind k) {
    switch (k) {
        case Kind::High:
        case Kind::Low: return "Abnormal Values";
        case Kind::PhaseShift: return "Phase Shift";
        case Kind::FreqChange: return "Frequency Change";
        case Kind::PeriodDisrupt: return "Period Disrupt";
        case Kind::PatternDisrupt: return "Pattern Disrupt";
        case Kind::FalsePositive: return "False Positive";
    }
    return "";
}

struct Injection {
    Kind kind = Kind::High;
    std::string device;  // name ("d03") or index ("3")
    std::size_t start = 0;
    std::size_t length = 200;
};

/// Parses "<kind>@<device>:<t>[:<length>]".
inline Injection parse_injection(std::string_view text) {
    const auto at = text.find('@');
    const auto colon = text.find(':', at == std::string_view::npos ? 0 : at);
    if (at == std::string_view::npos || colon == std::string_view::npos)
        throw DataError("injection '" + std::string(text) + "' must look like kind@device:t[:length]");
    Injection inj;
    auto kind = parse_kind(text.substr(0, at));
    if (!kind) throw DataError("unknown injection kind '" + std::string(text.substr(0, at)) + "'");
    inj.kind = *kind;
    inj.device = std::string(text.substr(at + 1, colon - at - 1));
    auto rest = text.substr(colon + 1);
    const auto colon2 = rest.find(':');
    try {
        inj.start = std::stoul(std::string(rest.substr(0, colon2)));
        if (colon2 != std::string_view::npos) inj.length = std::stoul(std::string(rest.substr(colon2 + 1)));
    } catch (const std::exception&) {
        throw DataError("injection '" + std::string(text) + "' has a malformed time");
    }
    if (inj.length < 1) throw DataError("injection length must be positive");
    return inj;
}

struct GenConfig {
    std::size_t devices = 4;
    std::size_t steps = 20000;
    std::uint64_t seed = 1;
    double t0 = 1.5e9;
    double dt = 1.0;
    std::vector<Injection> injections;
};

struct TruthEntry {
    Kind kind;
    std::string device;
    std::size_t start;
    std::size_t end;
    std::string expected_class;
    std::optional<std::string> qualifier;
    double period_before = 0.0;
    double period_after = 0.0;
    double shift_samples = 0.0;
};

struct Generated {
    Dataset data;
    std::vector<TruthEntry> truth;
    std::uint64_t seed = 0;
};

inline std::string device_name(std::size_t i) {
    std::string digits = std::to_string(i);
    if (digits.size() < 2) digits.insert(0, 2 - digits.size(), '0');
    return "d" + digits;
}

namespace detail {

inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t device, std::uint64_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(device), static_cast<std::uint32_t>(purpose)};
    return std::mt19937_64(seq);
}

}  // namespace detail

inline Generated generate(const GenConfig& cfg) {
    if (cfg.devices < 1) throw DataError("gen-data: need at least one device");
    if (cfg.steps < 2) throw DataError("gen-data: need at least two steps");

    Generated out;
    out.seed = cfg.seed;
    out.data.t0 = cfg.t0;
    out.data.dt = cfg.dt;

    // Resolve injection devices and reject overlaps per device.
    std::vector<std::vector<Injection>> per_device(cfg.devices);
    for (auto inj : cfg.injections) {
        std::size_t idx = cfg.devices;
        for (std::size_t d = 0; d < cfg.devices; ++d)
            if (device_name(d) == inj.device) idx = d;
        if (idx == cfg.devices) {
            try {
                std::size_t used = 0;
                idx = std::stoul(inj.device, &used);
                if (used != inj.device.size()) idx = cfg.devices;
            } catch (const std::exception&) {
                idx = cfg.devices;
            }
        }
        if (idx >= cfg.devices) throw DataError("injection targets unknown device '" + inj.device + "'");
        if (inj.start + inj.length > cfg.steps)
            throw DataError("injection " + std::string(to_string(inj.kind)) + " at " + std::to_string(inj.start) +
                            " runs past the end of the series");
        inj.device = device_name(idx);
        for (const auto& other : per_device[idx]) {
            if (inj.start < other.start + other.length && other.start < inj.start + inj.length)
                throw DataError("overlapping injections on device '" + inj.device + "'");
        }
        per_device[idx].push_back(inj);
    }

    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t d = 0; d < cfg.devices; ++d) {
        auto& injections = per_device[d];
        std::sort(injections.begin(), injections.end(),
                  [](const Injection& a, const Injection& b) { return a.start < b.start; });

        auto params = detail::stream(cfg.seed, d, 0);
        auto noise = detail::stream(cfg.seed, d, 1);
        auto rating_rng = detail::stream(cfg.seed, d, 2);
        auto inject_rng = detail::stream(cfg.seed, d, 3);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        const double base_period = std::floor(30.0 + 31.0 * unit(params));  // 30..60 samples
        const double amplitude = 1.0 + 4.0 * unit(params);
        const double offset = 20.0 * unit(params);
        const double harmonic = 0.3 * unit(params);
        const double harmonic_phase = two_pi * unit(params);
        const double phase0 = two_pi * unit(params);
        const double sigma = 0.03 * amplitude;
        std::normal_distribution<double> gauss(0.0, sigma);

        const bool aperiodic = std::any_of(injections.begin(), injections.end(),
                                           [](const Injection& i) { return i.kind == Kind::PatternDisrupt; });

        DeviceSeries s;
        s.device = device_name(d);
        s.t0 = cfg.t0;
        s.dt = cfg.dt;
        s.readings.resize(cfg.steps);
        s.ratings.resize(cfg.steps);

        // Per-injection parameters drawn up front so the noise streams stay aligned.
        struct Effect {
            Injection inj;
            double shift = 0.0;   // radians
            double factor = 1.0;  // period multiplier
            double bump = 0.0;
        };
        std::vector<Effect> effects;
        for (const auto& inj : injections) {
            Effect e{inj};
            const double u = unit(inject_rng);
            const double v = unit(inject_rng);
            switch (inj.kind) {
                case Kind::PhaseShift: e.shift = two_pi * (0.25 + 0.5 * u); break;
                case Kind::FreqChange: e.factor = v < 0.5 ? 1.4 + 0.3 * u : 0.6 + 0.12 * u; break;
                case Kind::High: e.bump = (1.6 + 0.4 * u) * amplitude; break;
                case Kind::Low: e.bump = -(1.6 + 0.4 * u) * amplitude; break;
                default: break;
            }
            effects.push_back(e);
        }

        double phase = phase0;
        double period = base_period;
        bool noise_mode = aperiodic;
        std::size_t next = 0;                    // next effect to start
        const Effect* active = nullptr;          // effect whose interval covers t
        std::optional<double> hold;              // constant plateau value
        std::vector<double> period_before(effects.size(), base_period), period_after(effects.size(), base_period);

        for (std::size_t t = 0; t < cfg.steps; ++t) {
            if (active && t >= active->inj.start + active->inj.length) {
                if (active->inj.kind == Kind::PhaseShift) phase += active->shift;
                active = nullptr;
                hold.reset();
            }
            if (next < effects.size() && t == effects[next].inj.start) {
                active = &effects[next];
                period_before[next] = period;
                if (active->inj.kind == Kind::FreqChange) period *= active->factor;
                if (active->inj.kind == Kind::PeriodDisrupt) noise_mode = true;
                period_after[next] = period;
                ++next;
            }

            const double wave = std::sin(phase) + harmonic * std::sin(2.0 * phase + harmonic_phase);
            const double white = unit(noise) * 1.6 - 0.8;
            const double jitter = gauss(noise);
            double value = offset + (noise_mode ? amplitude * white : amplitude * wave) + jitter;

            double rating = 0.3 * unit(rating_rng);
            const double hot = 0.85 + 0.15 * unit(rating_rng);
            if (active) {
                rating = hot;
                const double frac = static_cast<double>(t - active->inj.start) / static_cast<double>(active->inj.length);
                switch (active->inj.kind) {
                    case Kind::High:
                    case Kind::Low: value += active->bump; break;
                    case Kind::PhaseShift:
                        if (!hold) hold = offset + amplitude * wave;
                        value = *hold;
                        break;
                    case Kind::PatternDisrupt:
                        value = offset + 0.6 * amplitude * std::sin(std::numbers::pi * frac);
                        break;
                    case Kind::FreqChange:
                    case Kind::PeriodDisrupt:
                        value -= jitter;  // keep in-band kinds inside the normal range
                        break;
                    default: break;
                }
            }
            s.readings[t] = value;
            s.ratings[t] = rating;
            phase += two_pi / period;
        }

        for (std::size_t i = 0; i < effects.size(); ++i) {
            const auto& e = effects[i];
            TruthEntry entry{e.inj.kind, s.device, e.inj.start, e.inj.start + e.inj.length,
                             std::string(expected_class(e.inj.kind)), std::nullopt, period_before[i], period_after[i],
                             0.0};
            if (e.inj.kind == Kind::High) entry.qualifier = "High";
            if (e.inj.kind == Kind::Low) entry.qualifier = "Low";
            if (e.inj.kind == Kind::PhaseShift) entry.shift_samples = e.shift / two_pi * period_after[i];
            out.truth.push_back(entry);
        }
        out.data.devices.push_back(s.device);
        out.data.series.emplace(s.device, std::move(s));
    }
    std::sort(out.truth.begin(), out.truth.end(), [](const TruthEntry& a, const TruthEntry& b) {
        return a.start != b.start ? a.start < b.start : a.device < b.device;
    });
    return out;
}

inline nlohmann::json truth_json(const Generated& g) {
    nlohmann::json inj = nlohmann::json::array();
    for (const auto& t : g.truth) {
        nlohmann::json e = {{"kind", to_string(t.kind)},
                            {"device", t.device},
                            {"start", t.start},
                            {"end", t.end},
                            {"expected_class", t.expected_class},
                            {"expected_name", expected_name(t.kind)},
                            {"period_before", t.period_before},
                            {"period_after", t.period_after}};
        if (t.qualifier) e["qualifier"] = *t.qualifier;
        if (t.kind == Kind::PhaseShift) e["shift_samples"] = t.shift_samples;
        inj.push_back(e);
    }
    return {{"seed", g.seed},
            {"devices", g.data.devices},
            {"steps", g.data.steps()},
            {"t0", g.data.t0},
            {"dt", g.data.dt},
            {"injections", inj}};
}

}  // namespace kr::gen
