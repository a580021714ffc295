#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kr/error.hpp"

namespace kr::ts {

struct PeriodConfig {
    std::size_t min_period = 8;  // samples
    double rho = 0.6;            // periodicity threshold on the autocorrelation score
};

struct PeriodEstimate {
    double period = 0.0;  // samples
    double score = 0.0;   // [0,1]
    bool periodic = false;
};

/// Normalized autocorrelation r(k) = sum x[i]x[i+k] / ((n-k) var) of the demeaned
/// input for lags 0..max_lag. Returns an empty vector for zero-variance input.
inline std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> c(n);
    double var = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = x[i] - mean;
        var += c[i] * c[i];
        scale = std::max(scale, std::abs(x[i]));
    }
    var /= static_cast<double>(n);
    if (var <= 1e-24 * std::max(1.0, scale * scale)) return {};
    std::vector<double> r(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) acc += c[i] * c[i + k];
        r[k] = acc / (static_cast<double>(n - k) * var);
    }
    return r;
}

/// Dominant period by autocorrelation: the first local maximum after the
/// first zero crossing that reaches 90% of the highest peak, refined by a
/// parabola through its neighbours.
inline PeriodEstimate estimate_period(std::span<const double> segment, const PeriodConfig& cfg = {}) {
    const std::size_t min_period = std::max<std::size_t>(cfg.min_period, 2);
    if (segment.size() < 4 * min_period)
        throw DataError("estimate_period: segment of " + std::to_string(segment.size()) + " samples is shorter than " +
                        std::to_string(4 * min_period));

    PeriodEstimate none{static_cast<double>(min_period), 0.0, false};
    const std::size_t max_lag = segment.size() / 2;
    const auto r = autocorrelation(segment, max_lag + 1);
    if (r.empty()) return none;

    std::size_t start = 1;
    while (start <= max_lag && r[start] > 0.0) ++start;
    start = std::max(start, min_period);
    if (start > max_lag) return none;

    std::vector<std::size_t> peaks;
    for (std::size_t k = std::max<std::size_t>(start, 1); k <= max_lag; ++k) {
        if (r[k] >= r[k - 1] && r[k] > r[k + 1]) peaks.push_back(k);
    }
    if (peaks.empty()) return none;
    double top = r[peaks.front()];
    for (auto k : peaks) top = std::max(top, r[k]);
    if (top <= 0.0) return none;
    std::size_t lag = peaks.front();
    for (auto k : peaks) {
        if (r[k] >= 0.9 * top) {
            lag = k;
            break;
        }
    }

    double period = static_cast<double>(lag);
    const double denom = r[lag - 1] - 2.0 * r[lag] + r[lag + 1];
    if (denom < 0.0) period += 0.5 * (r[lag - 1] - r[lag + 1]) / denom;

    const double score = std::clamp(r[lag], 0.0, 1.0);
    return {period, score, score >= cfg.rho};
}

/// Circular delay in [0, period) that best aligns the period-folded profile
/// of `after` with that of `before`: after[i] ~ before[i - offset].
inline double phase_offset(std::span<const double> before, std::span<const double> after, double period) {
    if (!(period > 1.0)) throw DataError("phase_offset: period must exceed 1 sample");
    const auto p = static_cast<std::size_t>(std::lround(period));
    if (before.size() < 2 * p || after.size() < 2 * p)
        throw DataError("phase_offset: both segments need at least two periods");

    auto fold = [p](std::span<const double> x) {
        std::vector<double> profile(p, 0.0);
        std::vector<std::size_t> count(p, 0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            profile[i % p] += x[i];
            ++count[i % p];
        }
        double mean = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            profile[j] /= static_cast<double>(count[j]);
            mean += profile[j];
        }
        mean /= static_cast<double>(p);
        for (auto& v : profile) v -= mean;
        return profile;
    };
    const auto fb = fold(before);
    const auto fa = fold(after);

    std::vector<double> xc(p);
    for (std::size_t s = 0; s < p; ++s) {
        double acc = 0.0;
        for (std::size_t j = 0; j < p; ++j) acc += fb[j] * fa[(j + s) % p];
        xc[s] = acc;
    }
    const std::size_t best = static_cast<std::size_t>(std::max_element(xc.begin(), xc.end()) - xc.begin());

    // Sub-sample refinement on the circular correlation.
    const double prev = xc[(best + p - 1) % p];
    const double next = xc[(best + 1) % p];
    const double denom = prev - 2.0 * xc[best] + next;
    double offset = static_cast<double>(best);
    if (denom < 0.0) offset += 0.5 * (prev - next) / denom;
    const double pd = static_cast<double>(p);
    offset = std::fmod(offset + pd, pd);
    return offset;
}

/// Drops a constant run at the front and/or back (a plateau between periods).
inline std::span<const double> trim_constant_runs(std::span<const double> x, bool front, bool back) {
    if (x.size() < 2) return x;
    double lo = *std::min_element(x.begin(), x.end());
    double hi = *std::max_element(x.begin(), x.end());
    const double eps = 1e-9 * std::max(hi - lo, 1e-300);
    std::size_t b = 0, e = x.size();
    if (front) {
        while (b + 1 < e && std::abs(x[b + 1] - x[b]) <= eps) ++b;
    }
    if (back) {
        while (e - 1 > b && std::abs(x[e - 1] - x[e - 2]) <= eps) --e;
    }
    return x.subspan(b, e - b);
}

}  // namespace kr::ts
