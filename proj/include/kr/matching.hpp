#pragma once

// Z-normalized subsequence matching: the per-query column of a matrix
// profile, i.e. the minimal z-normalized Euclidean distance of a query
// against every window of a longer series.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>

#include "kr/error.hpp"

namespace kr::ts {

struct SlidingMatch {
    double d_min = 0.0;
    std::size_t position = 0;

    bool operator==(const SlidingMatch&) const = default;
};

enum class MatchMode { BruteForce, Accelerated };

namespace detail {

struct Moments {
    double mean;
    double stddev;  // population
};

inline Moments moments(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v;
    const double mean = sum / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(x.size()))};
}

// Constant inputs z-normalize to the zero vector.
inline double znorm_distance_unchecked(std::span<const double> a, std::span<const double> b) {
    const auto ma = moments(a);
    const auto mb = moments(b);
    const double ia = ma.stddev > 0.0 ? 1.0 / ma.stddev : 0.0;
    const double ib = mb.stddev > 0.0 ? 1.0 / mb.stddev : 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = (a[i] - ma.mean) * ia - (b[i] - mb.mean) * ib;
        acc += d * d;
    }
    return std::sqrt(acc);
}

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Sliding dot products dot[i] = sum_j query[j] * series[i + j].
inline std::vector<double> sliding_dot(std::span<const double> query, std::span<const double> series) {
    const std::size_t m = query.size();
    const std::size_t n = series.size();
    std::size_t size = 1;
    while (size < n + m) size <<= 1;
    const std::size_t bins = size / 2 + 1;

    double* rin = fftw_alloc_real(size);
    fftw_complex* qf = fftw_alloc_complex(bins);
    fftw_complex* sf = fftw_alloc_complex(bins);
    fftw_plan fwd_q, fwd_s, inv;
    {
        std::lock_guard lock(fftw_planner_mutex());
        fwd_q = fftw_plan_dft_r2c_1d(static_cast<int>(size), rin, qf, FFTW_ESTIMATE);
        fwd_s = fftw_plan_dft_r2c_1d(static_cast<int>(size), rin, sf, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(size), qf, rin, FFTW_ESTIMATE);
    }

    std::fill(rin, rin + size, 0.0);
    for (std::size_t j = 0; j < m; ++j) rin[j] = query[m - 1 - j];
    fftw_execute(fwd_q);
    std::fill(rin, rin + size, 0.0);
    std::copy(series.begin(), series.end(), rin);
    fftw_execute(fwd_s);
    for (std::size_t k = 0; k < bins; ++k) {
        const std::complex<double> a(qf[k][0], qf[k][1]);
        const std::complex<double> b(sf[k][0], sf[k][1]);
        const auto c = a * b;
        qf[k][0] = c.real();
        qf[k][1] = c.imag();
    }
    fftw_execute(inv);

    std::vector<double> dot(n - m + 1);
    const double scale = 1.0 / static_cast<double>(size);
    for (std::size_t i = 0; i < dot.size(); ++i) dot[i] = rin[i + m - 1] * scale;

    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_q);
        fftw_destroy_plan(fwd_s);
        fftw_destroy_plan(inv);
    }
    fftw_free(rin);
    fftw_free(qf);
    fftw_free(sf);
    return dot;
}

inline SlidingMatch sliding_brute(std::span<const double> query, std::span<const double> series) {
    const std::size_t m = query.size();
    SlidingMatch best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i + m <= series.size(); ++i) {
        const double d = znorm_distance_unchecked(query, series.subspan(i, m));
        if (d < best.d_min) best = {d, i};
    }
    return best;
}

// FFT distance profile as a prefilter; every window within a small margin of
// the profile minimum is re-evaluated with the exact kernel, so the result is
// the brute-force answer whenever the FFT error stays below the margin.
inline SlidingMatch sliding_accelerated(std::span<const double> query, std::span<const double> series) {
    const std::size_t m = query.size();
    const std::size_t n = series.size();
    const std::size_t windows = n - m + 1;
    const double md = static_cast<double>(m);

    // Center both inputs; z-normalized distances are shift invariant and the
    // FFT products lose less precision on centered data.
    const auto gq = moments(query);
    const auto gs = moments(series);
    std::vector<double> q(m), s(n);
    for (std::size_t j = 0; j < m; ++j) q[j] = query[j] - gq.mean;
    for (std::size_t i = 0; i < n; ++i) s[i] = series[i] - gs.mean;

    const auto qm = moments(q);
    const auto dot = sliding_dot(q, s);

    std::vector<long double> p1(n + 1, 0.0L), p2(n + 1, 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
        p1[i + 1] = p1[i] + s[i];
        p2[i + 1] = p2[i] + static_cast<long double>(s[i]) * s[i];
    }

    const double tiny = 1e-6 * std::max(gs.stddev, std::numeric_limits<double>::min());
    std::vector<double> d2(windows);
    std::vector<char> fragile(windows, 0);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < windows; ++i) {
        const long double mu = (p1[i + m] - p1[i]) / m;
        long double var = (p2[i + m] - p2[i]) / m - mu * mu;
        if (var < 0) var = 0;
        const double sigma = std::sqrt(static_cast<double>(var));
        double v;
        if (qm.stddev == 0.0) {
            v = sigma == 0.0 ? 0.0 : md;
        } else if (sigma <= tiny) {
            v = md;
            fragile[i] = 1;
        } else {
            double corr = (dot[i] - md * qm.mean * static_cast<double>(mu)) / (md * qm.stddev * sigma);
            corr = std::clamp(corr, -1.0, 1.0);
            v = 2.0 * md * (1.0 - corr);
        }
        d2[i] = v;
        best = std::min(best, v);
    }

    const double margin = 1e-7 * std::max(1.0, md);
    SlidingMatch result{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < windows; ++i) {
        if (d2[i] > best + margin && !fragile[i]) continue;
        const double d = znorm_distance_unchecked(query, series.subspan(i, m));
        if (d < result.d_min) result = {d, i};
    }
    return result;
}

}  // namespace detail

/// Euclidean distance between z-normalized copies (population std).
inline double znorm_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DataError("znorm_distance: length mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    if (a.size() < 2) throw DataError("znorm_distance: need at least 2 samples");
    return detail::znorm_distance_unchecked(a, b);
}

/// Minimal z-normalized distance of `query` over all windows of `series`;
/// ties resolve to the smallest position.
inline SlidingMatch sliding_min_distance(std::span<const double> query, std::span<const double> series,
                                         MatchMode mode = MatchMode::Accelerated) {
    if (query.size() < 2) throw DataError("sliding_min_distance: query needs at least 2 samples");
    if (query.size() > series.size())
        throw DataError("sliding_min_distance: query (" + std::to_string(query.size()) + ") longer than series (" +
                        std::to_string(series.size()) + ")");
    if (mode == MatchMode::BruteForce) return detail::sliding_brute(query, series);
    return detail::sliding_accelerated(query, series);
}

}  // namespace kr::ts
