#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "kr/error.hpp"
#include "kr/series.hpp"

namespace kr::ts {

/// Irregularly spaced subset of a series; `indices` point into the source.
struct SampledSeries {
    std::string device;
    std::vector<std::size_t> indices;
    std::vector<double> readings;
    std::vector<double> ratings;

    std::size_t size() const { return indices.size(); }
};

/// Min/max bucket reduction over [begin, end) of `s`. Emits at most
/// max_points + 1 points; each point carries its bucket's maximum rating, so
/// reading extremes and the rating maximum survive exactly.
inline SampledSeries downsample(const DeviceSeries& s, std::size_t max_points, std::size_t begin, std::size_t end) {
    if (max_points < 2) throw DataError("downsample: max_points must be at least 2");
    end = std::min(end, s.size());
    begin = std::min(begin, end);
    SampledSeries out;
    out.device = s.device;
    const std::size_t n = end - begin;
    if (n <= max_points) {
        for (std::size_t i = begin; i < end; ++i) {
            out.indices.push_back(i);
            out.readings.push_back(s.readings[i]);
            out.ratings.push_back(s.ratings[i]);
        }
        return out;
    }
    const std::size_t buckets = (max_points + 1) / 2;
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t lo = begin + b * n / buckets;
        const std::size_t hi = begin + (b + 1) * n / buckets;
        std::size_t imin = lo, imax = lo;
        double rmax = s.ratings[lo];
        for (std::size_t i = lo; i < hi; ++i) {
            if (s.readings[i] < s.readings[imin]) imin = i;
            if (s.readings[i] > s.readings[imax]) imax = i;
            rmax = std::max(rmax, s.ratings[i]);
        }
        const std::size_t first = std::min(imin, imax);
        const std::size_t second = std::max(imin, imax);
        out.indices.push_back(first);
        out.readings.push_back(s.readings[first]);
        out.ratings.push_back(rmax);
        if (second != first) {
            out.indices.push_back(second);
            out.readings.push_back(s.readings[second]);
            out.ratings.push_back(rmax);
        }
    }
    return out;
}

inline SampledSeries downsample(const DeviceSeries& s, std::size_t max_points) {
    return downsample(s, max_points, 0, s.size());
}

}  // namespace kr::ts
