#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kr/error.hpp"

namespace kr {

/// Uniformly sampled readings of one device plus per-step abnormality ratings.
struct DeviceSeries {
    std::string device;
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> readings;
    std::vector<double> ratings;

    std::size_t size() const { return readings.size(); }
    bool operator==(const DeviceSeries&) const = default;
};

/// Throws DataError when the series breaks its invariants.
inline void check_series(const DeviceSeries& s) {
    if (s.readings.empty()) throw DataError("series '" + s.device + "' is empty");
    if (s.readings.size() != s.ratings.size())
        throw DataError("series '" + s.device + "' has " + std::to_string(s.readings.size()) + " readings but " +
                        std::to_string(s.ratings.size()) + " ratings");
    if (!(s.dt > 0.0)) throw DataError("series '" + s.device + "' needs dt > 0");
    for (double r : s.ratings)
        if (!(r >= 0.0 && r <= 1.0)) throw DataError("series '" + s.device + "' has a rating outside [0,1]");
}

using SeriesMap = std::map<std::string, DeviceSeries>;

/// A multi-device recording on a shared time grid.
struct Dataset {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<std::string> devices;  // column order
    SeriesMap series;

    std::size_t steps() const { return devices.empty() ? 0 : series.at(devices.front()).size(); }
    const DeviceSeries& at(const std::string& device) const {
        auto it = series.find(device);
        if (it == series.end()) throw NotFound("unknown device '" + device + "'");
        return it->second;
    }
};

namespace detail {

inline void append_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline double parse_double(std::string_view field, std::size_t line, std::size_t column) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v))
        throw DataError("line " + std::to_string(line) + ": column " + std::to_string(column) +
                        ": not a number: '" + std::string(field) + "'");
    return v;
}

}  // namespace detail

/// Writes "timestamp,<dev>,<dev>__rating,..." with shortest round-trip decimals.
inline void write_csv(std::ostream& os, const Dataset& data) {
    std::string line = "timestamp";
    for (const auto& d : data.devices) line += "," + d + "," + d + "__rating";
    line += '\n';
    os << line;
    const std::size_t n = data.steps();
    std::vector<const DeviceSeries*> cols;
    for (const auto& d : data.devices) cols.push_back(&data.series.at(d));
    for (std::size_t i = 0; i < n; ++i) {
        line.clear();
        detail::append_double(line, data.t0 + static_cast<double>(i) * data.dt);
        for (const auto* s : cols) {
            line += ',';
            detail::append_double(line, s->readings[i]);
            line += ',';
            detail::append_double(line, s->ratings[i]);
        }
        line += '\n';
        os << line;
    }
}

/// Parses the dataset CSV. Errors carry the 1-based line number.
inline Dataset read_csv(std::istream& is) {
    Dataset data;
    std::string line;
    if (!std::getline(is, line)) throw DataError("line 1: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::size_t pos = 0;
        for (;;) {
            auto comma = line.find(',', pos);
            header.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    if (header.empty() || header[0] != "timestamp") throw DataError("line 1: first column must be 'timestamp'");
    if (header.size() < 3 || (header.size() - 1) % 2 != 0)
        throw DataError("line 1: expected pairs of '<device>,<device>__rating' columns");
    for (std::size_t c = 1; c < header.size(); c += 2) {
        const auto& dev = header[c];
        if (dev.empty() || header[c + 1] != dev + "__rating")
            throw DataError("line 1: column " + std::to_string(c + 2) + " must be '" + dev + "__rating'");
        if (data.series.count(dev)) throw DataError("line 1: duplicate device '" + dev + "'");
        data.devices.push_back(dev);
        data.series[dev].device = dev;
    }

    std::vector<DeviceSeries*> cols;
    for (const auto& d : data.devices) cols.push_back(&data.series[d]);
    std::vector<double> stamps;
    std::size_t lineno = 1;
    const std::size_t expected = header.size();
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string_view rest(line);
        std::size_t col = 0;
        for (;;) {
            auto comma = rest.find(',');
            auto field = rest.substr(0, comma);
            if (col >= expected)
                throw DataError("line " + std::to_string(lineno) + ": too many columns");
            double v = detail::parse_double(field, lineno, col + 1);
            if (col == 0) {
                stamps.push_back(v);
            } else {
                auto* s = cols[(col - 1) / 2];
                if ((col - 1) % 2 == 0) {
                    s->readings.push_back(v);
                } else {
                    if (v < 0.0 || v > 1.0)
                        throw DataError("line " + std::to_string(lineno) + ": rating outside [0,1]");
                    s->ratings.push_back(v);
                }
            }
            ++col;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (col != expected)
            throw DataError("line " + std::to_string(lineno) + ": expected " + std::to_string(expected) +
                            " columns, got " + std::to_string(col));
    }
    if (stamps.empty()) throw DataError("line 2: no data rows");
    data.t0 = stamps.front();
    data.dt = stamps.size() > 1 ? stamps[1] - stamps[0] : 1.0;
    if (!(data.dt > 0.0)) throw DataError("line 3: timestamps must increase");
    for (std::size_t i = 1; i < stamps.size(); ++i) {
        double expect = data.t0 + static_cast<double>(i) * data.dt;
        if (std::abs(stamps[i] - expect) > 1e-6 * std::max(1.0, data.dt))
            throw DataError("line " + std::to_string(i + 2) + ": non-uniform timestamp");
    }
    for (auto* s : cols) {
        s->t0 = data.t0;
        s->dt = data.dt;
    }
    return data;
}

}  // namespace kr
