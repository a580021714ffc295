#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kr/ontology.hpp"
#include "kr/series.hpp"

namespace test {

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path data_dir() { return KR_DATA_DIR; }

inline kr::Ontology sip_ontology() { return kr::parse_ontology(read_file(data_dir() / "sip_ontology.json")); }

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("kr_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::vector<double> sine(std::size_t n, double period, double phase = 0.0, double amp = 1.0) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = amp * std::sin(2.0 * std::numbers::pi * (static_cast<double>(i) + phase) / period);
    return out;
}

inline std::vector<double> noise(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> out(n);
    for (auto& v : out) v = u(rng);
    return out;
}

inline kr::DeviceSeries series(std::string device, std::vector<double> readings, double rating = 0.0) {
    kr::DeviceSeries s;
    s.device = std::move(device);
    s.t0 = 1.5e9;
    s.dt = 1.0;
    s.ratings.assign(readings.size(), rating);
    s.readings = std::move(readings);
    return s;
}

}  // namespace test
