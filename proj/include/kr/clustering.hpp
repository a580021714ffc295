#pragma once

// Device ordering for the time slider: average-linkage clustering on
// correlation distance, cut into flat clusters with the inconsistency
// criterion (same definitions as scipy.cluster.hierarchy).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "kr/error.hpp"
#include "kr/series.hpp"

namespace kr::ts {

struct ClusterConfig {
    std::size_t depth = 2;
    double threshold = 1.15;
    /// Nodes merged above this distance never form one flat cluster
    /// (1.0 requires positive correlation).
    double max_distance = 1.0;
};

struct ClusteredDevice {
    std::string device;
    std::size_t cluster = 0;
    bool zero_variance = false;
};

/// One merge step: children use scipy ids (leaves 0..n-1, merges n+i).
struct Link {
    std::size_t left;
    std::size_t right;
    double distance;
    std::size_t count;
};

/// 1 - Pearson correlation.
inline double correlation_distance(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return std::clamp(1.0 - sab / std::sqrt(saa * sbb), 0.0, 2.0);
}

/// UPGMA over a full distance matrix; ties go to the lowest cluster ids.
inline std::vector<Link> average_linkage(const std::vector<std::vector<double>>& dist) {
    const std::size_t n = dist.size();
    std::vector<Link> links;
    if (n < 2) return links;
    std::vector<std::size_t> id(n), size(n, 1);
    std::vector<bool> active(n, true);
    for (std::size_t i = 0; i < n; ++i) id[i] = i;
    auto d = dist;
    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                if (d[i][j] < best) {
                    best = d[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        const std::size_t a = std::min(id[bi], id[bj]);
        const std::size_t b = std::max(id[bi], id[bj]);
        links.push_back({a, b, best, size[bi] + size[bj]});
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == bi || k == bj) continue;
            const double v = (d[bi][k] * static_cast<double>(size[bi]) + d[bj][k] * static_cast<double>(size[bj])) /
                             static_cast<double>(size[bi] + size[bj]);
            d[bi][k] = d[k][bi] = v;
        }
        active[bj] = false;
        size[bi] += size[bj];
        id[bi] = n + step;
    }
    return links;
}

/// Inconsistency coefficient per link: (height - mean) / std over the link and
/// the links below it up to `depth` levels (sample std, 0 when undefined).
inline std::vector<double> inconsistency(const std::vector<Link>& links, std::size_t depth) {
    const std::size_t n = links.size() + 1;
    std::vector<double> coeff(links.size(), 0.0);
    for (std::size_t i = 0; i < links.size(); ++i) {
        std::vector<double> heights;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{i, 1}};
        while (!stack.empty()) {
            auto [node, level] = stack.back();
            stack.pop_back();
            heights.push_back(links[node].distance);
            if (level >= depth) continue;
            for (std::size_t child : {links[node].left, links[node].right})
                if (child >= n) stack.push_back({child - n, level + 1});
        }
        double mean = 0.0;
        for (double h : heights) mean += h;
        mean /= static_cast<double>(heights.size());
        double ss = 0.0;
        for (double h : heights) ss += (h - mean) * (h - mean);
        const double sd = heights.size() > 1 ? std::sqrt(ss / static_cast<double>(heights.size() - 1)) : 0.0;
        coeff[i] = sd > 0.0 ? (links[i].distance - mean) / sd : 0.0;
    }
    return coeff;
}

/// Dendrogram leaf order (left child first).
inline std::vector<std::size_t> leaf_order(const std::vector<Link>& links) {
    const std::size_t n = links.size() + 1;
    if (links.empty()) return {0};
    std::vector<std::size_t> order;
    std::vector<std::size_t> stack{2 * n - 2};
    while (!stack.empty()) {
        const std::size_t node = stack.back();
        stack.pop_back();
        if (node < n) {
            order.push_back(node);
        } else {
            stack.push_back(links[node - n].right);
            stack.push_back(links[node - n].left);
        }
    }
    return order;
}

/// Flat cluster label per leaf (labels in leaf order of first appearance).
inline std::vector<std::size_t> flat_clusters(const std::vector<Link>& links, const ClusterConfig& cfg) {
    const std::size_t n = links.size() + 1;
    if (links.empty()) return {0};
    const auto coeff = inconsistency(links, cfg.depth);
    // Max inconsistency over each subtree; links are in merge order so
    // children come first.
    std::vector<double> worst(links.size());
    for (std::size_t i = 0; i < links.size(); ++i) {
        double w = coeff[i];
        if (links[i].distance > cfg.max_distance) w = std::numeric_limits<double>::infinity();
        for (std::size_t child : {links[i].left, links[i].right})
            if (child >= n) w = std::max(w, worst[child - n]);
        worst[i] = w;
    }

    std::vector<std::size_t> label(n, 0);
    std::size_t next = 0;
    std::vector<std::size_t> stack{2 * n - 2};
    auto mark = [&](std::size_t node, std::size_t value) {
        std::vector<std::size_t> s{node};
        while (!s.empty()) {
            auto x = s.back();
            s.pop_back();
            if (x < n) {
                label[x] = value;
            } else {
                s.push_back(links[x - n].right);
                s.push_back(links[x - n].left);
            }
        }
    };
    while (!stack.empty()) {
        const std::size_t node = stack.back();
        stack.pop_back();
        if (node < n) {
            label[node] = next++;
        } else if (worst[node - n] <= cfg.threshold) {
            mark(node, next++);
        } else {
            stack.push_back(links[node - n].right);
            stack.push_back(links[node - n].left);
        }
    }
    return label;
}

/// Orders devices so that cluster members sit next to each other in
/// dendrogram leaf order. Zero-variance devices get singleton clusters at the end.
inline std::vector<ClusteredDevice> cluster_devices(const SeriesMap& series, const ClusterConfig& cfg = {}) {
    if (series.empty()) throw DataError("cluster_devices: no devices");
    const std::size_t len = series.begin()->second.size();
    std::vector<std::string> names;
    std::vector<std::string> flat;
    for (const auto& [name, s] : series) {
        if (s.size() != len) throw DataError("cluster_devices: series lengths differ; resample first");
        double lo = s.readings.front(), hi = lo;
        for (double v : s.readings) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (len < 2 || hi == lo)
            flat.push_back(name);
        else
            names.push_back(name);
    }

    std::vector<ClusteredDevice> out;
    std::size_t next_cluster = 0;
    if (!names.empty()) {
        const std::size_t n = names.size();
        std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                dist[i][j] = dist[j][i] =
                    correlation_distance(series.at(names[i]).readings, series.at(names[j]).readings);
        const auto links = average_linkage(dist);
        const auto labels = flat_clusters(links, cfg);
        for (std::size_t leaf : leaf_order(links)) {
            out.push_back({names[leaf], labels[leaf], false});
            next_cluster = std::max(next_cluster, labels[leaf] + 1);
        }
    }
    for (const auto& name : flat) out.push_back({name, next_cluster++, true});
    return out;
}

}  // namespace kr::ts
