#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wavecluster/errors.hpp"
#include "wavecluster/filtering.hpp"
#include "wavecluster/timeseries.hpp"
#include "wavecluster/transform.hpp"

namespace wavecluster {

/// Symmetric pairwise dissimilarities between prepared series.
struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<std::string> labels;
    std::vector<double> data; // row-major n*n

    double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
};

/// One agglomeration step. Leaves are ids 0..n-1; the cluster formed by
/// merge k gets id n+k.
struct Merge {
    std::size_t left_id = 0;
    std::size_t right_id = 0;
    double height = 0.0;
    std::size_t size = 0;
};

/// Ordered merge list of an agglomerative clustering; heights are
/// non-decreasing under Ward linkage.
struct Dendrogram {
    std::size_t n_leaves = 0;
    std::vector<Merge> merges;
};

/// Correlation distance 1 - pearson(x, y), in [0, 2].
inline double correlation_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("correlation_distance: length mismatch " + std::to_string(x.size()) +
                                    " vs " + std::to_string(y.size()));
    const auto n = x.size();
    if (n < 2) throw std::invalid_argument("correlation_distance: need at least 2 samples");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw DataError("correlation distance undefined for zero-variance input");
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return 1.0 - r;
}

/// Pairwise correlation distances; diagonal exactly zero, matrix symmetric.
inline DistanceMatrix distance_matrix(std::span<const std::pair<std::string, std::vector<double>>> series) {
    if (series.size() < 2) throw std::invalid_argument("distance_matrix: need at least 2 series");
    DistanceMatrix dm;
    dm.n = series.size();
    dm.data.assign(dm.n * dm.n, 0.0);
    for (const auto& [label, values] : series) {
        dm.labels.push_back(label);
        if (values.size() != series[0].second.size())
            throw std::invalid_argument("distance_matrix: series '" + label + "' has mismatched length");
    }
    for (std::size_t i = 0; i < dm.n; ++i)
        for (std::size_t j = i + 1; j < dm.n; ++j) {
            const double d = correlation_distance(series[i].second, series[j].second);
            dm.at(i, j) = d;
            dm.at(j, i) = d;
        }
    return dm;
}

inline void validate(const DistanceMatrix& dm) {
    if (dm.n < 2 || dm.data.size() != dm.n * dm.n)
        throw std::invalid_argument("distance matrix: need n >= 2 with n*n entries");
    for (std::size_t i = 0; i < dm.n; ++i) {
        if (dm.at(i, i) != 0.0) throw std::invalid_argument("distance matrix: nonzero diagonal");
        for (std::size_t j = i + 1; j < dm.n; ++j) {
            const double d = dm.at(i, j);
            if (!(d >= 0.0) || d != dm.at(j, i))
                throw std::invalid_argument("distance matrix: asymmetric or negative entry");
        }
    }
}

/// Agglomerative clustering with the Ward update. Cluster distances follow
/// the Lance-Williams recurrence in its square-root form,
///   d(k, i+j)^2 = ((n_i+n_k) d(k,i)^2 + (n_j+n_k) d(k,j)^2 - n_k d(i,j)^2)
///                 / (n_i+n_j+n_k),
/// treating the input distances as Euclidean — the usual convention when
/// Ward runs on a precomputed non-Euclidean matrix. The minimal pair merges
/// each step; ties break to the lexicographically smallest (left, right) id
/// pair, so results are platform-deterministic.
inline Dendrogram ward_linkage(const DistanceMatrix& dm) {
    validate(dm);
    const std::size_t n = dm.n;

    std::vector<std::size_t> ids(n);      // current cluster id per active slot
    std::vector<std::size_t> sizes(n, 1); // leaves each active cluster holds
    std::vector<bool> active(n, true);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    std::vector<double> work = dm.data; // mutated copy, indexed by slot

    Dendrogram out;
    out.n_leaves = n;
    out.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t best_i = 0, best_j = 0;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_left = 0, best_right = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                const double d = work[i * n + j];
                const std::size_t left = std::min(ids[i], ids[j]);
                const std::size_t right = std::max(ids[i], ids[j]);
                if (d < best || (d == best && (left < best_left || (left == best_left && right < best_right)))) {
                    best = d;
                    best_i = i;
                    best_j = j;
                    best_left = left;
                    best_right = right;
                }
            }
        }

        const double ni = static_cast<double>(sizes[best_i]);
        const double nj = static_cast<double>(sizes[best_j]);
        out.merges.push_back({best_left, best_right, best, sizes[best_i] + sizes[best_j]});

        // merged cluster lives in slot best_i
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == best_i || k == best_j) continue;
            const double nk = static_cast<double>(sizes[k]);
            const double dki = work[k * n + best_i];
            const double dkj = work[k * n + best_j];
            const double d2 = ((ni + nk) * dki * dki + (nj + nk) * dkj * dkj - nk * best * best) /
                              (ni + nj + nk);
            const double d = std::sqrt(std::max(0.0, d2));
            work[k * n + best_i] = d;
            work[best_i * n + k] = d;
        }
        sizes[best_i] += sizes[best_j];
        active[best_j] = false;
        ids[best_i] = n + step;
    }
    return out;
}

/// Labels after undoing the last k-1 merges; label numbering follows first
/// leaf appearance, so leaf 0 is always in cluster 0.
inline std::vector<int> cut(const Dendrogram& dendro, std::size_t k) {
    const std::size_t n = dendro.n_leaves;
    if (k < 1 || k > n) throw std::invalid_argument("cut: k must be in 1..n");

    // union-find over the first n-k merges
    std::vector<std::size_t> owner(2 * n - 1);
    for (std::size_t i = 0; i < owner.size(); ++i) owner[i] = i;
    auto find = [&](std::size_t v) {
        while (owner[v] != v) {
            owner[v] = owner[owner[v]];
            v = owner[v];
        }
        return v;
    };
    for (std::size_t m = 0; m + k < n; ++m) {
        const auto& merge = dendro.merges[m];
        const std::size_t root = n + m;
        owner[find(merge.left_id)] = root;
        owner[find(merge.right_id)] = root;
    }

    std::vector<int> labels(n, -1);
    std::map<std::size_t, int> label_of_root;
    int next = 0;
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        const std::size_t root = find(leaf);
        auto [it, inserted] = label_of_root.try_emplace(root, next);
        if (inserted) ++next;
        labels[leaf] = it->second;
    }
    return labels;
}

/// Fraction of sites whose two leaves merge with each other before either
/// joins any other leaf — i.e. some merge joins exactly those two leaves.
inline double pairing_purity(const Dendrogram& dendro, std::span<const std::string> site_of) {
    if (site_of.size() != dendro.n_leaves)
        throw std::invalid_argument("pairing_purity: need one site per leaf");
    std::map<std::string, std::size_t> counts;
    for (const auto& site : site_of) ++counts[site];
    for (const auto& [site, count] : counts)
        if (count != 2)
            throw std::invalid_argument("pairing_purity: site '" + site + "' has " + std::to_string(count) +
                                        " leaves, expected exactly 2");

    std::size_t paired = 0;
    for (const auto& merge : dendro.merges)
        if (merge.left_id < dendro.n_leaves && merge.right_id < dendro.n_leaves &&
            site_of[merge.left_id] == site_of[merge.right_id])
            ++paired;
    return static_cast<double>(paired) / static_cast<double>(counts.size());
}

/// Which representation of each series a clustering run works on.
struct ClusterVariant {
    enum class Kind { raw, smoothed, coefficients };
    Kind kind = Kind::raw;
    int smooth_level = 0; // S_l, for Kind::smoothed
    Band band;            // for Kind::coefficients

    static ClusterVariant raw() { return {Kind::raw, 0, {}}; }
    static ClusterVariant smoothed(int l) { return {Kind::smoothed, l, {}}; }
    static ClusterVariant coefficients(Band band) { return {Kind::coefficients, 0, band}; }

    std::string name(int level) const {
        switch (kind) {
            case Kind::raw: return "raw";
            case Kind::smoothed: return "S" + std::to_string(smooth_level);
            case Kind::coefficients: return "coeff:" + band_label(band, level);
        }
        return "?";
    }
};

/// Parses "raw", "S1".."SL", "coeff:cD1".."coeff:cDL", "coeff:cAL".
inline ClusterVariant parse_variant(const std::string& text, int level) {
    if (text == "raw") return ClusterVariant::raw();
    if (text.rfind("S", 0) == 0 && text.size() > 1) {
        try {
            std::size_t pos = 0;
            const int l = std::stoi(text.substr(1), &pos);
            if (pos == text.size() - 1 && l >= 1 && l <= level) return ClusterVariant::smoothed(l);
        } catch (const std::exception&) {
        }
        throw std::invalid_argument("variant '" + text + "' out of range for level " + std::to_string(level));
    }
    if (text.rfind("coeff:", 0) == 0) return ClusterVariant::coefficients(parse_band(text.substr(6), level));
    throw std::invalid_argument("unknown clustering variant '" + text +
                                "' (raw | S1..S" + std::to_string(level) + " | coeff:cD1.. | coeff:cA" +
                                std::to_string(level) + ")");
}

struct ClusterRunResult {
    std::string variant;
    DistanceMatrix distances;
    Dendrogram dendrogram;
    double purity = 0.0;
};

/// Full clustering run for one variant: transform each series (identity,
/// progressive smoothing, or a raw coefficient band), standardize with the
/// prepare_for_clustering contract, then distances + Ward + pairing purity.
inline ClusterRunResult cluster_run(std::span<const TimeSeries> series, const ClusterVariant& variant,
                                    const WaveletFilter& filter, int level, BoundaryMode mode) {
    if (series.size() < 2) throw std::invalid_argument("cluster_run: need at least 2 series");

    std::vector<std::pair<std::string, std::vector<double>>> prepared;
    std::vector<std::string> sites;
    prepared.reserve(series.size());
    for (const auto& ts : series) {
        std::vector<double> transformed;
        switch (variant.kind) {
            case ClusterVariant::Kind::raw:
                transformed = ts.values;
                break;
            case ClusterVariant::Kind::smoothed:
                transformed = smooth(ts.values, filter, level, variant.smooth_level, mode).signal;
                break;
            case ClusterVariant::Kind::coefficients: {
                const CoefficientSet coeffs = wavedec(ts.values, filter, level, mode);
                transformed = variant.band.kind == Band::Kind::approx
                                  ? coeffs.approx
                                  : coeffs.details[static_cast<std::size_t>(variant.band.level - 1)];
                break;
            }
        }
        prepared.emplace_back(ts.key.label(), prepare_for_clustering(transformed, ts.key.label()));
        sites.push_back(ts.key.site);
    }

    ClusterRunResult result;
    result.variant = variant.name(level);
    result.distances = distance_matrix(prepared);
    result.dendrogram = ward_linkage(result.distances);
    result.purity = pairing_purity(result.dendrogram, sites);
    return result;
}

} // namespace wavecluster
