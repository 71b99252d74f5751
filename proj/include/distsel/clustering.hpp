#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "distsel/dataset.hpp"
#include "distsel/distances.hpp"

namespace distsel {

struct Partition {
    LabelVector labels;
    std::string source;  // algorithm name or "ingested"

    int k() const noexcept { return labels.k(); }
    std::size_t size() const noexcept { return labels.size(); }
};

enum class Linkage { single, complete, average, wpgma, ward, median, centroid };

Linkage parse_linkage(const std::string& name);
std::string linkage_name(Linkage linkage);
// Ward, median and centroid operate on squared distances internally and report
// heights back on the original scale (Ward.D2 convention for Ward).
bool linkage_is_monotone(Linkage linkage) noexcept;

struct Merge {
    // Observations are 0..n-1; the cluster created by merge s has id n + s.
    std::size_t left = 0;
    std::size_t right = 0;
    double height = 0.0;
    std::size_t size = 0;
};

struct Dendrogram {
    std::size_t n = 0;
    Linkage linkage = Linkage::single;
    std::vector<Merge> merges;
    std::size_t inversions = 0;  // merges lower than their predecessor (median/centroid)
};

Dendrogram hcluster(const DistanceMatrix& d, Linkage linkage);

// Applies the first n - k merges. Labels are numbered by first appearance.
Partition cut(const Dendrogram& dendrogram, std::size_t k);

struct KMeansConfig {
    std::size_t restarts = 10;
    std::size_t max_iter = 300;
    std::uint64_t seed = 0;
};

struct KMeansResult {
    Partition partition;
    std::vector<double> centroids;  // k x d row-major
    double wcss = 0.0;
    std::size_t iterations = 0;
    std::size_t reseeded = 0;  // empty clusters re-seeded at the farthest point
};

// Lloyd iterations from k-means++ seeds; the best of `restarts` by WCSS.
KMeansResult kmeans(const DataMatrix& data, std::size_t k, const KMeansConfig& config = {});

double within_cluster_sum_of_squares(const DataMatrix& data, const LabelVector& labels);

DistanceFeature intra_pd(const DistanceMatrix& d, const Partition& p, int cluster);
DistanceFeature inter_pd(const DistanceMatrix& d, const Partition& p, int a, int b);

// Median + 2 * robust sd <= BD. Templated so decimal reference values can be
// checked without binary rounding.
template <typename T>
bool eq5_passes(const T& median, const T& two_sd, const T& boundary) {
    return median + two_sd <= boundary;
}

// A partition passes when every non-NA cluster passes and at least one cluster
// is not NA. Each entry is (median, 2 sd), or nullopt for a singleton cluster.
template <typename T>
bool eq5_row_passes(const std::vector<std::optional<std::pair<T, T>>>& clusters, const T& boundary) {
    bool any = false;
    for (const auto& c : clusters) {
        if (!c) {
            continue;
        }
        any = true;
        if (!eq5_passes(c->first, c->second, boundary)) {
            return false;
        }
    }
    return any;
}

inline constexpr double kMadToSd = 1.4826;

double median_of(std::vector<double> values);
// 1.4826 * median absolute deviation.
double robust_sd(const std::vector<double>& values);

struct Eq5Cluster {
    int cluster = 0;        // label in the evaluated partition
    std::size_t size = 0;   // observations
    std::size_t pairs = 0;  // intra-pd count
    bool na = false;        // singleton cluster
    double median = 0.0;
    double robust_sd = 0.0;
    double criterion = 0.0;  // median + 2 sd
    double min = 0.0;        // range of the intra-pd
    double max = 0.0;
    bool pass = false;
    std::size_t above = 0;  // intra-pd > BD
    double i_pct = 0.0;     // per-cluster share above BD
};

struct Eq5Report {
    std::string source;
    double boundary = 0.0;
    std::vector<Eq5Cluster> clusters;  // ordered by descending size, ties by label
    bool pass = false;                 // every non-NA cluster passes
    double i_pct = 0.0;                // pooled over non-NA clusters
};

Eq5Report evaluate_eq5(const DistanceMatrix& d, const Partition& p, double boundary);

// Table-2/3-style text: algorithm, per-cluster "m+2sd" (or NA), verdict.
std::string render_eq5_table(const std::vector<std::pair<std::string, Eq5Report>>& reports);

// Best label agreement over all bijections between label sets.
double accuracy(const Partition& p, const LabelVector& truth);
double accuracy(const LabelVector& predicted, const LabelVector& truth);

} // namespace distsel
