#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "distsel/clustering.hpp"
#include "distsel/error.hpp"

namespace distsel {

namespace {

double squared_distance(std::span<const double> a, const double* c) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - c[j];
        s += d * d;
    }
    return s;
}

struct LloydRun {
    std::vector<int> assign;
    std::vector<double> centroids;
    double wcss = 0.0;
    std::size_t iterations = 0;
    std::size_t reseeded = 0;
};

std::vector<double> kmeanspp_seeds(const DataMatrix& data, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    std::vector<double> centres;
    centres.reserve(k * d);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    const auto r0 = data.row(first(rng));
    centres.insert(centres.end(), r0.begin(), r0.end());
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) {
        nearest[i] = squared_distance(data.row(i), centres.data());
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t c = 1; c < k; ++c) {
        const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
        std::size_t pick = 0;
        if (total > 0.0) {
            double target = unit(rng) * total;
            for (pick = 0; pick + 1 < n; ++pick) {
                target -= nearest[pick];
                if (target < 0.0) {
                    break;
                }
            }
        } else {
            pick = first(rng);
        }
        const auto row = data.row(pick);
        centres.insert(centres.end(), row.begin(), row.end());
        const double* cp = centres.data() + c * d;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(data.row(i), cp));
        }
    }
    return centres;
}

LloydRun lloyd(const DataMatrix& data, std::size_t k, std::vector<double> centres, std::size_t max_iter) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    LloydRun run;
    run.assign.assign(n, -1);
    std::vector<double> dist(n, 0.0);
    for (std::size_t it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double v = squared_distance(data.row(i), centres.data() + c * d);
                if (v < best) {
                    best = v;
                    arg = static_cast<int>(c);
                }
            }
            dist[i] = best;
            if (run.assign[i] != arg) {
                run.assign[i] = arg;
                changed = true;
            }
        }
        run.iterations = it + 1;
        // Empty clusters take the point farthest from its current centroid.
        std::vector<std::size_t> counts(k, 0);
        for (int a : run.assign) {
            ++counts[static_cast<std::size_t>(a)];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) {
                continue;
            }
            const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
            --counts[static_cast<std::size_t>(run.assign[far])];
            run.assign[far] = static_cast<int>(c);
            counts[c] = 1;
            dist[far] = 0.0;
            ++run.reseeded;
            changed = true;
        }
        std::fill(centres.begin(), centres.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = data.row(i);
            double* cp = centres.data() + static_cast<std::size_t>(run.assign[i]) * d;
            for (std::size_t j = 0; j < d; ++j) {
                cp[j] += row[j];
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) {
                centres[c * d + j] /= static_cast<double>(counts[c]);
            }
        }
        if (!changed) {
            break;
        }
    }
    run.wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        run.wcss += squared_distance(data.row(i), centres.data() + static_cast<std::size_t>(run.assign[i]) * d);
    }
    run.centroids = std::move(centres);
    return run;
}

} // namespace

KMeansResult kmeans(const DataMatrix& data, std::size_t k, const KMeansConfig& config) {
    if (k < 1 || k > data.rows()) {
        throw InvalidArgument("k-means needs 1 <= k <= n");
    }
    if (data.coordinate_system() != CoordinateSystem::cartesian) {
        throw InvalidArgument("k-means expects cartesian coordinates");
    }
    if (config.restarts < 1) {
        throw InvalidArgument("k-means needs at least one restart");
    }
    std::mt19937_64 rng(config.seed);
    std::optional<LloydRun> best;
    for (std::size_t r = 0; r < config.restarts; ++r) {
        auto run = lloyd(data, k, kmeanspp_seeds(data, k, rng), config.max_iter);
        if (!best || run.wcss < best->wcss) {
            best = std::move(run);
        }
    }
    std::vector<int> labels(best->assign.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        labels[i] = best->assign[i] + 1;
    }
    KMeansResult out{Partition{LabelVector(std::move(labels)), "kmeans"}, std::move(best->centroids), best->wcss,
                     best->iterations, best->reseeded};
    return out;
}

double within_cluster_sum_of_squares(const DataMatrix& data, const LabelVector& labels) {
    if (labels.size() != data.rows()) {
        throw InvalidArgument("label count does not match the data");
    }
    const std::size_t d = data.cols();
    const auto k = static_cast<std::size_t>(labels.k());
    std::vector<double> centres(k * d, 0.0);
    const auto sizes = labels.cluster_sizes();
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels[i] - 1);
        for (std::size_t j = 0; j < d; ++j) {
            centres[c * d + j] += data(i, j) / static_cast<double>(sizes[c]);
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        total += squared_distance(data.row(i), centres.data() + static_cast<std::size_t>(labels[i] - 1) * d);
    }
    return total;
}

namespace {

std::vector<std::uint32_t> members(const Partition& p, int cluster) {
    if (cluster < 1 || cluster > p.k()) {
        throw InvalidArgument("cluster id " + std::to_string(cluster) + " outside 1..k");
    }
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.labels[i] == cluster) {
            out.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return out;
}

void check_sizes(const DistanceMatrix& d, const Partition& p) {
    if (d.size() != p.size()) {
        throw InvalidArgument("partition size " + std::to_string(p.size()) + " does not match distance matrix size " +
                              std::to_string(d.size()));
    }
}

} // namespace

DistanceFeature intra_pd(const DistanceMatrix& d, const Partition& p, int cluster) {
    check_sizes(d, p);
    const auto m = members(p, cluster);
    DistanceFeature df;
    df.source = p.source + ":intra:" + std::to_string(cluster);
    for (std::size_t a = 0; a < m.size(); ++a) {
        for (std::size_t b = a + 1; b < m.size(); ++b) {
            df.values.push_back(d(m[a], m[b]));
            df.index_map.emplace_back(m[a], m[b]);
        }
    }
    return df;
}

DistanceFeature inter_pd(const DistanceMatrix& d, const Partition& p, int a, int b) {
    check_sizes(d, p);
    if (a == b) {
        throw InvalidArgument("inter_pd needs two distinct clusters");
    }
    const auto ma = members(p, a);
    const auto mb = members(p, b);
    DistanceFeature df;
    df.source = p.source + ":inter:" + std::to_string(a) + "-" + std::to_string(b);
    for (auto i : ma) {
        for (auto j : mb) {
            df.values.push_back(d(i, j));
            df.index_map.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    return df;
}

namespace {

double best_assignment_exhaustive(const std::vector<std::vector<double>>& gain) {
    const std::size_t k = gain.size();
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1.0;
    do {
        double s = 0.0;
        for (std::size_t r = 0; r < k; ++r) {
            s += gain[r][perm[r]];
        }
        best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Hungarian algorithm (potentials form) maximising total gain on a square matrix.
double best_assignment_hungarian(const std::vector<std::vector<double>>& gain) {
    const std::size_t k = gain.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
    std::vector<std::size_t> p(k + 1, 0), way(k + 1, 0);
    for (std::size_t i = 1; i <= k; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(k + 1, inf);
        std::vector<bool> used(k + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= k; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = -gain[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= k; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
        total += gain[p[j] - 1][j - 1];
    }
    return total;
}

} // namespace

double accuracy(const LabelVector& predicted, const LabelVector& truth) {
    if (predicted.size() != truth.size()) {
        throw InvalidArgument("accuracy: partitions have different sizes");
    }
    const auto k = static_cast<std::size_t>(std::max(predicted.k(), truth.k()));
    std::vector<std::vector<double>> table(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        table[static_cast<std::size_t>(predicted[i] - 1)][static_cast<std::size_t>(truth[i] - 1)] += 1.0;
    }
    const double hits = k <= 6 ? best_assignment_exhaustive(table) : best_assignment_hungarian(table);
    return hits / static_cast<double>(predicted.size());
}

double accuracy(const Partition& p, const LabelVector& truth) { return accuracy(p.labels, truth); }

} // namespace distsel
