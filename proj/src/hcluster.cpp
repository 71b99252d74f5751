#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "distsel/clustering.hpp"
#include "distsel/error.hpp"

namespace distsel {

Linkage parse_linkage(const std::string& name) {
    if (name == "single") return Linkage::single;
    if (name == "complete") return Linkage::complete;
    if (name == "average") return Linkage::average;
    if (name == "wpgma" || name == "WPGMA" || name == "mcquitty") return Linkage::wpgma;
    if (name == "ward" || name == "ward.D2") return Linkage::ward;
    if (name == "median") return Linkage::median;
    if (name == "centroid") return Linkage::centroid;
    throw InvalidArgument("unknown linkage '" + name + "'");
}

std::string linkage_name(Linkage linkage) {
    switch (linkage) {
    case Linkage::single: return "single";
    case Linkage::complete: return "complete";
    case Linkage::average: return "average";
    case Linkage::wpgma: return "wpgma";
    case Linkage::ward: return "ward";
    case Linkage::median: return "median";
    case Linkage::centroid: return "centroid";
    }
    return "unknown";
}

bool linkage_is_monotone(Linkage linkage) noexcept {
    return linkage != Linkage::median && linkage != Linkage::centroid;
}

namespace {

bool uses_squares(Linkage l) { return l == Linkage::ward || l == Linkage::median || l == Linkage::centroid; }

// Lance-Williams update of d(k, i+j) from d(k,i), d(k,j), d(i,j).
double lance_williams(Linkage l, double dki, double dkj, double dij, double ni, double nj, double nk) {
    switch (l) {
    case Linkage::single: return std::min(dki, dkj);
    case Linkage::complete: return std::max(dki, dkj);
    case Linkage::average: return (ni * dki + nj * dkj) / (ni + nj);
    case Linkage::wpgma: return 0.5 * (dki + dkj);
    case Linkage::ward: return ((ni + nk) * dki + (nj + nk) * dkj - nk * dij) / (ni + nj + nk);
    case Linkage::centroid: {
        const double s = ni + nj;
        return (ni * dki + nj * dkj) / s - ni * nj * dij / (s * s);
    }
    case Linkage::median: return 0.5 * dki + 0.5 * dkj - 0.25 * dij;
    }
    return 0.0;
}

} // namespace

Dendrogram hcluster(const DistanceMatrix& d, Linkage linkage) {
    const std::size_t n = d.size();
    if (n < 2) {
        throw InvalidArgument("hierarchical clustering needs at least 2 observations");
    }
    const bool squared = uses_squares(linkage);
    std::vector<double> work(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = d(i, j);
            work[i * n + j] = squared ? v * v : v;
        }
    }
    const auto at = [&](std::size_t i, std::size_t j) -> double& { return work[i * n + j]; };

    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), 0);
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::size_t> size(n, 1);

    Dendrogram dend;
    dend.n = n;
    dend.linkage = linkage;
    dend.merges.reserve(n - 1);
    double last_height = -std::numeric_limits<double>::infinity();

    for (std::size_t step = 0; step + 1 < n; ++step) {
        // Lowest (i, j) slot pair wins ties.
        std::size_t bi = 0;
        std::size_t bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < active.size(); ++a) {
            const std::size_t i = active[a];
            const double* row = &work[i * n];
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                const std::size_t j = active[b];
                if (row[j] < best) {
                    best = row[j];
                    bi = i;
                    bj = j;
                }
            }
        }
        const double ni = static_cast<double>(size[bi]);
        const double nj = static_cast<double>(size[bj]);
        for (std::size_t k : active) {
            if (k == bi || k == bj) {
                continue;
            }
            const double v = lance_williams(linkage, at(k, bi), at(k, bj), best, ni, nj, static_cast<double>(size[k]));
            at(k, bi) = v;
            at(bi, k) = v;
        }
        const double height = squared ? std::sqrt(std::max(0.0, best)) : best;
        if (height < last_height) {
            ++dend.inversions;
        }
        last_height = height;
        const std::size_t lo_id = std::min(id[bi], id[bj]);
        const std::size_t hi_id = std::max(id[bi], id[bj]);
        dend.merges.push_back({lo_id, hi_id, height, size[bi] + size[bj]});
        size[bi] += size[bj];
        id[bi] = n + step;
        active.erase(std::find(active.begin(), active.end(), bj));
    }
    return dend;
}

Partition cut(const Dendrogram& dendrogram, std::size_t k) {
    const std::size_t n = dendrogram.n;
    if (k < 1 || k > n) {
        throw InvalidArgument("cut needs 1 <= k <= n");
    }
    std::vector<std::size_t> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t s = 0; s < n - k; ++s) {
        const auto& m = dendrogram.merges[s];
        parent[find(m.left)] = n + s;
        parent[find(m.right)] = n + s;
    }
    std::vector<int> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = static_cast<int>(find(i));
    }
    return {LabelVector::normalized(raw), linkage_name(dendrogram.linkage)};
}

} // namespace distsel
