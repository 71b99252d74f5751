#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "distsel/clustering.hpp"
#include "distsel/error.hpp"

namespace distsel {

double median_of(std::vector<double> values) {
    if (values.empty()) {
        throw InvalidArgument("median of an empty sample");
    }
    const std::size_t n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double upper = *mid;
    if (n % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

double robust_sd(const std::vector<double>& values) {
    const double m = median_of(values);
    std::vector<double> dev;
    dev.reserve(values.size());
    for (double v : values) {
        dev.push_back(std::abs(v - m));
    }
    return kMadToSd * median_of(std::move(dev));
}

Eq5Report evaluate_eq5(const DistanceMatrix& d, const Partition& p, double boundary) {
    if (!(boundary > 0.0)) {
        throw InvalidArgument("Bayes boundary must be positive");
    }
    if (d.size() != p.size()) {
        throw InvalidArgument("partition size " + std::to_string(p.size()) + " does not match distance matrix size " +
                              std::to_string(d.size()));
    }
    Eq5Report rep;
    rep.source = p.source;
    rep.boundary = boundary;
    const auto sizes = p.labels.cluster_sizes();
    std::size_t pooled_pairs = 0;
    std::size_t pooled_above = 0;
    std::vector<std::optional<std::pair<double, double>>> verdict_input;
    for (int c = 1; c <= p.k(); ++c) {
        Eq5Cluster row;
        row.cluster = c;
        row.size = sizes[static_cast<std::size_t>(c - 1)];
        const auto intra = intra_pd(d, p, c);
        row.pairs = intra.size();
        if (intra.empty()) {
            row.na = true;
        } else {
            row.median = median_of(intra.values);
            row.robust_sd = robust_sd(intra.values);
            row.criterion = row.median + 2.0 * row.robust_sd;
            const auto [lo, hi] = std::minmax_element(intra.values.begin(), intra.values.end());
            row.min = *lo;
            row.max = *hi;
            row.pass = eq5_passes(row.median, 2.0 * row.robust_sd, boundary);
            row.above = static_cast<std::size_t>(
                std::count_if(intra.values.begin(), intra.values.end(), [&](double v) { return v > boundary; }));
            row.i_pct = 100.0 * static_cast<double>(row.above) / static_cast<double>(row.pairs);
            pooled_pairs += row.pairs;
            pooled_above += row.above;
        }
        verdict_input.push_back(row.na ? std::nullopt
                                       : std::optional<std::pair<double, double>>{{row.median, 2.0 * row.robust_sd}});
        rep.clusters.push_back(row);
    }
    std::stable_sort(rep.clusters.begin(), rep.clusters.end(),
                     [](const Eq5Cluster& a, const Eq5Cluster& b) { return a.size > b.size; });
    rep.pass = eq5_row_passes(verdict_input, boundary);
    rep.i_pct = pooled_pairs ? 100.0 * static_cast<double>(pooled_above) / static_cast<double>(pooled_pairs) : 0.0;
    return rep;
}

std::string render_eq5_table(const std::vector<std::pair<std::string, Eq5Report>>& reports) {
    std::size_t columns = 0;
    std::size_t name_width = 9;
    for (const auto& [name, rep] : reports) {
        columns = std::max(columns, rep.clusters.size());
        name_width = std::max(name_width, name.size());
    }
    std::ostringstream out;
    const auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) {
            s.append(w - s.size(), ' ');
        }
        return s;
    };
    out << pad("algorithm", name_width);
    for (std::size_t c = 0; c < columns; ++c) {
        out << "  " << pad("m(t" + std::to_string(c + 1) + ")+2sd(t" + std::to_string(c + 1) + ")", 15);
    }
    out << "  verdict   I%\n";
    for (const auto& [name, rep] : reports) {
        out << pad(name, name_width);
        for (std::size_t c = 0; c < columns; ++c) {
            std::string cell;
            if (c < rep.clusters.size()) {
                const auto& row = rep.clusters[c];
                if (row.na) {
                    cell = "NA";
                } else {
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "%.2f+%.2f%s", row.median, 2.0 * row.robust_sd, row.pass ? "" : "*");
                    cell = buf;
                }
            }
            out << "  " << pad(cell, 15);
        }
        char tail[64];
        std::snprintf(tail, sizeof tail, "  %-8s  %.1f", rep.pass ? "pass" : "fail", rep.i_pct);
        out << tail << '\n';
    }
    if (!reports.empty()) {
        char foot[96];
        std::snprintf(foot, sizeof foot, "BD = %.4f; * marks clusters above the boundary; NA: one data point in the cluster\n",
                      reports.front().second.boundary);
        out << foot;
    }
    return out.str();
}

} // namespace distsel
