#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "distsel/error.hpp"
#include "distsel/pipeline.hpp"

namespace distsel {

Table1Row run_table1_case(double shift, std::uint64_t seed, const Table1Config& config) {
    const auto generated = generate_two_gaussians(config.n_per_cluster, shift, config.variance, seed);
    const auto d = compute_distance_matrix(generated.data, Metric::euclidean());
    const auto df = extract_distance_feature(d, "euclidean");
    const Partition truth{generated.labels, "truth"};

    Table1Row row;
    row.shift = shift;
    row.seed = seed;
    row.dip_p = dip_test(df.values, config.dip).p_value;

    FitConfig fit_config = config.fit;
    fit_config.seed = seed;
    const auto fit = fit_gmm(df.values, config.components, fit_config);
    row.model = fit.model;
    row.chi_p = chi_square_gof(fit.model, df.values).p_value;
    row.valid_gmm = row.chi_p >= config.alpha;

    const auto bb = bayes_boundaries(fit.model);
    if (config.components >= 2 && !bb.left_component.empty() && bb.left_component.back() == config.components - 2) {
        row.bd = bb.boundaries.back();
        row.i_pct = evaluate_eq5(d, truth, *row.bd).i_pct;
    }
    row.inter_median = median_of(inter_pd(d, truth, 1, 2).values);

    std::vector<int> order(static_cast<std::size_t>(truth.k()));
    std::iota(order.begin(), order.end(), 1);
    const auto sizes = truth.labels.cluster_sizes();
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return sizes[static_cast<std::size_t>(a - 1)] > sizes[static_cast<std::size_t>(b - 1)];
    });
    for (int c : order) {
        const auto intra = intra_pd(d, truth, c);
        row.cluster_median.push_back(median_of(intra.values));
        row.cluster_two_sd.push_back(2.0 * robust_sd(intra.values));
    }
    return row;
}

SummaryStat summarize_values(const std::vector<double>& values) {
    SummaryStat s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

Table1Report run_table1(const Table1Config& config) {
    if (config.seeds.empty() || config.shifts.empty()) {
        throw InvalidArgument("table1 needs at least one seed and one shift");
    }
    Table1Report report;
    report.config = config;
    for (double shift : config.shifts) {
        std::vector<Table1Row> rows;
        for (auto seed : config.seeds) {
            rows.push_back(run_table1_case(shift, seed, config));
        }
        Table1Summary s;
        s.shift = shift;
        s.seeds = rows.size();
        std::vector<double> dip, chi, bd, ipct, inter;
        const std::size_t clusters = rows.front().cluster_median.size();
        std::vector<std::vector<double>> med(clusters), two_sd(clusters);
        for (const auto& r : rows) {
            dip.push_back(r.dip_p);
            chi.push_back(r.chi_p);
            if (r.bd) {
                bd.push_back(*r.bd);
            }
            if (r.i_pct) {
                ipct.push_back(*r.i_pct);
            }
            inter.push_back(r.inter_median);
            for (std::size_t c = 0; c < clusters; ++c) {
                med[c].push_back(r.cluster_median[c]);
                two_sd[c].push_back(r.cluster_two_sd[c]);
            }
            s.valid_gmm += r.valid_gmm ? 1 : 0;
            s.dip_rejects += r.dip_p < config.alpha ? 1 : 0;
        }
        s.dip_p = summarize_values(dip);
        s.chi_p = summarize_values(chi);
        s.bd = summarize_values(bd);
        s.i_pct = summarize_values(ipct);
        s.inter_median = summarize_values(inter);
        for (std::size_t c = 0; c < clusters; ++c) {
            s.cluster_median.push_back(summarize_values(med[c]));
            s.cluster_two_sd.push_back(summarize_values(two_sd[c]));
        }
        report.summary.push_back(std::move(s));
        for (auto& r : rows) {
            report.rows.push_back(std::move(r));
        }
    }
    return report;
}

namespace {

std::string fmt(const char* pattern, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, a);
    return buf;
}

std::string mean_sd(const SummaryStat& s, int digits) {
    if (s.count == 0) {
        return "/";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f±%.*f", digits, s.mean, digits, s.sd);
    return buf;
}

std::string cell(std::string s, std::size_t width) {
    // Column widths count code points, so the two-byte '±' is padded as one.
    std::size_t visible = 0;
    for (unsigned char ch : s) {
        visible += (ch & 0xC0) != 0x80 ? 1 : 0;
    }
    if (visible < width) {
        s.append(width - visible, ' ');
    }
    return s;
}

} // namespace

std::string render_table1(const Table1Report& report) {
    const auto& c = report.config;
    std::ostringstream out;
    out << "Two Gaussian clusters, n = " << c.n_per_cluster << " per cluster, per-coordinate sd "
        << fmt("%.4g", std::sqrt(c.variance)) << " (variance " << fmt("%.4g", c.variance) << "), centres 0 +/- shift; "
        << c.components << "-component GMM on Euclidean distances; " << c.seeds.size()
        << " seeds; mean±sd over seeds\n";
    out << "chi p below " << fmt("%.2g", c.alpha) << " in a majority of seeds is reported as \"no valid GMM\"\n\n";

    const std::size_t clusters = report.summary.empty() ? 0 : report.summary.front().cluster_median.size();
    out << cell("shift", 7) << cell("dip p", 14) << cell("chi p", 28) << cell("BD", 14) << cell("I in %", 14)
        << cell("m(inter-pd)", 14);
    for (std::size_t k = 0; k < clusters; ++k) {
        const auto t = std::to_string(k + 1);
        out << cell("m(t" + t + ")+2sd(t" + t + ")", 26);
    }
    out << '\n';
    for (const auto& s : report.summary) {
        std::string chi = mean_sd(s.chi_p, 3);
        if (2 * s.valid_gmm < s.seeds) {
            chi = "no valid GMM (" + std::to_string(s.valid_gmm) + "/" + std::to_string(s.seeds) + " valid)";
        }
        out << cell(fmt("%.2f", s.shift), 7) << cell(mean_sd(s.dip_p, 3), 14) << cell(chi, 28)
            << cell(mean_sd(s.bd, 3), 14) << cell(mean_sd(s.i_pct, 2), 14) << cell(mean_sd(s.inter_median, 3), 14);
        for (std::size_t k = 0; k < clusters; ++k) {
            out << cell(mean_sd(s.cluster_median[k], 3) + " + " + mean_sd(s.cluster_two_sd[k], 3), 26);
        }
        out << '\n';
    }

    out << "\nper seed\n";
    out << cell("shift", 7) << cell("seed", 6) << cell("dip p", 8) << cell("chi p", 12) << cell("BD", 9)
        << cell("I in %", 9) << cell("m(inter)", 9) << "GMM (w; m; s)\n";
    for (const auto& r : report.rows) {
        out << cell(fmt("%.2f", r.shift), 7) << cell(std::to_string(r.seed), 6) << cell(fmt("%.3f", r.dip_p), 8)
            << cell(fmt("%.3g", r.chi_p), 12) << cell(r.bd ? fmt("%.4f", *r.bd) : "/", 9)
            << cell(r.i_pct ? fmt("%.2f", *r.i_pct) : "/", 9) << cell(fmt("%.4f", r.inter_median), 9);
        const auto& m = r.model;
        for (std::size_t i = 0; i < m.components(); ++i) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%s(%.3f; %.4f; %.4f)", i ? " " : "", m.weights()[i], m.means()[i],
                          m.sds()[i]);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

Json to_json(const Table1Report& report) {
    const auto stat = [](const SummaryStat& s) {
        return Json{{"mean", s.count ? Json(s.mean) : Json(nullptr)},
                    {"sd", s.count ? Json(s.sd) : Json(nullptr)},
                    {"count", s.count}};
    };
    const auto& c = report.config;
    Json config = {{"seeds", c.seeds},
                   {"shifts", c.shifts},
                   {"n_per_cluster", c.n_per_cluster},
                   {"variance", c.variance},
                   {"sd", std::sqrt(c.variance)},
                   {"components", c.components},
                   {"restarts", c.fit.restarts},
                   {"max_iter", c.fit.max_iter},
                   {"tol", c.fit.tol},
                   {"n_boot", c.dip.n_boot},
                   {"dip_seed", c.dip.seed},
                   {"alpha", c.alpha}};
    Json summary = Json::array();
    for (const auto& s : report.summary) {
        Json clusters = Json::array();
        for (std::size_t k = 0; k < s.cluster_median.size(); ++k) {
            clusters.push_back({{"median", stat(s.cluster_median[k])}, {"two_sd", stat(s.cluster_two_sd[k])}});
        }
        summary.push_back({{"shift", s.shift},
                           {"seeds", s.seeds},
                           {"dip_p", stat(s.dip_p)},
                           {"dip_rejects", s.dip_rejects},
                           {"chi_p", stat(s.chi_p)},
                           {"valid_gmm", s.valid_gmm},
                           {"no_valid_gmm", 2 * s.valid_gmm < s.seeds},
                           {"bd", stat(s.bd)},
                           {"i_pct", stat(s.i_pct)},
                           {"inter_median", stat(s.inter_median)},
                           {"clusters", std::move(clusters)}});
    }
    Json rows = Json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"shift", r.shift},
                        {"seed", r.seed},
                        {"dip_p", r.dip_p},
                        {"chi_p", r.chi_p},
                        {"valid_gmm", r.valid_gmm},
                        {"bd", r.bd ? Json(*r.bd) : Json(nullptr)},
                        {"i_pct", r.i_pct ? Json(*r.i_pct) : Json(nullptr)},
                        {"inter_median", r.inter_median},
                        {"cluster_median", r.cluster_median},
                        {"cluster_two_sd", r.cluster_two_sd},
                        {"model", to_json(r.model)}});
    }
    return with_schema({{"config", std::move(config)}, {"summary", std::move(summary)}, {"rows", std::move(rows)}});
}

} // namespace distsel
