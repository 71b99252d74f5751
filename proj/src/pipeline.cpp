#include "distsel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "distsel/error.hpp"

namespace distsel {

GeneratedData generate_dataset(const std::string& kind, std::size_t n, std::uint64_t seed, double shift,
                               double variance) {
    if (kind == "two_gaussians" || kind == "two-gaussians") {
        auto g = generate_two_gaussians(n, shift, variance, seed);
        return {std::move(g.data), std::move(g.labels)};
    }
    if (kind == "atom") {
        auto g = generate_atom(n, seed);
        return {std::move(g.data), std::move(g.labels)};
    }
    if (kind == "golfball") {
        return {generate_golfball(n, seed), std::nullopt};
    }
    throw InvalidArgument("unknown dataset kind '" + kind + "' (two_gaussians, atom, golfball)");
}

DataMatrix prepare_for_metric(const DataMatrix& data, const Metric& metric, std::string* note) {
    if (metric.requires_spherical() && data.coordinate_system() == CoordinateSystem::cartesian && data.cols() == 3) {
        if (note) {
            *note = "cartesian (x, y, z) converted to spherical (r, phi, theta)";
        }
        return to_spherical(data);
    }
    return data;
}

DistanceMatrix distances_for(const DataMatrix& data, const Metric& metric, unsigned threads) {
    return compute_distance_matrix(prepare_for_metric(data, metric), metric, ComputeOptions{threads});
}

namespace {

void fill_entry(ScanEntry& e, const DistanceFeature& df, const ScanConfig& config) {
    e.dip = dip_test(df.values, config.dip);
    e.density = pareto_density(df.values, config.grid_size);
    const auto [lo, hi] = std::minmax_element(df.values.begin(), df.values.end());
    e.size = df.size();
    e.min = *lo;
    e.max = *hi;
    e.median = median_of(df.values);
    e.ok = true;
}

void rank_entries(ScanResult& out) {
    std::stable_sort(out.entries.begin(), out.entries.end(), [](const ScanEntry& a, const ScanEntry& b) {
        if (a.ok != b.ok) {
            return a.ok;
        }
        if (a.ok && a.dip.p_value != b.dip.p_value) {
            return a.dip.p_value < b.dip.p_value;
        }
        // Equal Monte Carlo p-values (typically 0): the larger dip is the stronger departure.
        if (a.ok && a.dip.statistic != b.dip.statistic) {
            return a.dip.statistic > b.dip.statistic;
        }
        return a.metric < b.metric;
    });
    out.multimodal_candidate = std::any_of(out.entries.begin(), out.entries.end(),
                                           [&](const ScanEntry& e) { return e.ok && e.dip.p_value < out.alpha; });
}

} // namespace

ScanResult run_scan(const DataMatrix& data, const std::vector<Metric>& metrics, const ScanConfig& config) {
    if (metrics.empty()) {
        throw InvalidArgument("scan needs at least one metric");
    }
    ScanResult out;
    out.alpha = config.alpha;
    for (const auto& metric : metrics) {
        ScanEntry e;
        e.metric = metric.name();
        try {
            const auto prepared = prepare_for_metric(data, metric, &e.note);
            const auto d = compute_distance_matrix(prepared, metric, ComputeOptions{config.threads});
            fill_entry(e, extract_distance_feature(d, e.metric), config);
        } catch (const std::exception& ex) {
            e.ok = false;
            e.error = ex.what();
        }
        out.entries.push_back(std::move(e));
    }
    rank_entries(out);
    return out;
}

ScanResult scan_distances(const DistanceFeature& df, const ScanConfig& config) {
    ScanResult out;
    out.alpha = config.alpha;
    ScanEntry e;
    e.metric = "ingested";
    try {
        fill_entry(e, df, config);
    } catch (const std::exception& ex) {
        e.ok = false;
        e.error = ex.what();
    }
    out.entries.push_back(std::move(e));
    rank_entries(out);
    return out;
}

Json to_json(const ScanResult& scan) {
    Json entries = Json::array();
    std::size_t rank = 0;
    for (const auto& e : scan.entries) {
        Json j = {{"rank", ++rank}, {"metric", e.metric}, {"ok", e.ok}};
        if (!e.note.empty()) {
            j["note"] = e.note;
        }
        if (e.ok) {
            j["dip"] = to_json(e.dip);
            j["df"] = {{"size", e.size}, {"min", e.min}, {"median", e.median}, {"max", e.max}};
            j["density"] = to_json(e.density);
        } else {
            j["error"] = e.error;
        }
        entries.push_back(std::move(j));
    }
    Json out = {{"alpha", scan.alpha}, {"multimodal_candidate", scan.multimodal_candidate}};
    if (!scan.multimodal_candidate) {
        out["annotation"] = "no multimodal candidate";
    }
    out["entries"] = std::move(entries);
    return out;
}

ScanResult scan_from_json(const Json& j) {
    ScanResult out;
    out.alpha = j.at("alpha").get<double>();
    out.multimodal_candidate = j.at("multimodal_candidate").get<bool>();
    for (const auto& x : j.at("entries")) {
        ScanEntry e;
        e.metric = x.at("metric").get<std::string>();
        e.ok = x.at("ok").get<bool>();
        if (x.contains("note")) {
            e.note = x.at("note").get<std::string>();
        }
        if (e.ok) {
            e.dip = dip_from_json(x.at("dip"));
            e.density = density_from_json(x.at("density"));
            const auto& df = x.at("df");
            e.size = df.at("size").get<std::size_t>();
            e.min = df.at("min").get<double>();
            e.median = df.at("median").get<double>();
            e.max = df.at("max").get<double>();
        } else {
            e.error = x.at("error").get<std::string>();
        }
        out.entries.push_back(std::move(e));
    }
    return out;
}

MdPlotSpec scan_plot(const ScanResult& scan) {
    MdPlotSpec spec;
    bool first = true;
    for (const auto& e : scan.entries) {
        if (!e.ok) {
            continue;
        }
        spec.series.push_back(MdPlotSeries{e.metric, e.density, e.dip, e.size, e.median});
        const double lo = e.density.kernel_points.front();
        const double hi = e.density.kernel_points.back();
        spec.range_min = first ? lo : std::min(spec.range_min, lo);
        spec.range_max = first ? hi : std::max(spec.range_max, hi);
        first = false;
    }
    if (spec.series.empty()) {
        throw InvalidArgument("scan has no successfully computed metric to plot");
    }
    return spec;
}

// ---------------------------------------------------------------- session

namespace {

DistanceFeature full_feature(std::size_t n, std::vector<double> upper, std::string source) {
    if (n * (n - 1) / 2 != upper.size()) {
        throw InvalidArgument("ingested distances do not form an upper triangle of size " + std::to_string(n));
    }
    DistanceFeature df;
    df.values = std::move(upper);
    df.source = std::move(source);
    df.index_map.reserve(df.values.size());
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            df.index_map.emplace_back(i, j);
        }
    }
    return df;
}

} // namespace

Json to_json(const SessionState& s) {
    Json j = Json::object();
    j["id"] = s.id;
    j["seed"] = s.seed;
    j["n_boot"] = s.n_boot;
    j["data"] = s.data ? to_json(*s.data) : Json(nullptr);
    j["truth"] = s.truth ? to_json(*s.truth) : Json(nullptr);
    if (s.ingested) {
        j["ingested"] = {{"n", scatter_distance_feature(*s.ingested).size()}, {"upper", s.ingested->values}};
    } else {
        j["ingested"] = nullptr;
    }
    j["scan"] = s.scan ? to_json(*s.scan) : Json(nullptr);
    j["metric"] = s.metric ? Json(*s.metric) : Json(nullptr);
    j["model"] = s.model ? to_json(*s.model) : Json(nullptr);
    j["fit"] = s.fit ? to_json(*s.fit) : Json(nullptr);
    j["boundaries"] = s.boundaries ? to_json(*s.boundaries) : Json(nullptr);
    j["bd"] = s.bd ? Json(*s.bd) : Json(nullptr);
    j["boundary_missing"] = s.boundary_missing;
    j["gof"] = s.gof ? to_json(*s.gof) : Json(nullptr);
    j["qq"] = s.qq ? to_json(*s.qq) : Json(nullptr);
    j["warnings"] = s.warnings;
    Json parts = Json::array();
    for (const auto& p : s.partitions) {
        Json pj = to_json(p.partition);
        pj["name"] = p.name;
        parts.push_back(std::move(pj));
    }
    j["partitions"] = std::move(parts);
    Json reports = Json::array();
    for (const auto& r : s.reports) {
        reports.push_back(to_json(r));
    }
    j["reports"] = std::move(reports);
    return with_schema(std::move(j));
}

SessionState session_from_json(const Json& j) {
    if (!j.contains("schema") || j.at("schema") != kSchemaVersion) {
        throw InvalidArgument("unsupported session schema");
    }
    const auto present = [&](const char* key) { return j.contains(key) && !j.at(key).is_null(); };
    SessionState s;
    s.id = j.at("id").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.n_boot = j.at("n_boot").get<std::size_t>();
    if (present("data")) {
        s.data = data_matrix_from_json(j.at("data"));
    }
    if (present("truth")) {
        s.truth = labels_from_json(j.at("truth"));
    }
    if (present("ingested")) {
        const auto& g = j.at("ingested");
        s.ingested = full_feature(g.at("n").get<std::size_t>(), g.at("upper").get<std::vector<double>>(), "ingested");
    }
    if (present("scan")) {
        s.scan = scan_from_json(j.at("scan"));
    }
    if (present("metric")) {
        s.metric = j.at("metric").get<std::string>();
    }
    if (present("model")) {
        s.model = gmm_model_from_json(j.at("model"));
    }
    if (present("fit")) {
        s.fit = fit_from_json(j.at("fit"));
    }
    if (present("boundaries")) {
        s.boundaries = boundaries_from_json(j.at("boundaries"));
    }
    if (present("bd")) {
        s.bd = j.at("bd").get<double>();
    }
    s.boundary_missing = j.value("boundary_missing", false);
    if (present("gof")) {
        s.gof = gof_from_json(j.at("gof"));
    }
    if (present("qq")) {
        s.qq = qq_from_json(j.at("qq"));
    }
    s.warnings = j.value("warnings", std::vector<std::string>{});
    for (const auto& p : j.value("partitions", Json::array())) {
        s.partitions.push_back({p.at("name").get<std::string>(), partition_from_json(p)});
    }
    for (const auto& r : j.value("reports", Json::array())) {
        s.reports.push_back(eq5_from_json(r));
    }
    return s;
}

DistanceMatrix session_distances(const SessionState& s) {
    if (s.ingested) {
        return scatter_distance_feature(*s.ingested);
    }
    if (!s.data) {
        throw InvalidArgument("session has no data");
    }
    if (!s.metric) {
        throw InvalidArgument("no metric selected");
    }
    return distances_for(*s.data, Metric::parse(*s.metric));
}

DistanceFeature session_feature(const SessionState& s) {
    if (s.ingested) {
        return *s.ingested;
    }
    return extract_distance_feature(session_distances(s), s.metric.value_or("ingested"));
}

namespace {

void clear_model(SessionState& s) {
    s.model.reset();
    s.fit.reset();
    s.boundaries.reset();
    s.bd.reset();
    s.boundary_missing = false;
    s.gof.reset();
    s.qq.reset();
    s.warnings.clear();
    s.reports.clear();
}

void refresh_reports(SessionState& s) {
    s.reports.clear();
    if (!s.bd || s.partitions.empty()) {
        return;
    }
    const auto d = session_distances(s);
    for (const auto& p : s.partitions) {
        auto r = evaluate_eq5(d, p.partition, *s.bd);
        r.source = p.name;
        s.reports.push_back(std::move(r));
    }
}

void install_model(SessionState& s, GmmModel model, const DistanceFeature& df) {
    s.boundaries.reset();
    s.bd.reset();
    s.boundary_missing = false;
    const std::size_t m = model.components();
    if (m >= 2) {
        s.boundaries = bayes_boundaries(model);
        const auto& b = *s.boundaries;
        if (!b.left_component.empty() && b.left_component.back() == m - 2) {
            s.bd = b.boundaries.back();
        } else {
            s.boundary_missing = true;
            s.warnings.push_back("no Bayes boundary between the last two components; BD is undefined");
        }
    }
    s.gof.reset();
    try {
        s.gof = chi_square_gof(model, df.values);
    } catch (const InvalidArgument& ex) {
        s.warnings.push_back(std::string("chi-square test skipped: ") + ex.what());
    }
    s.qq = qq_data(model, df.values);
    if (s.gof && s.gof->p_value < 0.05) {
        const auto [lo, hi] = std::minmax_element(df.values.begin(), df.values.end());
        const double range = *hi - *lo;
        if (s.qq->max_abs_deviation <= kQqGoodFraction * range) {
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "chi-square rejects the model (p = %.3g) although the QQ plot deviates by at most %.3g "
                          "(%.1f%% of the distance range); check the QQ plot before discarding the model",
                          s.gof->p_value, s.qq->max_abs_deviation, 100.0 * s.qq->max_abs_deviation / range);
            s.warnings.emplace_back(buf);
        }
    }
    s.model = std::move(model);
    refresh_reports(s);
}

} // namespace

void select_metric(SessionState& s, const std::string& metric) {
    if (s.ingested) {
        if (metric != "ingested") {
            throw InvalidArgument("session holds ingested distances; the only metric is 'ingested'");
        }
    } else {
        if (!s.data) {
            throw InvalidArgument("session has no data");
        }
        Metric::parse(metric);
    }
    const std::string canonical = s.ingested ? metric : Metric::parse(metric).name();
    if (s.metric != canonical) {
        clear_model(s);
    }
    s.metric = canonical;
}

void run_model(SessionState& s, std::size_t components, const FitConfig& config) {
    if (!s.ingested && !s.metric) {
        throw InvalidArgument("select a metric before fitting");
    }
    const auto df = session_feature(s);
    auto fit = fit_gmm(df.values, components, config);
    clear_model(s);
    s.warnings = fit.warnings;
    auto model = fit.model;
    s.fit = std::move(fit);
    install_model(s, std::move(model), df);
}

void set_model(SessionState& s, GmmModel model) {
    if (!s.ingested && !s.metric) {
        throw InvalidArgument("select a metric before editing a model");
    }
    const auto df = session_feature(s);
    s.fit.reset();
    s.warnings.clear();
    install_model(s, std::move(model), df);
}

Json model_payload(const SessionState& s) {
    Json j = Json::object();
    j["metric"] = s.metric ? Json(*s.metric) : Json(nullptr);
    j["model"] = s.model ? to_json(*s.model) : Json(nullptr);
    j["fit"] = s.fit ? to_json(*s.fit) : Json(nullptr);
    j["boundaries"] = s.boundaries ? to_json(*s.boundaries) : Json(nullptr);
    j["bd"] = s.bd ? Json(*s.bd) : Json(nullptr);
    j["boundary_missing"] = s.boundary_missing;
    j["gof"] = s.gof ? to_json(*s.gof) : Json(nullptr);
    j["qq"] = s.qq ? to_json(*s.qq) : Json(nullptr);
    j["warnings"] = s.warnings;
    return j;
}

Partition build_partition(const SessionState& s, const std::string& algorithm, std::size_t k, std::uint64_t seed) {
    if (algorithm == "kmeans") {
        if (!s.data) {
            throw InvalidArgument("k-means needs a data matrix");
        }
        return kmeans(*s.data, k, KMeansConfig{10, 300, seed}).partition;
    }
    const auto linkage = parse_linkage(algorithm);
    auto p = cut(hcluster(session_distances(s), linkage), k);
    p.source = linkage_name(linkage);
    return p;
}

EvaluateResult run_evaluate(SessionState& s, const std::vector<NamedPartition>& partitions) {
    if (!s.bd) {
        throw InvalidArgument("no Bayes boundary available; fit a model with at least two components first");
    }
    const auto d = session_distances(s);
    for (const auto& p : partitions) {
        if (p.partition.size() != d.size()) {
            throw InvalidArgument("partition '" + p.name + "' has " + std::to_string(p.partition.size()) +
                                  " labels but the data has " + std::to_string(d.size()) + " observations");
        }
    }
    const auto df = extract_distance_feature(d, s.metric.value_or("ingested"));
    EvaluateResult out;
    MdPlotConfig plot_config;
    plot_config.dip.seed = s.seed;
    plot_config.dip.n_boot = s.n_boot;
    const std::vector<double> bds = s.boundaries ? s.boundaries->boundaries : std::vector<double>{*s.bd};
    for (const auto& p : partitions) {
        auto report = evaluate_eq5(d, p.partition, *s.bd);
        report.source = p.name;
        std::vector<SeriesInput> series{{"df", df.values}};
        for (const auto& c : report.clusters) {
            // PDE needs at least 10 values; smaller clusters are listed in the table only.
            if (c.pairs >= 10) {
                series.push_back({"intra t" + std::to_string(c.cluster), intra_pd(d, p.partition, c.cluster).values});
            }
        }
        out.plots.push_back(md_plot(series, s.model ? &*s.model : nullptr, bds, plot_config));
        if (s.truth && s.truth->size() == p.partition.size()) {
            out.accuracy.push_back(accuracy(p.partition, *s.truth));
        } else {
            out.accuracy.push_back(std::nullopt);
        }
        out.reports.emplace_back(p.name, std::move(report));
    }
    out.table = render_eq5_table(out.reports);
    s.partitions = partitions;
    s.reports.clear();
    for (const auto& [name, r] : out.reports) {
        s.reports.push_back(r);
    }
    return out;
}

Json to_json(const EvaluateResult& result) {
    Json reports = Json::array();
    for (std::size_t i = 0; i < result.reports.size(); ++i) {
        Json r = {{"name", result.reports[i].first}, {"eq5", to_json(result.reports[i].second)}};
        r["accuracy"] = result.accuracy[i] ? Json(*result.accuracy[i]) : Json(nullptr);
        r["plot"] = to_json(result.plots[i]);
        reports.push_back(std::move(r));
    }
    return {{"table", result.table}, {"reports", std::move(reports)}};
}

} // namespace distsel
