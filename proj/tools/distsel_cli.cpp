#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "distsel/pipeline.hpp"
#include "distsel/server.hpp"
#include "distsel/session.hpp"

using namespace distsel;

namespace {

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') {
            std::cout << '\n';
        }
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << content;
    if (!content.empty() && content.back() != '\n') {
        out << '\n';
    }
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read " + path);
    }
    return Json::parse(in);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    for (const auto& part : split(text, ',')) {
        const auto dash = part.find('-');
        if (dash != std::string::npos && dash > 0) {
            const auto a = std::stoull(part.substr(0, dash));
            const auto b = std::stoull(part.substr(dash + 1));
            if (b < a) {
                throw InvalidArgument("bad seed range '" + part + "'");
            }
            for (auto s = a; s <= b; ++s) {
                out.push_back(s);
            }
        } else {
            out.push_back(std::stoull(part));
        }
    }
    return out;
}

std::vector<Metric> parse_metrics(const std::string& text) {
    if (text == "all") {
        return metric_registry();
    }
    std::vector<Metric> out;
    for (const auto& m : split(text, ',')) {
        out.push_back(Metric::parse(m));
    }
    return out;
}

struct DataOptions {
    std::string data;
    std::string distances;
    bool no_header = false;
    std::string label_column;
    std::string truth;
    bool spherical = false;
};

void add_data_options(CLI::App* app, DataOptions& o, bool allow_distances) {
    app->add_option("--data,--input", o.data, "CSV data matrix (rows = observations)");
    if (allow_distances) {
        app->add_option("--distances", o.distances, "CSV distance matrix (full or lower triangle)");
    }
    app->add_flag("--no-header", o.no_header, "the CSV has no header row");
    app->add_option("--label-column", o.label_column,
                    "label column (name or 0-based index); a column named 'label' is used by default");
    app->add_option("--truth", o.truth, "file with reference labels, one per line");
    app->add_flag("--spherical", o.spherical, "the data columns are already (r, phi, theta)");
}

// Loads the data (or distances) named by the options into a fresh session.
SessionState load_session(const DataOptions& o, std::uint64_t seed, std::size_t n_boot) {
    SessionState s;
    s.id = "cli";
    s.seed = seed;
    s.n_boot = n_boot;
    if (!o.data.empty() == !o.distances.empty()) {
        throw InvalidArgument("give exactly one of --data or --distances");
    }
    if (!o.data.empty()) {
        std::optional<ColumnRef> label;
        if (!o.label_column.empty()) {
            const bool numeric = o.label_column.find_first_not_of("0123456789") == std::string::npos;
            label = numeric ? ColumnRef{std::stoul(o.label_column)} : ColumnRef{o.label_column};
        } else if (!o.no_header) {
            std::ifstream in(o.data);
            std::string header;
            std::getline(in, header);
            for (auto name : split(header, ',')) {
                name.erase(std::remove_if(name.begin(), name.end(), [](char c) { return c == '"' || c == ' ' || c == '\r'; }),
                           name.end());
                if (name == "label") {
                    label = ColumnRef{std::string("label")};
                }
            }
        }
        auto csv = load_csv(o.data, !o.no_header, label);
        if (o.spherical) {
            s.data = DataMatrix(csv.data.rows(), csv.data.cols(),
                                std::vector<double>(csv.data.values().begin(), csv.data.values().end()),
                                csv.data.feature_names(), CoordinateSystem::spherical);
        } else {
            s.data = std::move(csv.data);
        }
        s.truth = std::move(csv.labels);
    } else {
        s.ingested = extract_distance_feature(load_distance_matrix(o.distances), "ingested");
        s.metric = "ingested";
    }
    if (!o.truth.empty()) {
        s.truth = load_labels(o.truth);
    }
    return s;
}

FitConfig fit_config(std::uint64_t seed, std::size_t restarts, std::size_t max_iter, double tol) {
    FitConfig c;
    c.seed = seed;
    c.restarts = restarts;
    c.max_iter = max_iter;
    c.tol = tol;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distance-distribution analysis for distance-based clustering structures"};
    app.require_subcommand(1);

    // generate
    std::string gen_kind = "two_gaussians";
    std::size_t gen_n = 250;
    double gen_shift = 0.2;
    double gen_variance = 0.01;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "write a synthetic dataset as CSV (last column 'label' when known)");
    gen->add_option("--kind", gen_kind, "two_gaussians | atom | golfball")->capture_default_str();
    gen->add_option("--n", gen_n, "points (per cluster for two_gaussians)")->capture_default_str();
    gen->add_option("--shift", gen_shift, "two_gaussians: centres at 0 -/+ shift")->capture_default_str();
    gen->add_option("--variance", gen_variance, "two_gaussians: per-coordinate variance")->capture_default_str();
    gen->add_option("--seed", gen_seed)->capture_default_str();
    gen->add_option("--out", gen_out, "output CSV (default stdout)");

    // distances
    DataOptions dist_data;
    std::string dist_metric = "euclidean";
    std::uint64_t dist_seed = 0;
    std::string dist_out;
    std::string dist_report;
    std::size_t dist_samples = 10000;
    auto* dist = app.add_subcommand("distances", "compute (or validate) a distance matrix");
    add_data_options(dist, dist_data, true);
    dist->add_option("--metric", dist_metric)->capture_default_str();
    dist->add_option("--seed", dist_seed, "seed for triangle-inequality sampling")->capture_default_str();
    dist->add_option("--triangle-samples", dist_samples)->capture_default_str();
    dist->add_option("--out", dist_out, "output CSV matrix");
    dist->add_option("--report", dist_report, "validation report JSON (default stdout)");

    // scan
    DataOptions scan_data;
    std::string scan_metrics = "euclidean";
    std::uint64_t scan_seed = 0;
    std::size_t scan_boot = 1000;
    double scan_alpha = 0.05;
    std::string scan_out;
    std::string scan_svg;
    auto* scan = app.add_subcommand("scan", "dip test and density of the distance distribution per metric");
    add_data_options(scan, scan_data, true);
    scan->add_option("--metrics", scan_metrics, "comma-separated metrics or 'all'")->capture_default_str();
    scan->add_option("--seed", scan_seed, "dip test bootstrap seed")->capture_default_str();
    scan->add_option("--n-boot", scan_boot)->capture_default_str();
    scan->add_option("--alpha", scan_alpha, "annotation threshold only")->capture_default_str();
    scan->add_option("--out", scan_out, "scan JSON (default stdout)");
    scan->add_option("--svg", scan_svg, "MD plot gallery");

    // fit
    DataOptions fit_data;
    std::string fit_metric;
    std::size_t fit_m = 0;
    std::size_t fit_select = 0;
    std::uint64_t fit_seed = 0;
    std::size_t fit_restarts = 5;
    std::size_t fit_iter = 1000;
    double fit_tol = 1e-8;
    std::string fit_out;
    std::string fit_svg;
    auto* fit = app.add_subcommand("fit", "fit a Gaussian mixture to the distance distribution of a chosen metric");
    add_data_options(fit, fit_data, true);
    fit->add_option("--metric,--choose", fit_metric, "the metric chosen after inspecting the scan");
    fit->add_option("--components,-M", fit_m, "number of mixture components");
    fit->add_option("--select-modes", fit_select, "report BIC for M = 1..N instead of fitting one model");
    fit->add_option("--seed", fit_seed)->capture_default_str();
    fit->add_option("--restarts", fit_restarts)->capture_default_str();
    fit->add_option("--max-iter", fit_iter)->capture_default_str();
    fit->add_option("--tol", fit_tol)->capture_default_str();
    fit->add_option("--out", fit_out, "model JSON (default stdout)");
    fit->add_option("--svg", fit_svg, "MD plot with the mixture overlay");

    // boundaries
    std::string bd_model;
    std::string bd_out;
    std::uint64_t bd_seed = 0;
    auto* bnd = app.add_subcommand("boundaries", "Bayes decision boundaries of a mixture model");
    bnd->add_option("--model", bd_model, "model JSON ({weights, means, sds} or a fit output)")->required();
    bnd->add_option("--seed", bd_seed, "unused; accepted for uniformity");
    bnd->add_option("--out", bd_out, "JSON (default stdout)");

    // evaluate
    DataOptions ev_data;
    std::string ev_metric;
    double ev_bd = 0.0;
    std::string ev_model;
    std::size_t ev_m = 0;
    std::vector<std::string> ev_partitions;
    std::vector<std::string> ev_clusters;
    std::uint64_t ev_seed = 0;
    std::size_t ev_boot = 1000;
    std::string ev_out;
    std::string ev_svg;
    auto* ev = app.add_subcommand("evaluate", "check partitions against the Bayes boundary of the distance distribution");
    add_data_options(ev, ev_data, true);
    ev->add_option("--metric,--choose", ev_metric, "metric of the distances");
    ev->add_option("--bd", ev_bd, "Bayes boundary to test against");
    ev->add_option("--model", ev_model, "model JSON supplying the boundary");
    ev->add_option("--components,-M", ev_m, "fit an M-component model to obtain the boundary");
    ev->add_option("--partition", ev_partitions, "name=labels.csv (repeatable)");
    ev->add_option("--cluster", ev_clusters, "algorithm:k, e.g. ward:2 or kmeans:2 (repeatable)");
    ev->add_option("--seed", ev_seed)->capture_default_str();
    ev->add_option("--n-boot", ev_boot)->capture_default_str();
    ev->add_option("--out", ev_out, "JSON report (the table goes to stdout)");
    ev->add_option("--svg", ev_svg, "prefix for per-partition MD plots");

    // table1
    std::string t1_seeds = "1-10";
    std::string t1_shifts = "0.1,0.2,0.3";
    std::size_t t1_n = 250;
    double t1_variance = 0.01;
    std::size_t t1_m = 2;
    std::uint64_t t1_seed = 0;
    std::size_t t1_boot = 1000;
    std::string t1_out;
    std::string t1_json;
    auto* t1 = app.add_subcommand("table1", "two-Gaussian shift experiment over several seeds");
    t1->add_option("--seeds", t1_seeds, "e.g. 1-10 or 1,4,7")->capture_default_str();
    t1->add_option("--shifts", t1_shifts)->capture_default_str();
    t1->add_option("--n", t1_n, "points per cluster")->capture_default_str();
    t1->add_option("--variance", t1_variance, "per-coordinate variance")->capture_default_str();
    t1->add_option("--components,-M", t1_m)->capture_default_str();
    t1->add_option("--seed", t1_seed, "dip test bootstrap seed")->capture_default_str();
    t1->add_option("--n-boot", t1_boot)->capture_default_str();
    t1->add_option("--out", t1_out, "text table (default stdout)");
    t1->add_option("--json", t1_json, "JSON report");

    // serve
    ServerConfig srv;
    auto* serve_cmd = app.add_subcommand("serve", "JSON API for interactive use");
    serve_cmd->add_option("--host", srv.host)->capture_default_str();
    serve_cmd->add_option("--port", srv.port)->capture_default_str();
    serve_cmd->add_option("--session-dir", srv.session_dir)->capture_default_str();
    serve_cmd->add_option("--seed", srv.default_seed, "seed of new sessions")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            auto g = generate_dataset(gen_kind, gen_n, gen_seed, gen_shift, gen_variance);
            std::ostringstream out;
            write_csv(out, g.data, g.labels ? &*g.labels : nullptr);
            write_output(gen_out, out.str());
        } else if (dist->parsed()) {
            auto s = load_session(dist_data, dist_seed, 1000);
            DistanceMatrix d;
            if (s.ingested) {
                d = session_distances(s);
            } else {
                select_metric(s, dist_metric);
                d = session_distances(s);
            }
            if (!dist_out.empty()) {
                write_distance_matrix(std::filesystem::path(dist_out), d);
            }
            Json report = {{"metric", s.metric.value_or("ingested")},
                           {"n", d.size()},
                           {"validation", to_json(validate_distance_matrix(d, dist_samples, dist_seed))}};
            write_output(dist_report, with_schema(std::move(report)).dump(2));
        } else if (scan->parsed()) {
            auto s = load_session(scan_data, scan_seed, scan_boot);
            ScanConfig config;
            config.dip = DipTestConfig{scan_boot, scan_seed};
            config.alpha = scan_alpha;
            const auto result = s.ingested ? scan_distances(*s.ingested, config)
                                           : run_scan(*s.data, parse_metrics(scan_metrics), config);
            for (const auto& e : result.entries) {
                if (e.ok) {
                    std::cerr << e.metric << ": dip p = " << e.dip.p_value << (e.note.empty() ? "" : " (" + e.note + ")")
                              << '\n';
                } else {
                    std::cerr << e.metric << ": failed: " << e.error << '\n';
                }
            }
            if (!result.multimodal_candidate) {
                std::cerr << "no multimodal candidate at alpha " << scan_alpha << '\n';
            }
            if (!scan_svg.empty()) {
                write_svg(scan_plot(result), std::filesystem::path(scan_svg), "distance distributions per metric");
            }
            write_output(scan_out, with_schema({{"scan", to_json(result)}}).dump(2));
        } else if (fit->parsed()) {
            auto s = load_session(fit_data, fit_seed, 1000);
            if (!s.ingested) {
                if (fit_metric.empty()) {
                    throw InvalidArgument("choose a metric with --metric (run 'scan' to compare metrics)");
                }
                select_metric(s, fit_metric);
            }
            const auto config = fit_config(fit_seed, fit_restarts, fit_iter, fit_tol);
            if (fit_select > 0) {
                const auto modes = select_modes(session_feature(s).values, fit_select, config);
                write_output(fit_out, with_schema({{"metric", *s.metric}, {"modes", to_json(modes)}}).dump(2));
                return 0;
            }
            if (fit_m == 0) {
                throw InvalidArgument("give --components (use --select-modes N to compare BIC first)");
            }
            run_model(s, fit_m, config);
            for (const auto& w : s.warnings) {
                std::cerr << "warning: " << w << '\n';
            }
            if (!fit_svg.empty()) {
                const auto df = session_feature(s);
                MdPlotConfig pc;
                pc.dip.seed = fit_seed;
                const std::vector<double> none;
                const auto spec = md_plot({{*s.metric, df.values}}, &*s.model, s.boundaries ? s.boundaries->boundaries : none, pc);
                write_svg(spec, std::filesystem::path(fit_svg), "mixture model of the " + *s.metric + " distances");
            }
            write_output(fit_out, with_schema(model_payload(s)).dump(2));
        } else if (bnd->parsed()) {
            Json j = read_json(bd_model);
            const Json& m = j.contains("model") ? j.at("model") : j;
            const auto model = gmm_model_from_json(m);
            Json out = {{"model", to_json(model)}, {"boundaries", to_json(bayes_boundaries(model))}};
            write_output(bd_out, with_schema(std::move(out)).dump(2));
        } else if (ev->parsed()) {
            auto s = load_session(ev_data, ev_seed, ev_boot);
            if (!s.ingested) {
                if (ev_metric.empty()) {
                    throw InvalidArgument("give the metric of the distances with --metric");
                }
                select_metric(s, ev_metric);
            }
            const int sources = int(ev_bd > 0.0) + int(!ev_model.empty()) + int(ev_m > 0);
            if (sources != 1) {
                throw InvalidArgument("give exactly one of --bd, --model or --components");
            }
            if (ev_m > 0) {
                run_model(s, ev_m, fit_config(ev_seed, 5, 1000, 1e-8));
            } else if (!ev_model.empty()) {
                Json j = read_json(ev_model);
                set_model(s, gmm_model_from_json(j.contains("model") ? j.at("model") : j));
            } else {
                s.bd = ev_bd;
            }
            if (!s.bd) {
                throw InvalidArgument("the model has no boundary between its last two components");
            }
            std::vector<NamedPartition> parts;
            for (const auto& spec : ev_partitions) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos) {
                    throw InvalidArgument("--partition expects name=labels.csv");
                }
                parts.push_back({spec.substr(0, eq), Partition{load_labels(spec.substr(eq + 1)), "ingested"}});
            }
            for (const auto& spec : ev_clusters) {
                const auto colon = spec.find(':');
                if (colon == std::string::npos) {
                    throw InvalidArgument("--cluster expects algorithm:k");
                }
                const auto algorithm = spec.substr(0, colon);
                const auto k = std::stoul(spec.substr(colon + 1));
                parts.push_back({spec, build_partition(s, algorithm, k, ev_seed)});
            }
            if (parts.empty()) {
                throw InvalidArgument("nothing to evaluate: give --partition or --cluster");
            }
            const auto result = run_evaluate(s, parts);
            std::cout << result.table;
            for (std::size_t i = 0; i < result.reports.size(); ++i) {
                if (result.accuracy[i]) {
                    std::cout << result.reports[i].first << ": accuracy " << *result.accuracy[i] << '\n';
                }
                if (!ev_svg.empty()) {
                    write_svg(result.plots[i], std::filesystem::path(ev_svg + "-" + std::to_string(i + 1) + ".svg"),
                               result.reports[i].first);
                }
            }
            if (!ev_out.empty()) {
                Json j = to_json(result);
                j["bd"] = *s.bd;
                write_output(ev_out, with_schema(std::move(j)).dump(2));
            }
        } else if (t1->parsed()) {
            Table1Config config;
            config.seeds = parse_seeds(t1_seeds);
            config.shifts.clear();
            for (const auto& v : split(t1_shifts, ',')) {
                config.shifts.push_back(std::stod(v));
            }
            config.n_per_cluster = t1_n;
            config.variance = t1_variance;
            config.components = t1_m;
            config.dip = DipTestConfig{t1_boot, t1_seed};
            const auto report = run_table1(config);
            write_output(t1_out, render_table1(report));
            if (!t1_json.empty()) {
                write_output(t1_json, to_json(report).dump(2));
            }
        } else if (serve_cmd->parsed()) {
            serve(srv);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
