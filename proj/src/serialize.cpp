#include "distsel/serialize.hpp"

#include <algorithm>

#include "distsel/error.hpp"

namespace distsel {

Json with_schema(Json body) {
    Json out = Json::object();
    out["schema"] = kSchemaVersion;
    for (auto& [key, value] : body.items()) {
        if (key != "schema") {
            out[key] = std::move(value);
        }
    }
    return out;
}

Json to_json(const DataMatrix& data) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto r = data.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return {{"rows", data.rows()},
            {"cols", data.cols()},
            {"feature_names", data.feature_names()},
            {"coordinates", data.coordinate_system() == CoordinateSystem::spherical ? "spherical" : "cartesian"},
            {"values", std::move(rows)}};
}

Json to_json(const LabelVector& labels) { return labels.labels(); }

Json to_json(const Partition& partition) {
    return {{"source", partition.source},
            {"k", partition.k()},
            {"sizes", partition.labels.cluster_sizes()},
            {"labels", partition.labels.labels()}};
}

Json to_json(const ValidationReport& report) {
    Json examples = Json::array();
    for (const auto& t : report.violation_examples) {
        examples.push_back({t.i, t.j, t.k});
    }
    return {{"is_metric", report.is_metric()},
            {"max_asymmetry", report.max_asymmetry},
            {"max_abs_diagonal", report.max_abs_diagonal},
            {"negative_count", report.negative_count},
            {"zero_off_diagonal", report.zero_off_diagonal},
            {"triples_checked", report.triples_checked},
            {"exhaustive", report.exhaustive},
            {"triangle_violations", report.triangle_violations},
            {"violation_examples", std::move(examples)}};
}

Json to_json(const ContrastReport& report) {
    return {{"d_min", report.d_min},
            {"d_max", report.d_max},
            {"relative_contrast", report.relative_contrast},
            {"reference", report.reference}};
}

Json to_json(const DipResult& dip) {
    return {{"statistic", dip.statistic},
            {"p_value", dip.p_value},
            {"n_boot", dip.n_boot},
            {"sample_size", dip.sample_size},
            {"modal_interval", {dip.modal_low, dip.modal_high}}};
}

Json to_json(const DensityEstimate& density) {
    return {{"kernel_points", density.kernel_points},
            {"densities", density.densities},
            {"pareto_radius", density.pareto_radius},
            {"radius_rule", density.radius_rule},
            {"degenerate", density.degenerate}};
}

Json to_json(const MdPlotSpec& spec) {
    Json series = Json::array();
    for (const auto& s : spec.series) {
        series.push_back({{"label", s.label},
                          {"sample_size", s.sample_size},
                          {"median", s.median},
                          {"dip", to_json(s.dip)},
                          {"density", to_json(s.density)}});
    }
    Json out = {{"range", {spec.range_min, spec.range_max}}, {"series", std::move(series)}};
    if (spec.overlay) {
        out["overlay"] = {{"model", to_json(spec.overlay->model)},
                          {"x", spec.overlay->x},
                          {"y", spec.overlay->y},
                          {"boundaries", spec.overlay->boundaries}};
    }
    return out;
}

Json to_json(const GmmModel& model) {
    return {{"weights", model.weights()},
            {"means", model.means()},
            {"sds", model.sds()},
            {"loglik", model.log_likelihood()},
            {"n", model.fitted_on()}};
}

Json to_json(const FitResult& fit) {
    Json restarts = Json::array();
    for (const auto& r : fit.restarts) {
        Json entry = {{"log_likelihood", r.log_likelihood}, {"iterations", r.iterations}, {"converged", r.converged}};
        if (!r.trace.empty()) {
            entry["trace"] = r.trace;
        }
        restarts.push_back(std::move(entry));
    }
    return {{"model", to_json(fit.model)},
            {"best_restart", fit.best_restart},
            {"restarts", std::move(restarts)},
            {"sd_floor", fit.sd_floor},
            {"floored_components", fit.floored_components},
            {"weak_components", fit.weak_components},
            {"warnings", fit.warnings}};
}

Json to_json(const BayesBoundaries& boundaries) {
    Json out = {{"boundaries", boundaries.boundaries},
                {"posterior_at_boundary", boundaries.posterior_at_boundary},
                {"left_component", boundaries.left_component},
                {"missing_pairs", boundaries.missing_pairs}};
    if (auto last = boundaries.last()) {
        out["bd"] = *last;
    } else {
        out["bd"] = nullptr;
    }
    return out;
}

Json to_json(const GofResult& gof) {
    return {{"chi2_statistic", gof.chi2_statistic},
            {"dof", gof.dof},
            {"p_value", gof.p_value},
            {"bins", gof.bins},
            {"bin_edges", gof.bin_edges},
            {"observed", gof.observed},
            {"expected", gof.expected}};
}

Json to_json(const QqData& qq) {
    return {{"probabilities", qq.probabilities},
            {"empirical", qq.empirical},
            {"model", qq.model},
            {"max_abs_deviation", qq.max_abs_deviation}};
}

Json to_json(const ModeSelection& selection) {
    return {{"components", selection.components},
            {"bic", selection.bic},
            {"log_likelihood", selection.log_likelihood},
            {"suggested", selection.suggested}};
}

Json to_json(const Dendrogram& dendrogram) {
    Json merges = Json::array();
    for (const auto& m : dendrogram.merges) {
        merges.push_back({m.left, m.right, m.height, m.size});
    }
    return {{"n", dendrogram.n},
            {"linkage", linkage_name(dendrogram.linkage)},
            {"inversions", dendrogram.inversions},
            {"merges", std::move(merges)}};
}

Json to_json(const Eq5Report& report) {
    Json clusters = Json::array();
    for (const auto& c : report.clusters) {
        Json row = {{"cluster", c.cluster}, {"size", c.size}, {"pairs", c.pairs}, {"na", c.na}};
        if (c.na) {
            row["median"] = nullptr;
            row["robust_sd"] = nullptr;
            row["criterion"] = nullptr;
            row["pass"] = nullptr;
            row["i_pct"] = nullptr;
        } else {
            row["median"] = c.median;
            row["robust_sd"] = c.robust_sd;
            row["criterion"] = c.criterion;
            row["min"] = c.min;
            row["max"] = c.max;
            row["pass"] = c.pass;
            row["above"] = c.above;
            row["i_pct"] = c.i_pct;
        }
        clusters.push_back(std::move(row));
    }
    return {{"source", report.source},
            {"bd", report.boundary},
            {"pass", report.pass},
            {"i_pct", report.i_pct},
            {"clusters", std::move(clusters)}};
}

Json summarize(const DistanceFeature& df) {
    if (df.empty()) {
        return {{"size", 0}, {"min", nullptr}, {"median", nullptr}, {"max", nullptr}};
    }
    const auto [lo, hi] = std::minmax_element(df.values.begin(), df.values.end());
    return {{"size", df.size()}, {"min", *lo}, {"median", median_of(df.values)}, {"max", *hi}};
}

namespace {

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw InvalidArgument(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

std::vector<double> real_array(const Json& j, const char* key) {
    const Json& a = require(j, key);
    if (!a.is_array()) {
        throw InvalidArgument(std::string("field '") + key + "' must be an array of numbers");
    }
    std::vector<double> out;
    out.reserve(a.size());
    for (const auto& v : a) {
        if (!v.is_number()) {
            throw InvalidArgument(std::string("field '") + key + "' must be an array of numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

DataMatrix data_matrix_from_json(const Json& j) {
    const Json& rows = require(j, "values");
    if (!rows.is_array() || rows.empty()) {
        throw InvalidArgument("'values' must be a non-empty array of rows");
    }
    const std::size_t d = rows.front().is_array() ? rows.front().size() : 0;
    std::vector<double> values;
    values.reserve(rows.size() * d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!r.is_array() || r.size() != d) {
            throw InvalidArgument("row " + std::to_string(i + 1) + " has the wrong length");
        }
        for (const auto& v : r) {
            if (!v.is_number()) {
                throw InvalidArgument("row " + std::to_string(i + 1) + " holds a non-numeric value");
            }
            values.push_back(v.get<double>());
        }
    }
    std::vector<std::string> names;
    if (j.contains("feature_names")) {
        names = j.at("feature_names").get<std::vector<std::string>>();
    }
    auto coords = CoordinateSystem::cartesian;
    if (j.contains("coordinates")) {
        const auto c = j.at("coordinates").get<std::string>();
        if (c == "spherical") {
            coords = CoordinateSystem::spherical;
        } else if (c != "cartesian") {
            throw InvalidArgument("unknown coordinate system '" + c + "'");
        }
    }
    return DataMatrix(rows.size(), d, std::move(values), std::move(names), coords);
}

LabelVector labels_from_json(const Json& j) {
    if (!j.is_array()) {
        throw InvalidArgument("labels must be an array of integers");
    }
    std::vector<int> raw;
    for (const auto& v : j) {
        if (!v.is_number_integer()) {
            throw InvalidArgument("labels must be an array of integers");
        }
        raw.push_back(v.get<int>());
    }
    return LabelVector::normalized(raw);
}

GmmModel gmm_model_from_json(const Json& j) {
    auto w = real_array(j, "weights");
    auto m = real_array(j, "means");
    auto s = real_array(j, "sds");
    double loglik = 0.0;
    std::size_t n = 0;
    if (j.contains("loglik") && j.at("loglik").is_number()) {
        loglik = j.at("loglik").get<double>();
    }
    if (j.contains("n") && j.at("n").is_number_unsigned()) {
        n = j.at("n").get<std::size_t>();
    }
    return GmmModel(std::move(w), std::move(m), std::move(s), loglik, n, kWeightSumTolerance);
}

DipResult dip_from_json(const Json& j) {
    DipResult d;
    d.statistic = require(j, "statistic").get<double>();
    d.p_value = require(j, "p_value").get<double>();
    d.n_boot = require(j, "n_boot").get<std::size_t>();
    d.sample_size = require(j, "sample_size").get<std::size_t>();
    const auto modal = real_array(j, "modal_interval");
    if (modal.size() != 2) {
        throw InvalidArgument("'modal_interval' must hold two numbers");
    }
    d.modal_low = modal[0];
    d.modal_high = modal[1];
    return d;
}

DensityEstimate density_from_json(const Json& j) {
    DensityEstimate d;
    d.kernel_points = real_array(j, "kernel_points");
    d.densities = real_array(j, "densities");
    d.pareto_radius = require(j, "pareto_radius").get<double>();
    d.radius_rule = require(j, "radius_rule").get<std::string>();
    d.degenerate = require(j, "degenerate").get<bool>();
    return d;
}

FitResult fit_from_json(const Json& j) {
    FitResult f;
    f.model = gmm_model_from_json(require(j, "model"));
    f.best_restart = require(j, "best_restart").get<std::size_t>();
    for (const auto& r : require(j, "restarts")) {
        RestartSummary s;
        s.log_likelihood = require(r, "log_likelihood").get<double>();
        s.iterations = require(r, "iterations").get<std::size_t>();
        s.converged = require(r, "converged").get<bool>();
        if (r.contains("trace")) {
            s.trace = r.at("trace").get<std::vector<double>>();
        }
        f.restarts.push_back(std::move(s));
    }
    f.sd_floor = require(j, "sd_floor").get<double>();
    f.floored_components = require(j, "floored_components").get<std::vector<std::size_t>>();
    f.weak_components = require(j, "weak_components").get<std::vector<std::size_t>>();
    f.warnings = require(j, "warnings").get<std::vector<std::string>>();
    return f;
}

BayesBoundaries boundaries_from_json(const Json& j) {
    BayesBoundaries b;
    b.boundaries = real_array(j, "boundaries");
    b.posterior_at_boundary = real_array(j, "posterior_at_boundary");
    b.left_component = require(j, "left_component").get<std::vector<std::size_t>>();
    b.missing_pairs = require(j, "missing_pairs").get<std::vector<std::size_t>>();
    return b;
}

GofResult gof_from_json(const Json& j) {
    GofResult g;
    g.chi2_statistic = require(j, "chi2_statistic").get<double>();
    g.dof = require(j, "dof").get<std::size_t>();
    g.p_value = require(j, "p_value").get<double>();
    g.bins = require(j, "bins").get<std::size_t>();
    g.bin_edges = real_array(j, "bin_edges");
    g.observed = real_array(j, "observed");
    g.expected = real_array(j, "expected");
    return g;
}

QqData qq_from_json(const Json& j) {
    QqData q;
    q.probabilities = real_array(j, "probabilities");
    q.empirical = real_array(j, "empirical");
    q.model = real_array(j, "model");
    q.max_abs_deviation = require(j, "max_abs_deviation").get<double>();
    return q;
}

Partition partition_from_json(const Json& j) {
    return Partition{labels_from_json(require(j, "labels")), require(j, "source").get<std::string>()};
}

Eq5Report eq5_from_json(const Json& j) {
    Eq5Report r;
    r.source = require(j, "source").get<std::string>();
    r.boundary = require(j, "bd").get<double>();
    r.pass = require(j, "pass").get<bool>();
    r.i_pct = require(j, "i_pct").get<double>();
    for (const auto& c : require(j, "clusters")) {
        Eq5Cluster row;
        row.cluster = require(c, "cluster").get<int>();
        row.size = require(c, "size").get<std::size_t>();
        row.pairs = require(c, "pairs").get<std::size_t>();
        row.na = require(c, "na").get<bool>();
        if (!row.na) {
            row.median = require(c, "median").get<double>();
            row.robust_sd = require(c, "robust_sd").get<double>();
            row.criterion = require(c, "criterion").get<double>();
            row.min = c.value("min", 0.0);
            row.max = c.value("max", 0.0);
            row.pass = require(c, "pass").get<bool>();
            row.above = require(c, "above").get<std::size_t>();
            row.i_pct = require(c, "i_pct").get<double>();
        }
        r.clusters.push_back(row);
    }
    return r;
}

} // namespace distsel
