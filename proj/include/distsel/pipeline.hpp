#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "distsel/clustering.hpp"
#include "distsel/dataset.hpp"
#include "distsel/density.hpp"
#include "distsel/distances.hpp"
#include "distsel/gmm.hpp"
#include "distsel/serialize.hpp"

namespace distsel {

// ---------------------------------------------------------------- datasets

struct GeneratedData {
    DataMatrix data;
    std::optional<LabelVector> labels;
};

// kind: "two_gaussians" (n per cluster, shift, variance), "atom" or "golfball" (n total).
GeneratedData generate_dataset(const std::string& kind, std::size_t n, std::uint64_t seed, double shift = 0.2,
                               double variance = 0.01);

// ---------------------------------------------------------------- scan

struct ScanConfig {
    DipTestConfig dip;
    std::size_t grid_size = kDefaultGridSize;
    unsigned threads = 0;
    // Used only to annotate the result; nothing is selected automatically.
    double alpha = 0.05;
};

struct ScanEntry {
    std::string metric;
    bool ok = false;
    std::string error;  // set when the metric could not be computed
    std::string note;   // e.g. coordinate conversion applied before computing
    DipResult dip;
    DensityEstimate density;
    std::size_t size = 0;
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

struct ScanResult {
    std::vector<ScanEntry> entries;  // ranked: dip p ascending, then dip descending, then name; failures last
    double alpha = 0.05;
    bool multimodal_candidate = false;  // some metric has dip p < alpha
};

// Spherical-only metrics on 3-D cartesian data are computed after to_spherical;
// `note` (if given) receives a description of the conversion.
DataMatrix prepare_for_metric(const DataMatrix& data, const Metric& metric, std::string* note = nullptr);
DistanceMatrix distances_for(const DataMatrix& data, const Metric& metric, unsigned threads = 0);

ScanResult run_scan(const DataMatrix& data, const std::vector<Metric>& metrics, const ScanConfig& config = {});
// Scan of an ingested distance feature (a single entry).
ScanResult scan_distances(const DistanceFeature& df, const ScanConfig& config = {});
Json to_json(const ScanResult& scan);
ScanResult scan_from_json(const Json& j);
// Gallery with one silhouette per successfully scanned metric.
MdPlotSpec scan_plot(const ScanResult& scan);

// ---------------------------------------------------------------- session

struct NamedPartition {
    std::string name;
    Partition partition;
};

struct SessionState {
    std::string id;
    std::optional<DataMatrix> data;
    std::optional<LabelVector> truth;
    // Ingested distances (upper triangle) when no data matrix is available.
    std::optional<DistanceFeature> ingested;
    std::uint64_t seed = 0;
    std::size_t n_boot = 1000;

    std::optional<ScanResult> scan;
    std::optional<std::string> metric;

    std::optional<GmmModel> model;
    std::optional<FitResult> fit;  // absent after manual parameter edits
    std::optional<BayesBoundaries> boundaries;
    std::optional<double> bd;  // last boundary; only with M >= 2
    bool boundary_missing = false;
    std::optional<GofResult> gof;
    std::optional<QqData> qq;
    std::vector<std::string> warnings;

    std::vector<NamedPartition> partitions;
    std::vector<Eq5Report> reports;
};

Json to_json(const SessionState& session);
SessionState session_from_json(const Json& j);

// Distances under the chosen metric (or the ingested matrix).
DistanceMatrix session_distances(const SessionState& session);
DistanceFeature session_feature(const SessionState& session);

// Chooses the metric and drops everything derived from a previous choice.
void select_metric(SessionState& session, const std::string& metric);

// QQ deviations at most this fraction of the df range count as a good fit.
inline constexpr double kQqGoodFraction = 0.02;

// Fits M components, then derives boundaries, BD, GOF and QQ.
void run_model(SessionState& session, std::size_t components, const FitConfig& config);
// Installs an edited model (no refit) and recomputes boundaries, GOF and QQ.
void set_model(SessionState& session, GmmModel model);
// Model, boundaries, BD, GOF, QQ and warnings: the fit/params response body.
Json model_payload(const SessionState& session);

// "ward:2", "kmeans:3", ... built on the session's distances (hierarchical) or
// data (k-means).
Partition build_partition(const SessionState& session, const std::string& algorithm, std::size_t k,
                          std::uint64_t seed);

struct EvaluateResult {
    std::vector<std::pair<std::string, Eq5Report>> reports;
    std::string table;
    std::vector<MdPlotSpec> plots;  // per partition: full df then intra-pd by descending cluster size
    std::vector<std::optional<double>> accuracy;  // against the session's truth, when known
};

EvaluateResult run_evaluate(SessionState& session, const std::vector<NamedPartition>& partitions);
Json to_json(const EvaluateResult& result);

// ---------------------------------------------------------------- table 1

struct Table1Config {
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> shifts{0.1, 0.2, 0.3};
    std::size_t n_per_cluster = 250;
    // Per-coordinate variance 0.01 (sd 0.1).
    double variance = 0.01;
    std::size_t components = 2;
    FitConfig fit;
    DipTestConfig dip;
    double alpha = 0.05;
};

struct Table1Row {
    double shift = 0.0;
    std::uint64_t seed = 0;
    double dip_p = 1.0;
    double chi_p = 0.0;
    bool valid_gmm = false;  // chi-square p >= alpha
    std::optional<double> bd;
    std::optional<double> i_pct;
    double inter_median = 0.0;
    std::vector<double> cluster_median;  // by descending cluster size
    std::vector<double> cluster_two_sd;
    GmmModel model;
};

struct SummaryStat {
    double mean = 0.0;
    double sd = 0.0;  // sample sd across seeds
    std::size_t count = 0;
};

struct Table1Summary {
    double shift = 0.0;
    SummaryStat dip_p;
    SummaryStat chi_p;
    SummaryStat bd;
    SummaryStat i_pct;
    SummaryStat inter_median;
    std::vector<SummaryStat> cluster_median;
    std::vector<SummaryStat> cluster_two_sd;
    std::size_t seeds = 0;
    std::size_t valid_gmm = 0;
    std::size_t dip_rejects = 0;
};

struct Table1Report {
    Table1Config config;
    std::vector<Table1Row> rows;
    std::vector<Table1Summary> summary;
};

Table1Row run_table1_case(double shift, std::uint64_t seed, const Table1Config& config);
Table1Report run_table1(const Table1Config& config = {});
SummaryStat summarize_values(const std::vector<double>& values);
std::string render_table1(const Table1Report& report);
Json to_json(const Table1Report& report);

} // namespace distsel
