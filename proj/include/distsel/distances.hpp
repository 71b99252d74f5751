#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "distsel/dataset.hpp"

namespace distsel {

enum class MetricKind { euclidean, manhattan, chebyshev, minkowski, canberra, cosine, chord, spherical_radius };

struct Metric {
    MetricKind kind = MetricKind::euclidean;
    double exponent = 2.0;  // minkowski only

    static Metric euclidean() { return {MetricKind::euclidean, 2.0}; }
    static Metric minkowski(double k);
    // Accepts "euclidean", "minkowski:3", "minkowski(3)", "spherical_radius", ...
    static Metric parse(const std::string& text);

    std::string name() const;
    bool requires_spherical() const noexcept { return kind == MetricKind::spherical_radius; }

    bool operator==(const Metric&) const = default;
};

// All registry metrics with default parameters (minkowski at k = 3).
std::vector<Metric> metric_registry();

// Dense symmetric n x n matrix. Construction does not validate; use
// validate_distance_matrix for ingested data.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::size_t n, std::vector<double> values);
    explicit DistanceMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
    std::span<const double> values() const noexcept { return values_; }

    bool operator==(const DistanceMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

// Upper-triangle vector of a distance matrix (or a subset of its entries).
// index_map[k] holds the (i, j) pair with i < j that produced values[k].
struct DistanceFeature {
    std::vector<double> values;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> index_map;
    std::string source;  // metric name or "ingested"

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
};

struct ComputeOptions {
    unsigned threads = 0;  // 0 = hardware concurrency
};

DistanceMatrix compute_distance_matrix(const DataMatrix& data, const Metric& metric,
                                       const ComputeOptions& options = {});

// Distance between two rows; no compatibility checks.
double metric_distance(const Metric& metric, std::span<const double> a, std::span<const double> b);

struct Triple {
    std::size_t i;
    std::size_t j;
    std::size_t k;  // D(i,j) > D(i,k) + D(k,j)
};

struct ValidationReport {
    double max_asymmetry = 0.0;
    double max_abs_diagonal = 0.0;
    std::size_t negative_count = 0;
    std::size_t zero_off_diagonal = 0;  // duplicates: allowed, reported as a warning
    std::size_t triples_checked = 0;
    std::size_t triangle_violations = 0;
    bool exhaustive = false;
    std::vector<Triple> violation_examples;  // at most 10, 0-based indices

    bool is_metric(double tol = 1e-9) const {
        return max_asymmetry <= tol && max_abs_diagonal <= tol && negative_count == 0 &&
               triangle_violations == 0;
    }
};

inline constexpr std::size_t kExhaustiveTriangleLimit = 50;

ValidationReport validate_distance_matrix(const DistanceMatrix& d, std::size_t triangle_samples = 10000,
                                          std::uint64_t seed = 0);

DistanceFeature extract_distance_feature(const DistanceMatrix& d, std::string source = "ingested");
// Inverse of extract_distance_feature for a full upper-triangle feature.
DistanceMatrix scatter_distance_feature(const DistanceFeature& df);

// Full square matrix or strict lower triangle (row i has i entries; the first
// row may be empty or omitted). Lower triangles are mirrored; full matrices must
// be symmetric within 1e-9 and are then averaged with their transpose.
DistanceMatrix load_distance_matrix(const std::filesystem::path& path);
DistanceMatrix parse_distance_matrix(std::istream& in);
void write_distance_matrix(std::ostream& out, const DistanceMatrix& d);
void write_distance_matrix(const std::filesystem::path& path, const DistanceMatrix& d);

struct ContrastReport {
    double d_min = 0.0;
    double d_max = 0.0;
    double relative_contrast = 0.0;
    std::string reference;
};

// (Dmax - Dmin) / Dmin over the distances from reference to every row.
ContrastReport relative_contrast(const DataMatrix& data, const Metric& metric,
                                 std::span<const double> reference);

} // namespace distsel
