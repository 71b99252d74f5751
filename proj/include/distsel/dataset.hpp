#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace distsel {

enum class CoordinateSystem { cartesian, spherical };

// n observations x d features, stored row-major. Always finite, n >= 2, d >= 1.
class DataMatrix {
public:
    DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
               std::vector<std::string> feature_names = {},
               CoordinateSystem coordinates = CoordinateSystem::cartesian);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols_, cols_};
    }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    CoordinateSystem coordinate_system() const noexcept { return coordinates_; }

    // Column means / population variances, mostly for diagnostics and tests.
    std::vector<double> column_means() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
    std::vector<std::string> feature_names_;
    CoordinateSystem coordinates_;
};

// Cluster labels 1..k, every label used at least once.
class LabelVector {
public:
    explicit LabelVector(std::vector<int> labels);

    // Maps arbitrary integer labels onto 1..k in order of first appearance.
    static LabelVector normalized(std::span<const int> raw);

    std::size_t size() const noexcept { return labels_.size(); }
    int k() const noexcept { return k_; }
    int operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    std::vector<std::size_t> cluster_sizes() const;  // index 0 is label 1

    bool operator==(const LabelVector&) const = default;

private:
    std::vector<int> labels_;
    int k_ = 0;
};

struct LabeledData {
    DataMatrix data;
    LabelVector labels;
};

// Column selector for load_csv: 0-based index or header name.
using ColumnRef = std::variant<std::size_t, std::string>;

struct CsvData {
    DataMatrix data;
    std::optional<LabelVector> labels;
};

CsvData load_csv(const std::filesystem::path& path, bool has_header,
                 std::optional<ColumnRef> label_column = std::nullopt);
CsvData parse_csv(std::istream& in, bool has_header,
                  std::optional<ColumnRef> label_column = std::nullopt);

void write_csv(std::ostream& out, const DataMatrix& data, const LabelVector* labels = nullptr);
void write_csv(const std::filesystem::path& path, const DataMatrix& data, const LabelVector* labels = nullptr);

// Single-column integer label files.
LabelVector load_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const LabelVector& labels);

// Two 2-D Gaussian clusters. Cluster 1 has its second feature centred at -shift,
// cluster 2 at +shift; the first feature is centred at 0. Both features use the
// given variance.
LabeledData generate_two_gaussians(std::size_t n_per_cluster, double shift, double variance,
                                   std::uint64_t seed);

// Geometry constants for the Atom generator.
inline constexpr double kAtomCoreRadius = 1.0;
inline constexpr double kAtomShellRadius = 30.0;
inline constexpr double kAtomShellThickness = 0.05;  // relative half-width of the shell

// Dense ball (label 1) inside a thin hollow shell (label 2), n/2 points each.
LabeledData generate_atom(std::size_t n, std::uint64_t seed);

inline constexpr double kGolfballRadius = 1.0;

// n points uniform on the surface of a sphere of radius kGolfballRadius.
DataMatrix generate_golfball(std::size_t n, std::uint64_t seed);

// (x, y, z) -> (r, phi, theta): theta is the polar angle from +z in [0, pi],
// phi the azimuth in (-pi, pi]. The origin maps to (0, 0, 0).
DataMatrix to_spherical(const DataMatrix& cartesian);
DataMatrix to_cartesian(const DataMatrix& spherical);

} // namespace distsel
