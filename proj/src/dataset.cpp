#include "distsel/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "distsel/error.hpp"

namespace distsel {

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       std::vector<std::string> feature_names, CoordinateSystem coordinates)
    : rows_(rows), cols_(cols), values_(std::move(values)),
      feature_names_(std::move(feature_names)), coordinates_(coordinates) {
    if (rows_ < 2) {
        throw InvalidArgument("data matrix needs at least 2 rows");
    }
    if (cols_ < 1) {
        throw InvalidArgument("data matrix needs at least 1 column");
    }
    if (values_.size() != rows_ * cols_) {
        throw InvalidArgument("data matrix size does not match rows x cols");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw InvalidArgument("non-finite value at row " + std::to_string(i / cols_ + 1) +
                                  ", column " + std::to_string(i % cols_ + 1));
        }
    }
    if (feature_names_.empty()) {
        for (std::size_t j = 0; j < cols_; ++j) {
            feature_names_.push_back("V" + std::to_string(j + 1));
        }
    } else if (feature_names_.size() != cols_) {
        throw InvalidArgument("feature name count does not match column count");
    }
    if (coordinates_ == CoordinateSystem::spherical && cols_ != 3) {
        throw InvalidArgument("spherical coordinates require exactly 3 columns");
    }
}

std::vector<double> DataMatrix::column_means() const {
    std::vector<double> means(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            means[j] += (*this)(i, j);
        }
    }
    for (auto& m : means) {
        m /= static_cast<double>(rows_);
    }
    return means;
}

LabelVector::LabelVector(std::vector<int> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) {
        throw InvalidArgument("label vector is empty");
    }
    int k = 0;
    for (int l : labels_) {
        if (l < 1) {
            throw InvalidArgument("labels must be positive integers, got " + std::to_string(l));
        }
        k = std::max(k, l);
    }
    std::vector<bool> seen(static_cast<std::size_t>(k) + 1, false);
    for (int l : labels_) {
        seen[static_cast<std::size_t>(l)] = true;
    }
    for (int l = 1; l <= k; ++l) {
        if (!seen[static_cast<std::size_t>(l)]) {
            throw InvalidArgument("label " + std::to_string(l) + " is unused; labels must cover 1..k");
        }
    }
    k_ = k;
}

LabelVector LabelVector::normalized(std::span<const int> raw) {
    std::vector<int> seen;
    std::vector<int> out;
    out.reserve(raw.size());
    for (int v : raw) {
        auto it = std::find(seen.begin(), seen.end(), v);
        if (it == seen.end()) {
            seen.push_back(v);
            out.push_back(static_cast<int>(seen.size()));
        } else {
            out.push_back(static_cast<int>(it - seen.begin()) + 1);
        }
    }
    return LabelVector(std::move(out));
}

std::vector<std::size_t> LabelVector::cluster_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k_), 0);
    for (int l : labels_) {
        ++sizes[static_cast<std::size_t>(l - 1)];
    }
    return sizes;
}

namespace {

std::array<double, 3> random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    while (true) {
        std::array<double, 3> v{normal(rng), normal(rng), normal(rng)};
        const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (norm > 1e-12) {
            for (auto& c : v) {
                c /= norm;
            }
            return v;
        }
    }
}

std::vector<std::string> xyz_names() { return {"x", "y", "z"}; }

} // namespace

LabeledData generate_two_gaussians(std::size_t n_per_cluster, double shift, double variance,
                                   std::uint64_t seed) {
    if (n_per_cluster < 2) {
        throw InvalidArgument("n_per_cluster must be at least 2");
    }
    if (!(variance > 0.0)) {
        throw InvalidArgument("variance must be positive");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(variance));
    const std::size_t n = 2 * n_per_cluster;
    std::vector<double> values;
    values.reserve(2 * n);
    std::vector<int> labels;
    labels.reserve(n);
    for (int cluster = 1; cluster <= 2; ++cluster) {
        const double centre = cluster == 1 ? -shift : shift;
        for (std::size_t i = 0; i < n_per_cluster; ++i) {
            values.push_back(normal(rng));
            values.push_back(centre + normal(rng));
            labels.push_back(cluster);
        }
    }
    return {DataMatrix(n, 2, std::move(values), {"x", "y"}), LabelVector(std::move(labels))};
}

LabeledData generate_atom(std::size_t n, std::uint64_t seed) {
    if (n < 20 || n % 2 != 0) {
        throw InvalidArgument("atom needs an even n >= 20");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t half = n / 2;
    std::vector<double> values;
    values.reserve(3 * n);
    std::vector<int> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < half; ++i) {
        const auto dir = random_direction(rng);
        const double r = kAtomCoreRadius * std::cbrt(unit(rng));
        for (double c : dir) {
            values.push_back(r * c);
        }
        labels.push_back(1);
    }
    const double lo = kAtomShellRadius * (1.0 - kAtomShellThickness);
    const double hi = kAtomShellRadius * (1.0 + kAtomShellThickness);
    std::uniform_real_distribution<double> shell(lo, hi);
    for (std::size_t i = 0; i < half; ++i) {
        const auto dir = random_direction(rng);
        const double r = shell(rng);
        for (double c : dir) {
            values.push_back(r * c);
        }
        labels.push_back(2);
    }
    return {DataMatrix(n, 3, std::move(values), xyz_names()), LabelVector(std::move(labels))};
}

DataMatrix generate_golfball(std::size_t n, std::uint64_t seed) {
    if (n < 20) {
        throw InvalidArgument("golfball needs n >= 20");
    }
    std::mt19937_64 rng(seed);
    std::vector<double> values;
    values.reserve(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (double c : random_direction(rng)) {
            values.push_back(kGolfballRadius * c);
        }
    }
    return DataMatrix(n, 3, std::move(values), xyz_names());
}

DataMatrix to_spherical(const DataMatrix& cartesian) {
    if (cartesian.cols() != 3 || cartesian.coordinate_system() != CoordinateSystem::cartesian) {
        throw InvalidArgument("to_spherical expects 3-column cartesian data");
    }
    std::vector<double> out;
    out.reserve(cartesian.rows() * 3);
    for (std::size_t i = 0; i < cartesian.rows(); ++i) {
        const double x = cartesian(i, 0);
        const double y = cartesian(i, 1);
        const double z = cartesian(i, 2);
        const double r = std::sqrt(x * x + y * y + z * z);
        double phi = 0.0;
        double theta = 0.0;
        if (r > 0.0) {
            phi = std::atan2(y, x);
            if (phi == -std::numbers::pi) {
                phi = std::numbers::pi;
            }
            theta = std::acos(std::clamp(z / r, -1.0, 1.0));
        }
        out.push_back(r);
        out.push_back(phi);
        out.push_back(theta);
    }
    return DataMatrix(cartesian.rows(), 3, std::move(out), {"r", "phi", "theta"},
                      CoordinateSystem::spherical);
}

DataMatrix to_cartesian(const DataMatrix& spherical) {
    if (spherical.coordinate_system() != CoordinateSystem::spherical) {
        throw InvalidArgument("to_cartesian expects spherical data");
    }
    std::vector<double> out;
    out.reserve(spherical.rows() * 3);
    for (std::size_t i = 0; i < spherical.rows(); ++i) {
        const double r = spherical(i, 0);
        const double phi = spherical(i, 1);
        const double theta = spherical(i, 2);
        out.push_back(r * std::sin(theta) * std::cos(phi));
        out.push_back(r * std::sin(theta) * std::sin(phi));
        out.push_back(r * std::cos(theta));
    }
    return DataMatrix(spherical.rows(), 3, std::move(out), xyz_names());
}

} // namespace distsel
