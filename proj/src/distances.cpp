#include "distsel/distances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "csv_util.hpp"
#include "distsel/error.hpp"
#include "distsel/parallel.hpp"

namespace distsel {

Metric Metric::minkowski(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw InvalidArgument("minkowski exponent must be positive");
    }
    return {MetricKind::minkowski, k};
}

Metric Metric::parse(const std::string& text) {
    std::string name = text;
    std::optional<double> param;
    const auto sep = name.find_first_of(":(");
    if (sep != std::string::npos) {
        std::string arg = name.substr(sep + 1);
        if (!arg.empty() && arg.back() == ')') {
            arg.pop_back();
        }
        param = detail::parse_real(arg);
        if (!param) {
            throw InvalidArgument("bad metric parameter in '" + text + "'");
        }
        name = name.substr(0, sep);
    }
    const auto plain = [&](MetricKind kind) {
        if (param) {
            throw InvalidArgument("metric '" + name + "' takes no parameter");
        }
        return Metric{kind, 2.0};
    };
    if (name == "euclidean") return plain(MetricKind::euclidean);
    if (name == "manhattan") return plain(MetricKind::manhattan);
    if (name == "chebyshev") return plain(MetricKind::chebyshev);
    if (name == "canberra") return plain(MetricKind::canberra);
    if (name == "cosine") return plain(MetricKind::cosine);
    if (name == "chord") return plain(MetricKind::chord);
    if (name == "spherical_radius" || name == "radius") return plain(MetricKind::spherical_radius);
    if (name == "minkowski") return minkowski(param.value_or(3.0));
    throw InvalidArgument("unknown metric '" + text + "'");
}

std::string Metric::name() const {
    switch (kind) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::manhattan: return "manhattan";
    case MetricKind::chebyshev: return "chebyshev";
    case MetricKind::canberra: return "canberra";
    case MetricKind::cosine: return "cosine";
    case MetricKind::chord: return "chord";
    case MetricKind::spherical_radius: return "spherical_radius";
    case MetricKind::minkowski: {
        std::ostringstream os;
        os << "minkowski:" << exponent;
        return os.str();
    }
    }
    return "unknown";
}

std::vector<Metric> metric_registry() {
    return {Metric{MetricKind::euclidean},   Metric{MetricKind::manhattan}, Metric{MetricKind::chebyshev},
            Metric::minkowski(3.0),          Metric{MetricKind::canberra},  Metric{MetricKind::cosine},
            Metric{MetricKind::chord},       Metric{MetricKind::spherical_radius}};
}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    if (values_.size() != n_ * n_) {
        throw InvalidArgument("distance matrix storage does not match n x n");
    }
}

namespace {

double norm2(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) {
        s += v * v;
    }
    return std::sqrt(s);
}

// Distance between normalised vectors; na and nb are the precomputed norms.
double chord_normalized(std::span<const double> a, double na, std::span<const double> b, double nb) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] / na - b[k] / nb;
        s += d * d;
    }
    return std::sqrt(s);
}

// Angle between the vectors scaled to [0, 1]; a metric on the unit sphere.
double angular_normalized(double chord) {
    return 2.0 * std::asin(std::clamp(chord / 2.0, 0.0, 1.0)) / std::numbers::pi;
}

double pair_distance(const Metric& metric, std::span<const double> a, double na, std::span<const double> b,
                     double nb) {
    switch (metric.kind) {
    case MetricKind::euclidean: {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double d = a[k] - b[k];
            s += d * d;
        }
        return std::sqrt(s);
    }
    case MetricKind::manhattan: {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            s += std::abs(a[k] - b[k]);
        }
        return s;
    }
    case MetricKind::chebyshev: {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            s = std::max(s, std::abs(a[k] - b[k]));
        }
        return s;
    }
    case MetricKind::minkowski: {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            s += std::pow(std::abs(a[k] - b[k]), metric.exponent);
        }
        return std::pow(s, 1.0 / metric.exponent);
    }
    case MetricKind::canberra: {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double den = std::abs(a[k]) + std::abs(b[k]);
            if (den > 0.0) {
                s += std::abs(a[k] - b[k]) / den;
            }
        }
        return s;
    }
    case MetricKind::chord:
        return chord_normalized(a, na, b, nb);
    case MetricKind::cosine:
        return angular_normalized(chord_normalized(a, na, b, nb));
    case MetricKind::spherical_radius:
        return std::abs(a[0] - b[0]);
    }
    return 0.0;
}

bool needs_norms(const Metric& m) { return m.kind == MetricKind::cosine || m.kind == MetricKind::chord; }

} // namespace

double metric_distance(const Metric& metric, std::span<const double> a, std::span<const double> b) {
    double na = 1.0;
    double nb = 1.0;
    if (needs_norms(metric)) {
        na = norm2(a);
        nb = norm2(b);
        if (na == 0.0 || nb == 0.0) {
            throw InvalidArgument(metric.name() + " distance is undefined for zero vectors");
        }
    }
    return pair_distance(metric, a, na, b, nb);
}

DistanceMatrix compute_distance_matrix(const DataMatrix& data, const Metric& metric, const ComputeOptions& options) {
    if (metric.requires_spherical() && data.coordinate_system() != CoordinateSystem::spherical) {
        throw InvalidArgument("metric " + metric.name() + " requires data in spherical coordinates");
    }
    if (metric.kind == MetricKind::minkowski && !(metric.exponent > 0.0)) {
        throw InvalidArgument("minkowski exponent must be positive");
    }
    const std::size_t n = data.rows();
    std::vector<double> norms(n, 1.0);
    if (needs_norms(metric)) {
        std::vector<std::size_t> zero_rows;
        for (std::size_t i = 0; i < n; ++i) {
            norms[i] = norm2(data.row(i));
            if (norms[i] == 0.0) {
                zero_rows.push_back(i + 1);
            }
        }
        if (!zero_rows.empty()) {
            std::string rows;
            for (std::size_t r = 0; r < zero_rows.size() && r < 20; ++r) {
                rows += (r ? ", " : "") + std::to_string(zero_rows[r]);
            }
            if (zero_rows.size() > 20) {
                rows += ", ...";
            }
            throw InvalidArgument(metric.name() + " distance is undefined for zero vectors (rows " + rows + ")");
        }
    }

    DistanceMatrix d(n);
    parallel_blocks(n, options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto a = data.row(i);
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = pair_distance(metric, a, norms[i], data.row(j), norms[j]);
                d(i, j) = v;
                d(j, i) = v;
            }
        }
    });
    return d;
}

ValidationReport validate_distance_matrix(const DistanceMatrix& d, std::size_t triangle_samples, std::uint64_t seed) {
    ValidationReport rep;
    const std::size_t n = d.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rep.max_abs_diagonal = std::max(rep.max_abs_diagonal, std::abs(d(i, i)));
        for (std::size_t j = 0; j < n; ++j) {
            const double v = d(i, j);
            scale = std::max(scale, std::abs(v));
            if (v < 0.0) {
                ++rep.negative_count;
            }
            if (i < j) {
                rep.max_asymmetry = std::max(rep.max_asymmetry, std::abs(v - d(j, i)));
                if (v == 0.0) {
                    ++rep.zero_off_diagonal;
                }
            }
        }
    }
    const double tol = 1e-12 * std::max(1.0, scale);
    const auto check = [&](std::size_t i, std::size_t j, std::size_t k) {
        ++rep.triples_checked;
        if (d(i, j) > d(i, k) + d(k, j) + tol) {
            ++rep.triangle_violations;
            if (rep.violation_examples.size() < 10) {
                rep.violation_examples.push_back({i, j, k});
            }
        }
    };
    if (n < 3) {
        rep.exhaustive = true;
        return rep;
    }
    if (n <= kExhaustiveTriangleLimit) {
        rep.exhaustive = true;
        for (std::size_t i = 0; i < n; ++i) {
            // Symmetry is checked separately, so each unordered pair {i, j} is tested once.
            for (std::size_t j = i + 1; j < n; ++j) {
                for (std::size_t k = 0; k < n; ++k) {
                    if (k != i && k != j) {
                        check(i, j, k);
                    }
                }
            }
        }
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t s = 0; s < triangle_samples; ++s) {
            const std::size_t i = pick(rng);
            std::size_t j = pick(rng);
            std::size_t k = pick(rng);
            if (i == j || k == i || k == j) {
                continue;
            }
            check(i, j, k);
        }
    }
    return rep;
}

DistanceFeature extract_distance_feature(const DistanceMatrix& d, std::string source) {
    const std::size_t n = d.size();
    DistanceFeature df;
    df.source = std::move(source);
    const std::size_t m = n * (n - 1) / 2;
    df.values.reserve(m);
    df.index_map.reserve(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            df.values.push_back(d(i, j));
            df.index_map.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        }
    }
    return df;
}

DistanceMatrix scatter_distance_feature(const DistanceFeature& df) {
    // Solve n(n-1)/2 = size for n.
    const auto m = df.values.size();
    const auto n = static_cast<std::size_t>(std::llround((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(m))) / 2.0));
    if (n * (n - 1) / 2 != m || df.index_map.size() != m) {
        throw InvalidArgument("distance feature is not a full upper triangle");
    }
    DistanceMatrix d(n);
    for (std::size_t k = 0; k < m; ++k) {
        const auto [i, j] = df.index_map[k];
        d(i, j) = df.values[k];
        d(j, i) = df.values[k];
    }
    return d;
}

DistanceMatrix parse_distance_matrix(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) {
            continue;
        }
        std::vector<double> row;
        const auto fields = detail::split_fields(line);
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const auto v = detail::parse_real(fields[j]);
            if (!v) {
                throw ParseError("cannot parse '" + std::string(fields[j]) + "' at row " + std::to_string(line_no) +
                                     ", column " + std::to_string(j + 1),
                                 line_no, j + 1);
            }
            if (*v < 0.0) {
                throw ParseError("negative distance at row " + std::to_string(line_no) + ", column " +
                                     std::to_string(j + 1),
                                 line_no, j + 1);
            }
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError("empty distance matrix file", 0, 0);
    }
    const std::size_t m = rows.size();
    const bool square = std::all_of(rows.begin(), rows.end(), [&](const auto& r) { return r.size() == m; });
    bool lower = true;
    for (std::size_t r = 0; r < m; ++r) {
        lower = lower && rows[r].size() == r + 1;
    }
    if (square && m >= 2) {
        DistanceMatrix d(m);
        for (std::size_t i = 0; i < m; ++i) {
            if (std::abs(rows[i][i]) > 1e-12) {
                throw ParseError("nonzero diagonal entry at row " + std::to_string(i + 1), i + 1, i + 1);
            }
            for (std::size_t j = 0; j < m; ++j) {
                if (i < j && std::abs(rows[i][j] - rows[j][i]) > 1e-9) {
                    throw ParseError("asymmetric distance matrix at (" + std::to_string(i + 1) + ", " +
                                         std::to_string(j + 1) + ")",
                                     i + 1, j + 1);
                }
                d(i, j) = i == j ? 0.0 : 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        return d;
    }
    if (lower) {
        // Row r (0-based) of the file holds the r+1 entries left of the diagonal of matrix row r+1.
        const std::size_t n = m + 1;
        DistanceMatrix d(n);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t j = 0; j < rows[r].size(); ++j) {
                d(r + 1, j) = rows[r][j];
                d(j, r + 1) = rows[r][j];
            }
        }
        return d;
    }
    throw ParseError("distance matrix is neither square nor a strict lower triangle", 0, 0);
}

DistanceMatrix load_distance_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return parse_distance_matrix(in);
}

void write_distance_matrix(std::ostream& out, const DistanceMatrix& d) {
    out.precision(17);
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) {
            out << (j ? "," : "") << d(i, j);
        }
        out << '\n';
    }
}

void write_distance_matrix(const std::filesystem::path& path, const DistanceMatrix& d) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    write_distance_matrix(out, d);
}

ContrastReport relative_contrast(const DataMatrix& data, const Metric& metric, std::span<const double> reference) {
    if (reference.size() != data.cols()) {
        throw InvalidArgument("reference point dimension does not match the data");
    }
    ContrastReport rep;
    rep.d_min = std::numeric_limits<double>::infinity();
    rep.d_max = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const double v = metric_distance(metric, reference, data.row(i));
        rep.d_min = std::min(rep.d_min, v);
        rep.d_max = std::max(rep.d_max, v);
    }
    if (rep.d_min == 0.0) {
        throw InvalidArgument("reference coincides with a data point (Dmin = 0)");
    }
    rep.relative_contrast = (rep.d_max - rep.d_min) / rep.d_min;
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < reference.size() && k < 8; ++k) {
        os << (k ? ", " : "") << reference[k];
    }
    if (reference.size() > 8) {
        os << ", ... [d=" << reference.size() << "]";
    }
    os << ')';
    rep.reference = os.str();
    return rep;
}

} // namespace distsel
