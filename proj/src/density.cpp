#include "distsel/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "distsel/error.hpp"

namespace distsel {

double trapezoid(std::span<const double> x, std::span<const double> y) {
    double area = 0.0;
    for (std::size_t i = 1; i < x.size() && i < y.size(); ++i) {
        area += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    return area;
}

namespace {

std::vector<double> sorted_finite(std::span<const double> sample) {
    std::vector<double> sorted(sample.begin(), sample.end());
    for (double v : sorted) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("density sample contains non-finite values");
        }
    }
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

double radius_of_sorted(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    std::vector<double> sub;
    if (n > kRadiusSubsample) {
        sub.reserve(kRadiusSubsample);
        for (std::size_t i = 0; i < kRadiusSubsample; ++i) {
            const double pos = static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(kRadiusSubsample - 1);
            sub.push_back(sorted[static_cast<std::size_t>(std::llround(pos))]);
        }
    } else {
        sub = sorted;
    }
    std::vector<double> diffs;
    diffs.reserve(sub.size() * (sub.size() - 1) / 2);
    for (std::size_t i = 0; i < sub.size(); ++i) {
        for (std::size_t j = i + 1; j < sub.size(); ++j) {
            diffs.push_back(sub[j] - sub[i]);
        }
    }
    if (diffs.empty()) {
        return 0.0;
    }
    const auto k = static_cast<std::size_t>(0.18 * static_cast<double>(diffs.size() - 1));
    std::nth_element(diffs.begin(), diffs.begin() + static_cast<std::ptrdiff_t>(k), diffs.end());
    double r = diffs[k];
    if (r <= 0.0) {
        // Heavy ties: fall back to the smallest positive difference quantile.
        std::sort(diffs.begin(), diffs.end());
        const auto first_pos = std::upper_bound(diffs.begin(), diffs.end(), 0.0);
        if (first_pos != diffs.end()) {
            const auto offset = static_cast<std::size_t>(0.18 * static_cast<double>(diffs.end() - first_pos - 1));
            r = *(first_pos + static_cast<std::ptrdiff_t>(offset));
        }
    }
    return r;
}

} // namespace

double pareto_radius(std::span<const double> sample) { return radius_of_sorted(sorted_finite(sample)); }

DensityEstimate pareto_density(std::span<const double> sample, std::size_t grid_size) {
    if (sample.size() < 10) {
        throw InvalidArgument("density estimation needs at least 10 observations");
    }
    if (grid_size < 3) {
        throw InvalidArgument("density grid needs at least 3 points");
    }
    const auto sorted = sorted_finite(sample);
    DensityEstimate est;
    const double lo = sorted.front();
    const double hi = sorted.back();
    if (lo == hi) {
        const double h = std::max(std::abs(lo), 1.0) * 1e-6;
        est.degenerate = true;
        est.pareto_radius = h;
        est.kernel_points = {lo - h, lo, lo + h};
        est.densities = {0.0, 1.0 / h, 0.0};
        return est;
    }
    const double r = radius_of_sorted(sorted);
    est.pareto_radius = r;
    const double start = lo - r;
    const double stop = hi + r;
    const double n = static_cast<double>(sorted.size());
    est.kernel_points.resize(grid_size);
    est.densities.resize(grid_size);
    for (std::size_t g = 0; g < grid_size; ++g) {
        const double x = start + (stop - start) * static_cast<double>(g) / static_cast<double>(grid_size - 1);
        const auto first = std::lower_bound(sorted.begin(), sorted.end(), x - r);
        const auto last = std::upper_bound(sorted.begin(), sorted.end(), x + r);
        est.kernel_points[g] = x;
        est.densities[g] = static_cast<double>(last - first) / (n * 2.0 * r);
    }
    const double area = trapezoid(est.kernel_points, est.densities);
    if (area > 0.0) {
        for (auto& d : est.densities) {
            d /= area;
        }
    }
    return est;
}

MdPlotSpec md_plot(const std::vector<SeriesInput>& series, const GmmModel* overlay,
                   std::span<const double> boundaries, const MdPlotConfig& config) {
    if (series.empty()) {
        throw InvalidArgument("MD plot needs at least one series");
    }
    MdPlotSpec spec;
    spec.range_min = std::numeric_limits<double>::infinity();
    spec.range_max = -std::numeric_limits<double>::infinity();
    bool any_regular = false;
    for (const auto& s : series) {
        MdPlotSeries out;
        out.label = s.label;
        out.density = pareto_density(s.sample, config.grid_size);
        out.dip = dip_test(s.sample, config.dip);
        out.sample_size = s.sample.size();
        std::vector<double> tmp = s.sample;
        std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(tmp.size() / 2), tmp.end());
        out.median = tmp[tmp.size() / 2];
        any_regular = any_regular || !out.density.degenerate;
        spec.range_min = std::min(spec.range_min, out.density.kernel_points.front());
        spec.range_max = std::max(spec.range_max, out.density.kernel_points.back());
        spec.series.push_back(std::move(out));
    }
    if (!any_regular) {
        throw InvalidArgument("MD plot needs at least one non-degenerate series");
    }
    if (overlay) {
        MdPlotOverlay ov;
        ov.model = *overlay;
        for (std::size_t i = 0; i < overlay->components(); ++i) {
            spec.range_min = std::min(spec.range_min, overlay->means()[i] - 5.0 * overlay->sds()[i]);
            spec.range_max = std::max(spec.range_max, overlay->means()[i] + 5.0 * overlay->sds()[i]);
        }
        const std::size_t pts = std::max<std::size_t>(config.overlay_points, 3);
        for (std::size_t g = 0; g < pts; ++g) {
            const double x = spec.range_min + (spec.range_max - spec.range_min) * static_cast<double>(g) /
                                                  static_cast<double>(pts - 1);
            ov.x.push_back(x);
            ov.y.push_back(gmm_pdf(*overlay, x));
        }
        for (double b : boundaries) {
            if (b >= spec.range_min && b <= spec.range_max) {
                ov.boundaries.push_back(b);
            }
        }
        spec.overlay = std::move(ov);
    }
    return spec;
}

} // namespace distsel
