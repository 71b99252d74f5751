#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distsel/dip.hpp"
#include "distsel/gmm.hpp"

namespace distsel {

struct DensityEstimate {
    std::vector<double> kernel_points;  // strictly increasing
    std::vector<double> densities;      // integrates to 1 (trapezoid)
    double pareto_radius = 0.0;
    bool degenerate = false;  // constant sample: a single spike
    std::string radius_rule = "p18_abs_pairwise_differences";
};

inline constexpr std::size_t kDefaultGridSize = 512;
inline constexpr std::size_t kRadiusSubsample = 1000;

// 18th percentile of |x_i - x_j| over all pairs, computed on at most
// kRadiusSubsample evenly spaced order statistics.
double pareto_radius(std::span<const double> sample);

// Uniform-kernel density at grid_size points spanning [min - r, max + r].
DensityEstimate pareto_density(std::span<const double> sample, std::size_t grid_size = kDefaultGridSize);

double trapezoid(std::span<const double> x, std::span<const double> y);

struct MdPlotSeries {
    std::string label;
    DensityEstimate density;
    DipResult dip;
    std::size_t sample_size = 0;
    double median = 0.0;
};

struct MdPlotOverlay {
    GmmModel model;
    std::vector<double> x;  // curve abscissae covering the plot range
    std::vector<double> y;  // gmm_pdf at x
    std::vector<double> boundaries;
};

struct MdPlotSpec {
    std::vector<MdPlotSeries> series;
    std::optional<MdPlotOverlay> overlay;
    double range_min = 0.0;
    double range_max = 0.0;
};

struct SeriesInput {
    std::string label;
    std::vector<double> sample;
};

struct MdPlotConfig {
    std::size_t grid_size = kDefaultGridSize;
    DipTestConfig dip;
    std::size_t overlay_points = 1024;
};

// One density estimate and dip test per series, in the order given.
MdPlotSpec md_plot(const std::vector<SeriesInput>& series, const GmmModel* overlay = nullptr,
                   std::span<const double> boundaries = {}, const MdPlotConfig& config = {});

// Deterministic SVG: one mirrored silhouette per series on a shared value axis,
// Bayes boundaries as horizontal rules.
std::string render_svg(const MdPlotSpec& spec, const std::string& title = "");
void write_svg(const MdPlotSpec& spec, const std::filesystem::path& path, const std::string& title = "");

} // namespace distsel
