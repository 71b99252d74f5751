#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "distsel/density.hpp"
#include "distsel/dip.hpp"
#include "distsel/error.hpp"
#include "oracles/dip_lp.hpp"

using namespace distsel;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(mean, sd);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = z(rng);
    }
    return v;
}

std::vector<double> bimodal_sample(std::size_t n, std::uint64_t seed) {
    auto a = normal_sample(n / 2, seed, 0.0, 1.0);
    const auto b = normal_sample(n - n / 2, seed + 1000, 6.0, 1.0);
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

double dip_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return dip_statistic_sorted(v).dip;
}

} // namespace

TEST_CASE("dip of tiny samples") {
    CHECK(dip_of({1.0, 2.0}) == doctest::Approx(0.25));
    CHECK(dip_of({1.0, 2.0, 3.0}) == doctest::Approx(1.0 / 6.0));
    CHECK(dip_of({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}) == doctest::Approx(0.05));
}

TEST_CASE("dip matches the LP oracle on random small samples") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> size(4, 8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(size(rng));
        std::vector<double> x(n);
        const bool two_lumps = trial % 2 == 1;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = u(rng) + (two_lumps && i % 2 ? 3.0 : 0.0);
        }
        CAPTURE(trial);
        CAPTURE(n);
        CHECK(std::abs(dip_of(x) - oracle::dip_by_lp(x)) <= 1e-10);
    }
}

TEST_CASE("dip bounds and invariances") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto v = normal_sample(50 + 7 * seed, seed);
        const double d = dip_of(v);
        const double n = static_cast<double>(v.size());
        CHECK(d >= 1.0 / (2.0 * n) - 1e-15);
        CHECK(d <= 0.25 + 1e-15);
        std::vector<double> affine(v.size());
        std::transform(v.begin(), v.end(), affine.begin(), [](double x) { return 3.5 * x - 2.0; });
        CHECK(dip_of(affine) == doctest::Approx(d).epsilon(1e-12));
        std::vector<double> reflected(v.size());
        std::transform(v.begin(), v.end(), reflected.begin(), [](double x) { return -x; });
        CHECK(dip_of(reflected) == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("dip test separates unimodal and bimodal samples") {
    const auto uni = dip_test(normal_sample(2000, 4), {500, 1});
    CHECK(uni.p_value > 0.05);
    CHECK(uni.n_boot == 500);
    CHECK(uni.sample_size == 2000);
    const auto bi = dip_test(bimodal_sample(2000, 4), {500, 1});
    CHECK(bi.p_value < 0.01);
    CHECK(bi.modal_low <= bi.modal_high);
}

TEST_CASE("dip test is reproducible and order independent") {
    auto v = bimodal_sample(300, 7);
    const auto a = dip_test(v, {200, 3});
    std::reverse(v.begin(), v.end());
    const auto b = dip_test(v, {200, 3});
    CHECK(a.statistic == b.statistic);
    CHECK(a.p_value == b.p_value);
}

TEST_CASE("dip test rejects too small samples") {
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(dip_test(one), InvalidArgument);
}

TEST_CASE("pareto radius follows the percentile rule") {
    // Independent computation: all pairwise |differences|, sorted, 18th percentile.
    const auto v = normal_sample(300, 12);
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    std::vector<double> diffs;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            diffs.push_back(s[j] - s[i]);
        }
    }
    std::sort(diffs.begin(), diffs.end());
    const auto idx = static_cast<std::size_t>(std::floor(0.18 * static_cast<double>(diffs.size() - 1)));
    CHECK(pareto_radius(v) == doctest::Approx(diffs[idx]).epsilon(1e-14));
}

TEST_CASE("pareto density integrates to one and covers the data") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto v = bimodal_sample(1500, seed);
        const auto est = pareto_density(v);
        REQUIRE(est.kernel_points.size() == kDefaultGridSize);
        CHECK(std::is_sorted(est.kernel_points.begin(), est.kernel_points.end()));
        CHECK(std::adjacent_find(est.kernel_points.begin(), est.kernel_points.end()) == est.kernel_points.end());
        CHECK(trapezoid(est.kernel_points, est.densities) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::all_of(est.densities.begin(), est.densities.end(), [](double y) { return y >= 0.0; }));
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        CHECK(est.kernel_points.front() <= *lo);
        CHECK(est.kernel_points.back() >= *hi);
        CHECK(est.pareto_radius > 0.0);
    }
}

TEST_CASE("pareto density shows two modes for well separated data") {
    const auto est = pareto_density(bimodal_sample(2000, 2));
    std::size_t peaks = 0;
    const auto& y = est.densities;
    const double top = *std::max_element(y.begin(), y.end());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > 0.3 * top) {
            ++peaks;
        }
    }
    CHECK(peaks >= 2);
    std::size_t mid = 0;
    while (est.kernel_points[mid] < 3.0) {
        ++mid;
    }
    CHECK(y[mid] < 0.2 * top);
}

TEST_CASE("constant sample gives a degenerate spike") {
    const std::vector<double> v(20, 2.5);
    const auto est = pareto_density(v);
    CHECK(est.degenerate);
    CHECK(trapezoid(est.kernel_points, est.densities) == doctest::Approx(1.0));
}

TEST_CASE("md plot and svg output") {
    std::vector<SeriesInput> in{{"all", bimodal_sample(400, 1)}, {"part", normal_sample(200, 2)}};
    const GmmModel model({0.5, 0.5}, {0.0, 6.0}, {1.0, 1.0});
    const std::vector<double> bounds{3.0};
    const auto spec = md_plot(in, &model, bounds, MdPlotConfig{256, {100, 1}, 200});
    REQUIRE(spec.series.size() == 2);
    CHECK(spec.series[0].label == "all");
    CHECK(spec.series[1].sample_size == 200);
    REQUIRE(spec.overlay);
    CHECK(spec.overlay->x.size() == 200);
    CHECK(spec.range_min < spec.range_max);
    const auto svg = render_svg(spec, "demo");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("demo") != std::string::npos);
    CHECK(svg == render_svg(spec, "demo"));
}

TEST_CASE("dip test holds its level under the uniform null") {
    std::size_t rejections = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> v(100);
        for (auto& x : v) {
            x = u(rng);
        }
        rejections += dip_test(v, {1000, 77}).p_value < 0.05 ? 1 : 0;
    }
    const double rate = static_cast<double>(rejections) / 200.0;
    CAPTURE(rate);
    CHECK(rate >= 0.02);
    CHECK(rate <= 0.08);
}
