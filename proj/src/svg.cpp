#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "distsel/density.hpp"
#include "distsel/error.hpp"

namespace distsel {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_p(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

constexpr double kLeft = 70.0;
constexpr double kTop = 40.0;
constexpr double kPlotHeight = 360.0;
constexpr double kLane = 110.0;
constexpr double kHalfWidth = 48.0;

} // namespace

std::string render_svg(const MdPlotSpec& spec, const std::string& title) {
    if (spec.series.empty()) {
        throw InvalidArgument("cannot render an MD plot without series");
    }
    const std::size_t lanes = spec.series.size() + (spec.overlay ? 1 : 0);
    const double width = kLeft + kLane * static_cast<double>(lanes) + 20.0;
    const double height = kTop + kPlotHeight + 60.0;
    const double lo = spec.range_min;
    const double hi = spec.range_max > lo ? spec.range_max : lo + 1.0;
    const auto ypos = [&](double v) { return kTop + kPlotHeight * (hi - v) / (hi - lo); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
        << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        svg << "<text x=\"" << fmt(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
            << escape(title) << "</text>\n";
    }
    // Value axis with five ticks.
    svg << "<line x1=\"" << fmt(kLeft - 10) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft - 10) << "\" y2=\""
        << fmt(kTop + kPlotHeight) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        svg << "<text x=\"" << fmt(kLeft - 14) << "\" y=\"" << fmt(ypos(v) + 4) << "\" text-anchor=\"end\" font-size=\"10\">"
            << fmt(v) << "</text>\n";
    }

    const auto silhouette = [&](double cx, std::span<const double> xs, std::span<const double> ys,
                                const char* fill) {
        const double peak = *std::max_element(ys.begin(), ys.end());
        const double scale = peak > 0.0 ? kHalfWidth / peak : 0.0;
        svg << "<polygon fill=\"" << fill << "\" stroke=\"black\" stroke-width=\"0.5\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            svg << fmt(cx + ys[i] * scale) << ',' << fmt(ypos(xs[i])) << ' ';
        }
        for (std::size_t i = xs.size(); i-- > 0;) {
            svg << fmt(cx - ys[i] * scale) << ',' << fmt(ypos(xs[i])) << (i ? " " : "");
        }
        svg << "\"/>\n";
    };

    std::size_t lane = 0;
    for (const auto& s : spec.series) {
        const double cx = kLeft + kLane * (static_cast<double>(lane) + 0.5);
        silhouette(cx, s.density.kernel_points, s.density.densities, "#9ecae1");
        svg << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(kTop + kPlotHeight + 18) << "\" text-anchor=\"middle\" font-size=\"11\">"
            << escape(s.label) << "</text>\n";
        svg << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(kTop + kPlotHeight + 32) << "\" text-anchor=\"middle\" font-size=\"9\">"
            << "dip p=" << fmt_p(s.dip.p_value) << "</text>\n";
        ++lane;
    }
    if (spec.overlay) {
        const double cx = kLeft + kLane * (static_cast<double>(lane) + 0.5);
        silhouette(cx, spec.overlay->x, spec.overlay->y, "#fdd0a2");
        svg << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(kTop + kPlotHeight + 18) << "\" text-anchor=\"middle\" font-size=\"11\">"
            << "GMM (M=" << spec.overlay->model.components() << ")</text>\n";
        for (double b : spec.overlay->boundaries) {
            svg << "<line class=\"bayes-boundary\" x1=\"" << fmt(kLeft - 10) << "\" y1=\"" << fmt(ypos(b)) << "\" x2=\""
                << fmt(width - 10) << "\" y2=\"" << fmt(ypos(b)) << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
            svg << "<text x=\"" << fmt(width - 12) << "\" y=\"" << fmt(ypos(b) - 3) << "\" text-anchor=\"end\" font-size=\"9\" fill=\"#d62728\">BD="
                << fmt(b) << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_svg(const MdPlotSpec& spec, const std::filesystem::path& path, const std::string& title) {
    const auto text = render_svg(spec, title);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

} // namespace distsel
