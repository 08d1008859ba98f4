// SPDX-License-Identifier: Apache-2.0
#include "mvtal/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mvtal/election.hpp"

namespace mvtal {

namespace {

constexpr double kWidth = 1200.0;
constexpr double kHeight = 320.0;
constexpr double kMarginLeft = 50.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 20.0;
constexpr double kMarginBottom = 35.0;
constexpr int kMaxPolylinePoints = 2000;

const char* kViewColors[] = {"#1f77b4", "#e6b800", "#2ca02c", "#9467bd", "#8c564b", "#17becf"};

std::string num(double v) { return format_fixed(v, 2); }

struct Geometry {
    int num_frames;

    double x(double frame) const {
        return kMarginLeft + (kWidth - kMarginLeft - kMarginRight) * frame /
                                 std::max(num_frames - 1, 1);
    }
    double y(double p) const {
        return kMarginTop + (kHeight - kMarginTop - kMarginBottom) * (1.0 - std::clamp(p, 0.0, 1.0));
    }
};

// One polyline through the per-frame values, downsampled for long videos.
std::string polyline(const Geometry& geo, const std::vector<double>& values, const char* color,
                     double opacity, double stroke_width, const char* dash) {
    const int step = std::max(1, static_cast<int>(values.size()) / kMaxPolylinePoints);
    std::string points;
    for (size_t t = 0; t < values.size(); t += static_cast<size_t>(step)) {
        points += num(geo.x(static_cast<double>(t)));
        points += ',';
        points += num(geo.y(values[t]));
        points += ' ';
    }
    if (!points.empty()) points.pop_back();
    std::string out = "  <polyline fill=\"none\" stroke=\"" + std::string(color) +
                      "\" stroke-opacity=\"" + num(opacity) + "\" stroke-width=\"" +
                      num(stroke_width) + "\"";
    if (dash) out += " stroke-dasharray=\"" + std::string(dash) + "\"";
    out += " points=\"" + points + "\"/>\n";
    return out;
}

std::string star_path(double cx, double cy, double radius) {
    std::string d;
    for (int k = 0; k < 10; ++k) {
        const double r = k % 2 == 0 ? radius : radius * 0.45;
        const double angle = -3.14159265358979323846 / 2.0 + k * 3.14159265358979323846 / 5.0;
        d += (k == 0 ? "M" : "L");
        d += num(cx + r * std::cos(angle));
        d += ' ';
        d += num(cy + r * std::sin(angle));
    }
    d += "Z";
    return d;
}

}  // namespace

std::string election_svg_string(const ProbabilityTensor& tensor, const ElectionConfig& config,
                                int class_id, const std::optional<ActionSegment>& gt) {
    if (class_id < 0 || class_id >= config.num_classes)
        throw RangeError("election svg: class_id " + std::to_string(class_id) +
                         " outside [0, " + std::to_string(config.num_classes) + ")");

    const ElectionOutcome outcome = elect_detailed(tensor, config);
    const Geometry geo{tensor.num_frames()};
    const double threshold = config.thresholds[static_cast<size_t>(class_id)];

    std::string svg =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " +
        num(kWidth) + " " + num(kHeight) + "\" width=\"" + num(kWidth) + "\" height=\"" +
        num(kHeight) + "\">\n";
    svg += "  <rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" fill=\"white\"/>\n";

    // Axes.
    svg += "  <line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(geo.y(0.0)) + "\" x2=\"" +
           num(kWidth - kMarginRight) + "\" y2=\"" + num(geo.y(0.0)) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "  <line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(geo.y(0.0)) + "\" x2=\"" +
           num(kMarginLeft) + "\" y2=\"" + num(geo.y(1.0)) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // Shaded super-threshold candidate regions (post merge).
    for (const Candidate& cand : outcome.merged_candidates[static_cast<size_t>(class_id)]) {
        const double x0 = geo.x(cand.start_frame);
        const double x1 = geo.x(cand.end_frame);
        svg += "  <rect x=\"" + num(x0) + "\" y=\"" + num(geo.y(1.0)) + "\" width=\"" +
               num(std::max(x1 - x0, 1.0)) + "\" height=\"" + num(geo.y(0.0) - geo.y(1.0)) +
               "\" fill=\"#d62728\" fill-opacity=\"0.15\"/>\n";
    }

    // Per-view curves, opacity proportional to the class's view weight.
    std::vector<double> series(static_cast<size_t>(tensor.num_frames()), 0.0);
    for (int m = 0; m < config.num_views; ++m) {
        for (int t = 0; t < tensor.num_frames(); ++t)
            series[static_cast<size_t>(t)] = tensor.at(t, class_id, m);
        const double opacity = std::clamp(config.weight(class_id, m), 0.08, 1.0);
        svg += polyline(geo, series, kViewColors[m % 6], opacity, 1.0, "2,3");
    }

    // Aggregated curve.
    for (int t = 0; t < tensor.num_frames(); ++t)
        series[static_cast<size_t>(t)] = outcome.signal.at(t, class_id);
    svg += polyline(geo, series, "#d62728", 1.0, 1.6, nullptr);

    // Threshold line.
    svg += "  <line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(geo.y(threshold)) + "\" x2=\"" +
           num(kWidth - kMarginRight) + "\" y2=\"" + num(geo.y(threshold)) +
           "\" stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";

    // Ground-truth boundaries.
    if (gt) {
        for (double boundary_s : {gt->start_s, gt->end_s}) {
            const double x = geo.x(boundary_s * config.tb.fps);
            svg += "  <line x1=\"" + num(x) + "\" y1=\"" + num(geo.y(1.0)) + "\" x2=\"" + num(x) +
                   "\" y2=\"" + num(geo.y(0.0)) +
                   "\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"8,3,2,3\"/>\n";
        }
    }

    // Star at the winning candidate's midpoint. Fallback emissions are not
    // candidates, so they draw nothing.
    const auto& selection = outcome.selections[static_cast<size_t>(class_id)];
    if (selection && !selection->from_fallback) {
        const double mid_s = 0.5 * (selection->segment.start_s + selection->segment.end_s);
        const double cx = geo.x(mid_s * config.tb.fps);
        const double cy = geo.y(std::min(selection->mean_score + 0.06, 1.0));
        svg += "  <path d=\"" + star_path(cx, cy, 9.0) +
               "\" fill=\"#ffd700\" stroke=\"#b8860b\" stroke-width=\"1\"/>\n";
    }

    svg += "</svg>\n";
    return svg;
}

void render_election_svg(const ProbabilityTensor& tensor, const ElectionConfig& config,
                         int class_id, const std::optional<ActionSegment>& gt,
                         const std::string& out_path) {
    const std::string svg = election_svg_string(tensor, config, class_id, gt);
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(out_path + ": cannot open for writing");
    out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    if (!out) throw IoError(out_path + ": write failed");
}

}  // namespace mvtal
