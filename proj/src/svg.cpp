#include "porosim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace porosim {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

// blue -> white -> warm ramp for u in [0, 1]
std::string heat_color(double s) {
    s = std::clamp(s, 0.0, 1.0);
    const int r = static_cast<int>(255 * std::min(1.0, 0.2 + 1.6 * s));
    const int g = static_cast<int>(255 * std::max(0.0, 1.0 - 1.2 * s));
    const int b = static_cast<int>(255 * std::max(0.0, 1.0 - 1.8 * s));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::rect(double x, double y, double w, double h,
                     const std::string& fill) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& stroke, double stroke_width) {
    if (pts.size() < 2) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
             num(stroke_width) + "\" points=\"";
    for (const auto& [x, y] : pts) body_ += num(x) + "," + num(y) + " ";
    body_ += "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
             "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& s, int font_size) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
             std::to_string(font_size) + "\" font-family=\"sans-serif\">" + s +
             "</text>\n";
}

void SvgCanvas::line(double x1, double y1, double x2, double y2,
                     const std::string& stroke, double stroke_width) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
             "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
             num(stroke_width) + "\"/>\n";
}

std::string SvgCanvas::str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) +
           "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " +
           num(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
           body_ + "</svg>\n";
}

void SvgCanvas::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << str();
}

void write_profile_svg(const ScalarField& u, const FreeBoundarySet& fb,
                       const std::string& path) {
    const Grid& g = u.grid();
    const TimeGrid& tg = u.time_grid();
    const double W = 720, H = 480, margin = 45;
    SvgCanvas svg(W, H);

    const double umax = std::max(u.max_value(), 1e-12);
    const double x0 = g.origin(0), x1 = g.origin(0) + g.extent(0);
    auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * (W - 2 * margin); };
    const double plot_h = 0.55 * (H - 3 * margin);
    auto py = [&](double v) { return margin + plot_h * (1.0 - v / umax); };

    // a handful of slices, early to late
    const int n_curves = std::min(6, tg.n_times());
    for (int c = 0; c < n_curves; ++c) {
        const int j = tg.n_steps * c / std::max(1, n_curves - 1);
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < g.n_nodes(0); ++i)
            pts.emplace_back(px(g.coord(0, i)), py(u.at_ij(i, 0, j)));
        const double shade = n_curves == 1 ? 1.0 : static_cast<double>(c) / (n_curves - 1);
        svg.polyline(pts, heat_color(0.15 + 0.8 * shade), c + 1 == n_curves ? 2.0 : 1.0);
    }
    svg.line(px(x0), py(0), px(x1), py(0), "#888888", 0.7);
    svg.text(margin, margin - 10, "u(x, t): slices from t0 (blue) to t_end (red)");

    // free boundary trace in the (x, t) band below
    const double band_top = margin + plot_h + margin;
    const double band_h = H - band_top - margin;
    auto pt = [&](double t) {
        return band_top + band_h * (1.0 - (t - tg.t0) / std::max(tg.t_end() - tg.t0, 1e-300));
    };
    svg.text(margin, band_top - 8, "free boundary points in the (x, t) plane");
    svg.rect(px(x0), band_top, px(x1) - px(x0), band_h, "#f7f7f7");
    for (const auto& bucket : fb.per_slice)
        for (const auto& p : bucket) {
            const std::string fill = p.label == FbLabel::singular ? "#cc0022"
                                     : p.label == FbLabel::regular ? "#0044cc"
                                                                   : "#555555";
            svg.circle(px(p.x[0]), pt(p.t), 1.6, fill);
        }
    svg.save(path);
}

void write_contour_svg(const ScalarField& u, const FreeBoundarySet& fb,
                       const std::string& path, int t_idx) {
    const Grid& g = u.grid();
    if (t_idx < 0) t_idx = u.time_grid().n_steps;
    const double W = 640, H = 640, margin = 40;
    SvgCanvas svg(W, H);

    const double umax = std::max(u.max_value(), 1e-12);
    const double x0 = g.origin(0), y0 = g.origin(1);
    auto px = [&](double x) { return margin + (x - x0) / g.extent(0) * (W - 2 * margin); };
    auto py = [&](double y) {
        return H - margin - (y - y0) / g.extent(1) * (H - 2 * margin);
    };

    // filled bands: one cell rectangle per grid cell, value binned to 8 levels
    const int levels = 8;
    for (int jj = 0; jj < g.n_cells(1); ++jj)
        for (int i = 0; i < g.n_cells(0); ++i) {
            const double v = 0.25 * (u.at_ij(i, jj, t_idx) + u.at_ij(i + 1, jj, t_idx) +
                                     u.at_ij(i, jj + 1, t_idx) +
                                     u.at_ij(i + 1, jj + 1, t_idx));
            const double band = std::floor(std::clamp(v / umax, 0.0, 0.999) * levels) /
                                static_cast<double>(levels);
            const double xa = px(g.coord(0, i)), yb = py(g.coord(1, jj + 1));
            svg.rect(xa, yb, px(g.coord(0, i + 1)) - xa, py(g.coord(1, jj)) - yb,
                     heat_color(band));
        }

    // Gamma polyline: join nearby crossing points slice-wise
    if (t_idx < static_cast<int>(fb.per_slice.size())) {
        for (const auto& p : fb.per_slice[t_idx]) {
            const std::string fill =
                p.label == FbLabel::singular ? "#cc0022" : "#000000";
            svg.circle(px(p.x[0]), py(p.x[1]), p.label == FbLabel::singular ? 3.0 : 1.2,
                       fill);
        }
    }
    svg.text(margin, margin - 12, "u and free boundary, final slice");
    svg.save(path);
}

void write_overlay_svg(const ScalarField& u, const FreeBoundarySet& fb,
                       const std::string& path) {
    if (u.grid().dim() == 1)
        write_profile_svg(u, fb, path);
    else
        write_contour_svg(u, fb, path);
}

}  // namespace porosim
