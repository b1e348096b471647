#pragma once

#include <string>
#include <vector>

#include "porosim/analysis.hpp"
#include "porosim/grid.hpp"

namespace porosim {

/// Minimal SVG assembler: just the primitives the plots need.
class SvgCanvas {
public:
    SvgCanvas(double width, double height);

    void rect(double x, double y, double w, double h, const std::string& fill);
    void polyline(const std::vector<std::pair<double, double>>& pts,
                  const std::string& stroke, double stroke_width = 1.0);
    void circle(double cx, double cy, double r, const std::string& fill);
    void text(double x, double y, const std::string& s, int font_size = 12);
    void line(double x1, double y1, double x2, double y2,
              const std::string& stroke, double stroke_width = 1.0);

    std::string str() const;
    void save(const std::string& path) const;

private:
    double width_, height_;
    std::string body_;
};

/// 1D run: displacement profiles of a handful of slices plus the free
/// boundary trace in the (x, t) plane.
void write_profile_svg(const ScalarField& u, const FreeBoundarySet& fb,
                       const std::string& path);

/// 2D run: final-slice filled contour bands of u with the Gamma polyline,
/// singular points marked.
void write_contour_svg(const ScalarField& u, const FreeBoundarySet& fb,
                       const std::string& path, int t_idx = -1);

/// Dispatches on dimension.
void write_overlay_svg(const ScalarField& u, const FreeBoundarySet& fb,
                       const std::string& path);

}  // namespace porosim
