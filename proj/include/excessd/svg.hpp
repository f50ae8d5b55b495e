#pragma once

#include <sstream>
#include <string>
#include <vector>

namespace excessd::svg {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

std::string fmt(double v);

/// Minimal deterministic SVG writer; all coordinates are pixels with the
/// origin at the top-left per SVG convention.
class Canvas {
public:
    Canvas(double width, double height);

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0, const std::string& dash = "");
    void polyline(const std::vector<Point>& pts, const std::string& stroke,
                  double stroke_width = 1.0, const std::string& dash = "");
    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& stroke = "none");
    void diamond(double cx, double cy, double r, const std::string& stroke);
    void rect(double x, double y, double w, double h, const std::string& fill,
              double opacity = 1.0);
    void path(const std::string& d, const std::string& stroke, const std::string& fill,
              double stroke_width = 1.0, const std::string& dash = "");
    void text(double x, double y, const std::string& s, double size = 11.0,
              const std::string& anchor = "start");
    void comment(const std::string& s);

    double width() const { return width_; }
    double height() const { return height_; }
    std::string finish() const;

private:
    double width_, height_;
    std::ostringstream body_;
};

/// Maps a data interval onto a pixel interval.
struct LinearMap {
    double d0 = 0.0, d1 = 1.0;
    double p0 = 0.0, p1 = 1.0;
    double operator()(double v) const {
        return p0 + (v - d0) / (d1 - d0) * (p1 - p0);
    }
};

/// Round tick positions covering [lo, hi] (1-2-5 progression).
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

/// Axis-frame helper: draws the plot box, ticks and labels, and exposes the
/// data-to-pixel maps for the panel's interior.
class Frame {
public:
    Frame(Canvas& canvas, double x, double y, double w, double h,
          double xlo, double xhi, double ylo, double yhi);

    double px(double x) const { return xmap_(x); }
    double py(double y) const { return ymap_(y); }
    void draw_axes(const std::string& title = "",
                   const std::vector<std::pair<double, std::string>>& x_labels = {});

    Canvas& canvas() { return canvas_; }
    double left() const { return x_; }
    double top() const { return y_; }
    double right() const { return x_ + w_; }
    double bottom() const { return y_ + h_; }

private:
    Canvas& canvas_;
    double x_, y_, w_, h_;
    LinearMap xmap_, ymap_;
};

} // namespace excessd::svg
