#include "excessd/svg.hpp"

#include <cmath>
#include <cstdio>

namespace excessd::svg {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

Canvas::Canvas(double width, double height) : width_(width), height_(height) {}

void Canvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                  double stroke_width, const std::string& dash) {
    body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
          << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt(stroke_width) << "\"";
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
    body_ << "/>\n";
}

void Canvas::polyline(const std::vector<Point>& pts, const std::string& stroke,
                      double stroke_width, const std::string& dash) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt(stroke_width) << "\"";
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
    body_ << " points=\"";
    for (const auto& p : pts) body_ << fmt(p.x) << ',' << fmt(p.y) << ' ';
    body_ << "\"/>\n";
}

void Canvas::circle(double cx, double cy, double r, const std::string& fill,
                    const std::string& stroke) {
    body_ << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(r)
          << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
}

void Canvas::diamond(double cx, double cy, double r, const std::string& stroke) {
    body_ << "<path fill=\"none\" stroke=\"" << stroke << "\" d=\"M" << fmt(cx - r) << ' '
          << fmt(cy) << "L" << fmt(cx) << ' ' << fmt(cy - r) << "L" << fmt(cx + r) << ' '
          << fmt(cy) << "L" << fmt(cx) << ' ' << fmt(cy + r) << "Z\"/>\n";
}

void Canvas::rect(double x, double y, double w, double h, const std::string& fill,
                  double opacity) {
    body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
          << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\"";
    if (opacity < 1.0) body_ << " fill-opacity=\"" << fmt(opacity) << "\"";
    body_ << "/>\n";
}

void Canvas::path(const std::string& d, const std::string& stroke, const std::string& fill,
                  double stroke_width, const std::string& dash) {
    body_ << "<path d=\"" << d << "\" stroke=\"" << stroke << "\" fill=\"" << fill
          << "\" stroke-width=\"" << fmt(stroke_width) << "\"";
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
    body_ << "/>\n";
}

void Canvas::text(double x, double y, const std::string& s, double size,
                  const std::string& anchor) {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << fmt(size)
          << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << s
          << "</text>\n";
}

void Canvas::comment(const std::string& s) {
    body_ << "<!--\n" << s << "\n-->\n";
}

std::string Canvas::finish() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width_)
        << "\" height=\"" << fmt(height_) << "\" viewBox=\"0 0 " << fmt(width_) << ' '
        << fmt(height_) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
    std::vector<double> ticks;
    if (!(hi > lo)) {
        ticks.push_back(lo);
        return ticks;
    }
    double raw_step = (hi - lo) / std::max(target, 2);
    double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
    double norm = raw_step / mag;
    double step = mag * (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0);
    double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 0.5 * step; v += step)
        ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return ticks;
}

Frame::Frame(Canvas& canvas, double x, double y, double w, double h,
             double xlo, double xhi, double ylo, double yhi)
    : canvas_(canvas), x_(x), y_(y), w_(w), h_(h) {
    xmap_ = {xlo, xhi, x, x + w};
    ymap_ = {ylo, yhi, y + h, y}; // flipped: larger data values sit higher
}

void Frame::draw_axes(const std::string& title,
                      const std::vector<std::pair<double, std::string>>& x_labels) {
    canvas_.line(x_, y_ + h_, x_ + w_, y_ + h_, "black");
    canvas_.line(x_, y_, x_, y_ + h_, "black");
    if (!title.empty())
        canvas_.text(x_ + w_ / 2.0, y_ - 8.0, title, 12.0, "middle");

    for (double t : nice_ticks(ymap_.d0, ymap_.d1)) {
        if (t < ymap_.d0 - 1e-9 || t > ymap_.d1 + 1e-9) continue;
        double yp = py(t);
        canvas_.line(x_ - 4.0, yp, x_, yp, "black");
        canvas_.text(x_ - 7.0, yp + 3.5, fmt(t), 10.0, "end");
    }
    if (x_labels.empty()) {
        for (double t : nice_ticks(xmap_.d0, xmap_.d1)) {
            if (t < xmap_.d0 - 1e-9 || t > xmap_.d1 + 1e-9) continue;
            double xp = px(t);
            canvas_.line(xp, y_ + h_, xp, y_ + h_ + 4.0, "black");
            canvas_.text(xp, y_ + h_ + 16.0, fmt(t), 10.0, "middle");
        }
    } else {
        for (const auto& [v, label] : x_labels) {
            double xp = px(v);
            canvas_.line(xp, y_ + h_, xp, y_ + h_ + 4.0, "black");
            canvas_.text(xp, y_ + h_ + 16.0, label, 10.0, "middle");
        }
    }
}

} // namespace excessd::svg
