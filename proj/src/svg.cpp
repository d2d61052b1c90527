#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "warpconv/errors.hpp"
#include "warpconv/io.hpp"

namespace warpconv {

namespace {

const char* const kColors[] = {"#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#2c3e50"};

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else if (c == '"') out += "&quot;";
        else out += c;
    }
    return out;
}

// Plot area with a linear world-to-pixel map, axes and a legend.
class Canvas {
public:
    Canvas(double x0, double x1, double y0, double y1, const std::string& title, const std::string& xlabel,
           const std::string& ylabel, bool equal_aspect = false)
        : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
        if (!(x1 > x0) || !(y1 > y0)) throw InvalidInput("plot range is empty");
        if (equal_aspect) {
            // Square world units: shrink the plot area along the longer axis.
            const double sx = pw_ / (x1 - x0), sy = ph_ / (y1 - y0);
            if (sx < sy) ph_ = sx * (y1 - y0);
            else pw_ = sy * (x1 - x0);
        }
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
             << int(top_ + ph_ + 60) << "\" viewBox=\"0 0 " << width_ << ' ' << int(top_ + ph_ + 60) << "\">\n";
        out_ << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" style=\"fill:#ffffff\"/>\n";
        out_ << "<defs><clipPath id=\"plot\"><rect x=\"" << fixed(left_) << "\" y=\"" << fixed(top_)
             << "\" width=\"" << fixed(pw_) << "\" height=\"" << fixed(ph_) << "\"/></clipPath></defs>\n";
        text(left_ + pw_ / 2, 24, title, "middle", 16);
        text(left_ + pw_ / 2, top_ + ph_ + 44, xlabel, "middle", 13);
        out_ << "<text x=\"18\" y=\"" << fixed(top_ + ph_ / 2) << "\" transform=\"rotate(-90 18 "
             << fixed(top_ + ph_ / 2) << ")\" style=\"font:13px sans-serif;text-anchor:middle\">" << escape(ylabel)
             << "</text>\n";
    }

    double px(double x) const { return left_ + (x - x0_) / (x1_ - x0_) * pw_; }
    double py(double y) const { return top_ + ph_ - (y - y0_) / (y1_ - y0_) * ph_; }

    void rect(double xa, double xb, double ya, double yb, const std::string& fill) {
        out_ << "<rect x=\"" << fixed(px(xa)) << "\" y=\"" << fixed(py(yb)) << "\" width=\""
             << fixed(px(xb) - px(xa) + 0.5) << "\" height=\"" << fixed(py(ya) - py(yb)) << "\" style=\"fill:" << fill
             << ";stroke:none\" clip-path=\"url(#plot)\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, double width = 1.5,
                  bool dashed = false, bool closed = false) {
        if (pts.size() < 2) return;
        out_ << "<" << (closed ? "polygon" : "polyline") << " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            out_ << (i ? " " : "") << fixed(px(pts[i].first)) << ',' << fixed(py(pts[i].second));
        }
        out_ << "\" style=\"fill:none;stroke:" << color << ";stroke-width:" << width
             << (dashed ? ";stroke-dasharray:5,4" : "") << "\" clip-path=\"url(#plot)\"/>\n";
    }

    void marker(double x, double y, const std::string& color) {
        out_ << "<circle cx=\"" << fixed(px(x)) << "\" cy=\"" << fixed(py(y)) << "\" r=\"3.5\" style=\"fill:" << color
             << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, const char* anchor = "start", int size = 12) {
        out_ << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" style=\"font:" << size
             << "px sans-serif;text-anchor:" << anchor << "\">" << escape(s) << "</text>\n";
    }

    void legend(const std::string& label, const std::string& color) {
        const double y = top_ + 14 + 18 * legend_count_++;
        const double x = left_ + pw_ + 12;
        out_ << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(y - 4) << "\" x2=\"" << fixed(x + 22) << "\" y2=\""
             << fixed(y - 4) << "\" style=\"stroke:" << color << ";stroke-width:2\"/>\n";
        text(x + 28, y, label);
    }

    void axes(const std::vector<double>& xticks = {}) {
        out_ << "<rect x=\"" << fixed(left_) << "\" y=\"" << fixed(top_) << "\" width=\"" << fixed(pw_)
             << "\" height=\"" << fixed(ph_) << "\" style=\"fill:none;stroke:#333333;stroke-width:1\"/>\n";
        std::vector<double> xs = xticks;
        if (xs.empty()) {
            for (int i = 0; i <= 4; ++i) xs.push_back(x0_ + (x1_ - x0_) * i / 4);
        }
        for (double x : xs) {
            out_ << "<line x1=\"" << fixed(px(x)) << "\" y1=\"" << fixed(top_ + ph_) << "\" x2=\"" << fixed(px(x))
                 << "\" y2=\"" << fixed(top_ + ph_ + 5) << "\" style=\"stroke:#333333\"/>\n";
            text(px(x), top_ + ph_ + 20, tick(x), "middle", 11);
        }
        for (int i = 0; i <= 4; ++i) {
            const double y = y0_ + (y1_ - y0_) * i / 4;
            out_ << "<line x1=\"" << fixed(left_ - 5) << "\" y1=\"" << fixed(py(y)) << "\" x2=\"" << fixed(left_)
                 << "\" y2=\"" << fixed(py(y)) << "\" style=\"stroke:#333333\"/>\n";
            text(left_ - 8, py(y) + 4, tick(y), "end", 11);
        }
    }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    double x0_, x1_, y0_, y1_;
    int width_ = 760;
    double left_ = 70, top_ = 40, pw_ = 500, ph_ = 320;
    int legend_count_ = 0;
    std::ostringstream out_;
};

std::pair<double, double> padded(double lo, double hi) {
    if (!(hi > lo)) return {lo - 0.5, hi + 0.5};
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace

std::string svg_profiles(const std::vector<LabeledProfile>& profiles, double a, double b, int samples) {
    if (profiles.empty()) throw InvalidInput("nothing to plot");
    if (samples < 2) throw InvalidInput("need at least two samples");
    std::vector<std::vector<std::pair<double, double>>> curves;
    double lo = INFINITY, hi = -INFINITY;
    for (const LabeledProfile& p : profiles) {
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i <= samples; ++i) {
            const double r = a + (b - a) * i / samples;
            pts.emplace_back(r, p.profile(r));
        }
        // Samples can miss narrow bumps; include the exact extremes.
        lo = std::min({lo, p.profile.min_on(a, b), 0.0});
        hi = std::max(hi, p.profile.max_on(a, b));
        curves.push_back(std::move(pts));
    }
    const auto [y0, y1] = padded(lo, hi);
    Canvas c(a, b, y0, y1, "Warping profiles", "r", "f(r)");
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const char* color = kColors[i % 6];
        c.polyline(curves[i], color);
        c.legend(profiles[i].label, color);
    }
    c.axes();
    return c.finish();
}

std::string svg_convergence(const ConvergenceReport& report) {
    if (report.rows.empty()) throw InvalidInput("report has no rows");
    double hi = 0.0;
    for (const ReportRow& r : report.rows)
        for (const Discrepancy& e : r.eps) hi = std::max(hi, e.eps_hat + e.error);
    const double jmin = report.rows.front().j, jmax = report.rows.back().j;
    const auto [x0, x1] = padded(jmin, jmax);
    Canvas c(x0, x1, 0.0, hi > 0 ? 1.1 * hi : 1.0, report.label + ": discrepancy against candidate limits", "j",
             "eps_hat");
    for (std::size_t l = 0; l < report.limits.size(); ++l) {
        const char* color = kColors[l % 6];
        std::vector<std::pair<double, double>> pts;
        for (const ReportRow& r : report.rows) {
            if (l >= r.eps.size()) continue;
            const Discrepancy& e = r.eps[l];
            pts.emplace_back(r.j, e.eps_hat);
            c.marker(r.j, e.eps_hat, color);
            c.polyline({{r.j, std::max(0.0, e.eps_hat - e.error)}, {r.j, e.eps_hat + e.error}}, color, 1.0);
        }
        c.polyline(pts, color);
        c.legend(report.limits[l].name(), color);
    }
    std::vector<double> ticks;
    for (const ReportRow& r : report.rows) ticks.push_back(r.j);
    c.axes(ticks);
    return c.finish();
}

std::string svg_ret_balls(double R, const std::vector<double>& radii, int samples) {
    if (radii.empty()) throw InvalidInput("nothing to plot");
    // Unbounded chart so large balls are not clipped by the base.
    const RETParams params{R, BaseSpace::interval(-1e6, 1e6), FiberSpace(1e7)};
    std::vector<PolylineCurve> balls;
    double extent = 0.0;
    for (double r : radii) {
        balls.push_back(ret_ball_boundary(params, {0.0, 0.0}, r, samples));
        for (const SurfacePoint& v : balls.back().vertices) extent = std::max({extent, std::abs(v.r), std::abs(v.theta)});
    }
    const double e = 1.1 * extent;
    Canvas c(-e, e, -e, e, "RET balls, R = " + tick(R), "s", "theta", true);
    for (std::size_t i = 0; i < balls.size(); ++i) {
        std::vector<std::pair<double, double>> pts;
        for (const SurfacePoint& v : balls[i].vertices) pts.emplace_back(v.r, v.theta);
        const char* color = kColors[i % 6];
        c.polyline(pts, color, 1.5, false, true);
        c.legend("radius " + tick(radii[i]), color);
    }
    c.axes();
    return c.finish();
}

std::string svg_geodesics(const WarpedSpace& space, const std::vector<GeodesicResult>& paths) {
    const BaseSpace& base = space.base();
    const double a = base.is_circle() ? -std::numbers::pi : base.r0;
    const double b = base.is_circle() ? std::numbers::pi : base.r1;
    const double C = space.fiber().circumference;
    Canvas c(a, b, 0.0, C, "Geodesics over f (darker = larger)", "r", "theta");
    const double fmin = space.global_min(), fmax = space.global_max();
    const int strips = 400;
    for (int i = 0; i < strips; ++i) {
        const double ra = a + (b - a) * i / strips, rb = a + (b - a) * (i + 1) / strips;
        const double f = space.max_warp(ra, rb);
        const double t = fmax > fmin ? (f - fmin) / (fmax - fmin) : 0.0;
        const int g = static_cast<int>(std::lround(245 - 130 * t));
        char fill[16];
        std::snprintf(fill, sizeof fill, "#%02x%02x%02x", g, g, g);
        c.rect(ra, rb, 0.0, C, fill);
    }
    for (std::size_t k = 0; k < paths.size(); ++k) {
        const PolylineCurve& path = paths[k].path;
        const char* color = kColors[k % 6];
        for (std::size_t i = 0; i < path.segment_count(); ++i) {
            const SurfacePoint& p = path.vertices[i];
            const SurfacePoint& q = path.vertices[i + 1];
            const SegmentWrap w = path.wrap_of(i);
            const double dr = q.r - p.r + w.base * kTwoPi, dt = q.theta - p.theta + w.fiber * C;
            c.polyline({{p.r, p.theta}, {p.r + dr, p.theta + dt}}, color, 2.0);
            // A wrapped segment re-enters the chart from the opposite side.
            if (w.base != 0 || w.fiber != 0) c.polyline({{q.r - dr, q.theta - dt}, {q.r, q.theta}}, color, 2.0);
        }
        if (!path.vertices.empty()) {
            c.marker(path.vertices.front().r, path.vertices.front().theta, color);
            c.marker(path.vertices.back().r, path.vertices.back().theta, color);
        }
        char label[96];
        std::snprintf(label, sizeof label, "%s, length %.6g", to_string(paths[k].method), paths[k].distance);
        c.legend(label, color);
    }
    c.axes();
    return c.finish();
}

}  // namespace warpconv
