#include "choreo/render.hpp"

#include "choreo/archive.hpp"
#include "choreo/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace choreo {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("render: cannot open for writing: " + path.string());
    return out;
}

// Maps data coordinates into a fixed SVG canvas with margins.
struct Canvas {
    double xmin, xmax, ymin, ymax;
    static constexpr double W = 800.0, H = 600.0, margin = 60.0;

    Canvas(double x0, double x1, double y0, double y1)
        : xmin(x0), xmax(x1), ymin(y0), ymax(y1) {
        if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
        if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
    }

    double px(double x) const { return margin + (x - xmin) / (xmax - xmin) * (W - 2 * margin); }
    double py(double y) const {
        return H - margin - (y - ymin) / (ymax - ymin) * (H - 2 * margin);
    }
};

void svg_header(std::ostream& out) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n"
        << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
}

void svg_axes(std::ostream& out, const Canvas& c, const std::string& xlabel,
              const std::string& ylabel) {
    out << "<line x1=\"" << Canvas::margin << "\" y1=\"" << Canvas::H - Canvas::margin
        << "\" x2=\"" << Canvas::W - Canvas::margin << "\" y2=\""
        << Canvas::H - Canvas::margin << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << Canvas::margin << "\" y1=\"" << Canvas::margin << "\" x2=\""
        << Canvas::margin << "\" y2=\"" << Canvas::H - Canvas::margin
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"400\" y=\"590\" text-anchor=\"middle\" font-size=\"14\">" << xlabel
        << "</text>\n"
        << "<text x=\"15\" y=\"300\" text-anchor=\"middle\" font-size=\"14\" "
           "transform=\"rotate(-90 15 300)\">"
        << ylabel << "</text>\n";
    std::ostringstream t0, t1, t2, t3;
    t0 << c.xmin;
    t1 << c.xmax;
    t2 << c.ymin;
    t3 << c.ymax;
    out << "<text x=\"" << Canvas::margin << "\" y=\"575\" font-size=\"11\">" << t0.str()
        << "</text>\n"
        << "<text x=\"" << Canvas::W - Canvas::margin
        << "\" y=\"575\" text-anchor=\"end\" font-size=\"11\">" << t1.str() << "</text>\n"
        << "<text x=\"" << Canvas::margin - 5 << "\" y=\"" << Canvas::H - Canvas::margin
        << "\" text-anchor=\"end\" font-size=\"11\">" << t2.str() << "</text>\n"
        << "<text x=\"" << Canvas::margin - 5 << "\" y=\"" << Canvas::margin + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << t3.str() << "</text>\n";
}

void svg_polyline(std::ostream& out, const Canvas& c,
                  const std::vector<std::pair<double, double>>& pts, const std::string& color) {
    if (pts.empty()) return;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) out << c.px(x) << "," << c.py(y) << " ";
    out << "\"/>\n";
}

void svg_dot(std::ostream& out, const Canvas& c, double x, double y, const std::string& color,
             double r = 5.0) {
    out << "<circle cx=\"" << c.px(x) << "\" cy=\"" << c.py(y) << "\" r=\"" << r
        << "\" fill=\"" << color << "\"/>\n";
}

int knot_q(const StateVector& state, const ModelParams& params) {
    const auto kc = classify_frequency(state.omega, params);
    return kc ? kc->q : 1;
}

}  // namespace

void export_orbit_csv(const std::filesystem::path& path, const StateVector& state,
                      const ModelParams& params, bool inertial, int samples) {
    if (samples < 1) throw std::invalid_argument("export_orbit_csv: samples must be >= 1");
    auto out = open_out(path);
    out << "t,body,x,y,z\n";
    const auto bodies = reconstruct_bodies(state.u, params);
    const double period = inertial ? kTwoPi * knot_q(state, params) / std::sqrt(params.s1)
                                   : kTwoPi / state.omega;
    for (int i = 0; i < samples; ++i) {
        const double s = period * i / samples;
        for (int j = 0; j < params.n; ++j) {
            const FourierVec3& b = bodies[static_cast<std::size_t>(j)];
            const Eigen::Vector3d pt = inertial
                                           ? inertial_point(b, state.omega, params.s1, s)
                                           : evaluate_at(b, state.omega * s);
            out << fmt17(s) << "," << j + 1 << "," << fmt17(pt[0]) << "," << fmt17(pt[1])
                << "," << fmt17(pt[2]) << "\n";
        }
    }
}

void export_orbit_coeffs_file(const std::filesystem::path& path, const StateVector& state,
                              const ModelParams& params) {
    write_orbit_coeffs(path, state.pack(), params.n, params.m);
}

void plot_bifurcation_diagram(const std::filesystem::path& path,
                              const std::vector<BranchRecord>& records, int switch_index,
                              std::optional<std::pair<double, double>> eight_point) {
    auto out = open_out(path);
    svg_header(out);
    if (records.empty()) {
        Canvas c(0, 1, 0, 1);
        svg_axes(out, c, "omega", "amplitude (sup |u3|)");
        out << "</svg>\n";
        return;
    }
    double xmin = records[0].omega, xmax = records[0].omega;
    double ymin = records[0].amplitude, ymax = records[0].amplitude;
    for (const auto& r : records) {
        xmin = std::min(xmin, r.omega);
        xmax = std::max(xmax, r.omega);
        ymin = std::min(ymin, r.amplitude);
        ymax = std::max(ymax, r.amplitude);
    }
    if (eight_point) {
        xmin = std::min(xmin, eight_point->first);
        xmax = std::max(xmax, eight_point->first);
        ymax = std::max(ymax, eight_point->second);
    }
    Canvas c(xmin, xmax, ymin, ymax);
    svg_axes(out, c, "omega", "amplitude (sup |u3|)");

    std::vector<std::pair<double, double>> seg1, seg2;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto pt = std::make_pair(records[i].omega, records[i].amplitude);
        if (switch_index >= 0 && static_cast<int>(i) >= switch_index)
            seg2.push_back(pt);
        else
            seg1.push_back(pt);
    }
    svg_polyline(out, c, seg1, "steelblue");
    svg_polyline(out, c, seg2, "darkorange");
    if (switch_index > 0 && switch_index <= static_cast<int>(records.size())) {
        const auto& j = records[static_cast<std::size_t>(switch_index - 1)];
        svg_dot(out, c, j.omega, j.amplitude, "red", 4.0);  // branch junction
    }
    svg_dot(out, c, records[0].omega, records[0].amplitude, "black");  // polygon
    if (eight_point) svg_dot(out, c, eight_point->first, eight_point->second, "green");

    // Morse annotations where the index changes along the branch.
    std::optional<int> last;
    for (const auto& r : records) {
        if (!r.morse_index || r.morse_index == last) continue;
        last = r.morse_index;
        out << "<text x=\"" << c.px(r.omega) + 4 << "\" y=\"" << c.py(r.amplitude) - 4
            << "\" font-size=\"11\" fill=\"purple\">" << *r.morse_index << "</text>\n";
    }
    out << "</svg>\n";
}

void plot_orbit_curves(const std::filesystem::path& path, const StateVector& state,
                       const ModelParams& params, bool inertial, int samples) {
    auto out = open_out(path);
    svg_header(out);
    const auto bodies = reconstruct_bodies(state.u, params);
    const double period = inertial ? kTwoPi * knot_q(state, params) / std::sqrt(params.s1)
                                   : kTwoPi / state.omega;
    std::vector<std::vector<std::pair<double, double>>> curves(
        static_cast<std::size_t>(params.n));
    double lim = 1e-9;
    for (int j = 0; j < params.n; ++j) {
        for (int i = 0; i <= samples; ++i) {
            const double s = period * i / samples;
            const FourierVec3& b = bodies[static_cast<std::size_t>(j)];
            const Eigen::Vector3d pt = inertial
                                           ? inertial_point(b, state.omega, params.s1, s)
                                           : evaluate_at(b, state.omega * s);
            curves[static_cast<std::size_t>(j)].emplace_back(pt[0], pt[1]);
            lim = std::max({lim, std::abs(pt[0]), std::abs(pt[1])});
        }
    }
    Canvas c(-1.05 * lim, 1.05 * lim, -1.05 * lim, 1.05 * lim);
    svg_axes(out, c, "x", "y");
    const char* colors[] = {"steelblue", "darkorange", "seagreen", "crimson",
                            "purple",    "teal",       "goldenrod"};
    for (std::size_t j = 0; j < curves.size(); ++j)
        svg_polyline(out, c, curves[j], colors[j % 7]);
    out << "</svg>\n";
}

}  // namespace choreo
