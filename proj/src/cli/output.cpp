#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "graze/cli.hpp"

namespace graze::cli {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

void write_trace_csv(std::ostream& out, const GrazingCurve& curve) {
    const int d = curve.along.size() > 0 ? static_cast<int>(curve.along.size()) : 2;
    out << "branch,arc";
    for (int i = 0; i < d; ++i) out << ",x" << i + 2;
    out << ",residual\n";
    for (const auto& br : curve.branches) {
        for (const auto& v : br.vertices) {
            out << br.id << ',' << format_number(v.arc);
            for (int i = 0; i < d; ++i) out << ',' << format_number(v.x(i));
            out << ',' << format_number(v.residual) << '\n';
        }
    }
}

void write_rfm_csv(std::ostream& out, const RfmVerdict& verdict, int tangential_dim) {
    out << "s";
    for (int i = 0; i < tangential_dim; ++i) out << ",x" << i + 2;
    out << ",t,mu,j_analytic,j_fd,bound,pass\n";
    for (const auto& r : verdict.rows) {
        out << format_number(r.s);
        for (int i = 0; i < tangential_dim; ++i) out << ',' << format_number(r.xbar(i));
        out << ',' << format_number(r.t) << ',' << format_number(r.mu) << ',' << format_number(r.j_analytic) << ','
            << format_number(r.j_fd) << ',' << format_number(r.bound) << ',' << (r.pass ? 1 : 0) << '\n';
    }
}

namespace {

std::string g6(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 6);
    return std::string(buf, end);
}

// Maps the square [-w, w]^2 onto the plot area, x3 pointing up.
struct Frame {
    double w = 1.0;
    double left = 0, top = 0, size = 0;

    double px(double x2) const { return left + (x2 + w) / (2 * w) * size; }
    double py(double x3) const { return top + (w - x3) / (2 * w) * size; }
};

void polyline(std::ostream& out, const Frame& f, const std::vector<std::pair<double, double>>& pts,
              const char* style) {
    if (pts.size() < 2) return;
    out << "  <polyline " << style << " points=\"";
    for (size_t i = 0; i < pts.size(); ++i)
        out << (i ? " " : "") << g6(f.px(pts[i].first)) << ',' << g6(f.py(pts[i].second));
    out << "\"/>\n";
}

}  // namespace

void write_trace_svg(std::ostream& out, const GrazingCurve& curve, const FlowoutSheet* sheet,
                     const SvgOptions& options) {
    const double margin = 60.0;
    Frame f;
    f.w = curve.window > 0.0 ? curve.window : 1.0;
    f.left = margin;
    f.top = margin;
    f.size = std::min(options.width, options.height) - 2 * margin;

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" fill=\"white\"/>\n";
    if (!options.title.empty())
        out << "  <text x=\"" << g6(options.width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
            << options.title << "</text>\n";
    out << "  <defs><clipPath id=\"plot\"><rect x=\"" << g6(f.left) << "\" y=\"" << g6(f.top) << "\" width=\""
        << g6(f.size) << "\" height=\"" << g6(f.size) << "\"/></clipPath></defs>\n";
    out << "  <rect x=\"" << g6(f.left) << "\" y=\"" << g6(f.top) << "\" width=\"" << g6(f.size) << "\" height=\""
        << g6(f.size) << "\" fill=\"none\" stroke=\"#888\"/>\n";

    // Axes through the apex.
    out << "  <line x1=\"" << g6(f.px(-f.w)) << "\" y1=\"" << g6(f.py(0)) << "\" x2=\"" << g6(f.px(f.w))
        << "\" y2=\"" << g6(f.py(0)) << "\" stroke=\"#bbb\"/>\n";
    out << "  <line x1=\"" << g6(f.px(0)) << "\" y1=\"" << g6(f.py(-f.w)) << "\" x2=\"" << g6(f.px(0))
        << "\" y2=\"" << g6(f.py(f.w)) << "\" stroke=\"#bbb\"/>\n";
    const double below = f.top + f.size + 18;
    out << "  <text x=\"" << g6(f.px(-f.w)) << "\" y=\"" << g6(below) << "\" text-anchor=\"middle\" font-size=\"11\">"
        << g6(-f.w) << "</text>\n";
    out << "  <text x=\"" << g6(f.px(f.w)) << "\" y=\"" << g6(below) << "\" text-anchor=\"middle\" font-size=\"11\">"
        << g6(f.w) << "</text>\n";
    out << "  <text x=\"" << g6(f.px(0)) << "\" y=\"" << g6(below + 16)
        << "\" text-anchor=\"middle\" font-size=\"12\">x2</text>\n";
    out << "  <text x=\"" << g6(f.left - 8) << "\" y=\"" << g6(f.py(f.w) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << g6(f.w) << "</text>\n";
    out << "  <text x=\"" << g6(f.left - 8) << "\" y=\"" << g6(f.py(-f.w) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << g6(-f.w) << "</text>\n";
    out << "  <text x=\"" << g6(f.left - 30) << "\" y=\"" << g6(f.py(0) + 4)
        << "\" text-anchor=\"end\" font-size=\"12\">x3</text>\n";

    out << "  <g clip-path=\"url(#plot)\">\n";
    if (sheet) {
        for (const auto& line : sheet->lines) {
            std::vector<std::pair<double, double>> pts;
            for (const Vec& p : line.points)
                if (p.size() >= 3) pts.emplace_back(p(1), p(2));
            polyline(out, f, pts, "fill=\"none\" stroke=\"#9ecae1\" stroke-width=\"0.6\"");
        }
    }
    for (const auto& br : curve.branches) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& v : br.vertices)
            if (v.x.size() >= 2) pts.emplace_back(v.x(0), v.x(1));
        polyline(out, f, pts, "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\"");
    }
    out << "  </g>\n";
    out << "  <circle cx=\"" << g6(f.px(0)) << "\" cy=\"" << g6(f.py(0)) << "\" r=\"2.5\" fill=\"black\"/>\n";
    out << "</svg>\n";
}

void write_report(std::ostream& out, const GsReport& rep) {
    auto line = [&](const std::string& key, const std::string& value) { out << key << " = " << value << '\n'; };
    if (rep.order) {
        line("order", rep.order->describe());
        line("taylor_direction", [&] {
            std::ostringstream os;
            for (Eigen::Index i = 0; i < rep.order->direction.size(); ++i)
                os << (i ? " " : "") << format_number(rep.order->direction(i));
            return os.str();
        }());
    }
    if (rep.leading_degree >= 0) line("leading_degree", std::to_string(rep.leading_degree));
    if (rep.u1ww) {
        line("u1ww", rep.u1ww->pass ? "PASS" : "FAIL");
        line("u1ww_min_eigenvalue", format_number(rep.u1ww->min_eigenvalue));
    } else {
        line("u1ww", "n/a");
    }
    if (rep.scan_zeros >= 0) line("scan_zeros", std::to_string(rep.scan_zeros));
    if (rep.regularity) {
        const auto& r = *rep.regularity;
        line("exponent", format_number(r.exponent));
        line("coefficient", format_number(r.coefficient));
        line("r_squared", format_number(r.r_squared));
        line("fit_points", std::to_string(r.points));
        line("graph_over", r.swapped ? "along" : "transverse");
        line("regularity", to_string(r.verdict));
    } else {
        line("exponent", "n/a");
    }
    if (rep.curve) {
        size_t n = 0;
        for (const auto& b : rep.curve->branches) n += b.vertices.size();
        line("branches", std::to_string(rep.curve->branches.size()));
        line("vertices", std::to_string(n));
    }
    if (rep.diffractive_fraction >= 0.0) line("diffractive_fraction", format_number(rep.diffractive_fraction));
    if (rep.transversality != 0.0) line("transversality", format_number(rep.transversality));
    for (const auto& [x2, s] : rep.slices)
        line("slice " + format_number(x2), "(" + std::to_string(s.count_pos) + "," + std::to_string(s.count_neg) + ")");
    line("verdict", to_string(rep.verdict));
    line("basis", rep.basis);
    for (const auto& n : rep.notes) line("note", n);
}

}  // namespace graze::cli
