#include "chaincomm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "chaincomm/io.hpp"

namespace chaincomm {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kMarginLeft = 70;
constexpr double kMarginBottom = 50;
constexpr double kMarginTop = 30;
constexpr double kMarginRight = 30;

struct Scale {
    double lo, hi, out_lo, out_hi;
    bool log = false;
    double operator()(double v) const {
        const double a = log ? std::log10(v) : v;
        const double a_lo = log ? std::log10(lo) : lo;
        const double a_hi = log ? std::log10(hi) : hi;
        return out_lo + (a - a_lo) / (a_hi - a_lo) * (out_hi - out_lo);
    }
};

std::string gray(double per) {
    // 0 -> black (never recovered), 1 -> white (always recovered)
    const int level = static_cast<int>(std::lround(std::clamp(per, 0.0, 1.0) * 255));
    std::ostringstream s;
    s << "rgb(" << level << ',' << level << ',' << level << ')';
    return s.str();
}

const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                          "#66a61e", "#e6ab02", "#a6761d", "#666666"};

void header(std::ostringstream& out) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void axis_label(std::ostringstream& out, double x, double y, const std::string& text,
                const std::string& anchor = "middle", int size = 12) {
    out << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
        << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << text
        << "</text>\n";
}

}  // namespace

std::string heatmap_svg(const std::vector<CellResult>& cells) {
    if (cells.empty()) throw std::invalid_argument("heatmap_svg: no cells");
    std::set<int> n_set;
    std::set<std::int64_t> t_set;
    for (const CellResult& c : cells) {
        n_set.insert(c.params.n);
        t_set.insert(c.t);
    }
    const std::vector<int> ns(n_set.begin(), n_set.end());
    const std::vector<std::int64_t> ts(t_set.begin(), t_set.end());

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const double cell_w = plot_w / ns.size();
    const double cell_h = plot_h / ts.size();

    std::map<int, std::size_t> n_idx;
    std::map<std::int64_t, std::size_t> t_idx;
    for (std::size_t i = 0; i < ns.size(); ++i) n_idx[ns[i]] = i;
    for (std::size_t i = 0; i < ts.size(); ++i) t_idx[ts[i]] = i;

    std::ostringstream out;
    header(out);
    // cells: N on x (ascending), T on y (ascending upward)
    for (const CellResult& c : cells) {
        const double x = kMarginLeft + n_idx[c.params.n] * cell_w;
        const double y = kHeight - kMarginBottom - (t_idx[c.t] + 1) * cell_h;
        out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\""
            << cell_h << "\" fill=\"" << gray(c.per_hat) << "\"><title>N=" << c.params.n
            << " T=" << c.t << " PER=" << format_double(c.per_hat) << "</title></rect>\n";
    }
    // T = N^2 reference curve through cell centers, on log-interpolated axes
    Scale t_scale{static_cast<double>(ts.front()), static_cast<double>(ts.back()),
                  kHeight - kMarginBottom - cell_h / 2, kMarginTop + cell_h / 2, true};
    Scale n_scale{static_cast<double>(ns.front()), static_cast<double>(ns.back()),
                  kMarginLeft + cell_w / 2, kWidth - kMarginRight - cell_w / 2, true};
    out << "<polyline fill=\"none\" stroke=\"#00a000\" stroke-width=\"2\" points=\"";
    const int samples = 64;
    for (int k = 0; k <= samples; ++k) {
        const double n = ns.front() * std::pow(static_cast<double>(ns.back()) / ns.front(),
                                               static_cast<double>(k) / samples);
        const double t = n * n;
        if (t < ts.front() || t > ts.back()) continue;
        out << n_scale(n) << ',' << t_scale(t) << ' ';
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < ns.size(); ++i)
        axis_label(out, kMarginLeft + (i + 0.5) * cell_w, kHeight - kMarginBottom + 18,
                   std::to_string(ns[i]));
    for (std::size_t i = 0; i < ts.size(); ++i)
        axis_label(out, kMarginLeft - 8,
                   kHeight - kMarginBottom - (i + 0.5) * cell_h + 4, std::to_string(ts[i]),
                   "end");
    axis_label(out, kMarginLeft + plot_w / 2, kHeight - 12, "N");
    axis_label(out, 18, kMarginTop + plot_h / 2, "T", "middle");
    axis_label(out, kMarginLeft + plot_w / 2, 18,
               "exact recovery rate (black = 0, white = 1); curve: T = N^2");
    out << "</svg>\n";
    return out.str();
}

std::string sweep_svg(const std::vector<CellResult>& cells, const std::string& sweep_param) {
    if (cells.empty()) throw std::invalid_argument("sweep_svg: no cells");
    auto value_of = [&](const CellResult& c) -> double {
        if (sweep_param == "n") return c.params.n;
        if (sweep_param == "r_plus") return c.params.r_plus;
        if (sweep_param == "beta") return c.params.beta;
        if (sweep_param == "lambda") return c.params.lambda;
        if (sweep_param == "p") return c.params.p;
        throw std::invalid_argument("sweep_svg: unknown parameter '" + sweep_param + "'");
    };

    std::map<double, std::vector<const CellResult*>> series;
    std::int64_t t_min = cells.front().t, t_max = cells.front().t;
    for (const CellResult& c : cells) {
        series[value_of(c)].push_back(&c);
        t_min = std::min(t_min, c.t);
        t_max = std::max(t_max, c.t);
    }

    const bool log_t = t_max > 4 * t_min && t_min > 0;
    Scale x{static_cast<double>(t_min), static_cast<double>(t_max), kMarginLeft,
            kWidth - kMarginRight, log_t};
    Scale y{0.0, 1.0, kHeight - kMarginBottom, kMarginTop, false};

    std::ostringstream out;
    header(out);
    for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << y(frac) << "\" x2=\""
            << kWidth - kMarginRight << "\" y2=\"" << y(frac)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        axis_label(out, kMarginLeft - 8, y(frac) + 4, format_double(frac), "end");
    }
    int color = 0;
    for (const auto& [value, points] : series) {
        std::vector<const CellResult*> sorted = points;
        std::sort(sorted.begin(), sorted.end(),
                  [](const CellResult* a, const CellResult* b) { return a->t < b->t; });
        const char* stroke = kPalette[color % 8];
        // per_hat +- stderr ribbon
        std::ostringstream band;
        band << "<polygon fill=\"" << stroke << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
        for (const CellResult* c : sorted)
            band << x(static_cast<double>(c->t)) << ','
                 << y(std::min(1.0, c->per_hat + c->per_stderr)) << ' ';
        for (auto it = sorted.rbegin(); it != sorted.rend(); ++it)
            band << x(static_cast<double>((*it)->t)) << ','
                 << y(std::max(0.0, (*it)->per_hat - (*it)->per_stderr)) << ' ';
        band << "\"/>\n";
        out << band.str();
        out << "<polyline fill=\"none\" stroke=\"" << stroke
            << "\" stroke-width=\"2\" stroke-dasharray=\"6,3\" points=\"";
        for (const CellResult* c : sorted)
            out << x(static_cast<double>(c->t)) << ',' << y(c->per_hat) << ' ';
        out << "\"/>\n";
        out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
        for (const CellResult* c : sorted)
            out << x(static_cast<double>(c->t)) << ',' << y(c->mmp_hat) << ' ';
        out << "\"/>\n";
        axis_label(out, kWidth - kMarginRight - 4, kMarginTop + 16 + 16 * color,
                   sweep_param + "=" + format_double(value), "end");
        out << "<rect x=\"" << kWidth - kMarginRight - 90 << "\" y=\"" << kMarginTop + 8 + 16 * color
            << "\" width=\"10\" height=\"10\" fill=\"" << stroke << "\"/>\n";
        ++color;
    }
    for (const std::int64_t t : {t_min, t_max})
        axis_label(out, x(static_cast<double>(t)), kHeight - kMarginBottom + 18,
                   std::to_string(t));
    axis_label(out, kMarginLeft + (kWidth - kMarginLeft - kMarginRight) / 2, kHeight - 12,
               log_t ? "T (log scale)" : "T");
    axis_label(out, kMarginLeft + (kWidth - kMarginLeft - kMarginRight) / 2, 18,
               "dashed: exact recovery rate; solid: mean misclassification");
    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

}  // namespace chaincomm
