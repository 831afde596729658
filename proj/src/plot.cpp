#include "qucl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qucl {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

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

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Axis ticks: decades on log axes, about five round steps on linear ones.
std::vector<double> ticks(double lo, double hi, bool log) {
    std::vector<double> t;
    if (log) {
        for (double e = std::ceil(lo - 1e-9); e <= hi + 1e-9; e += 1.0) t.push_back(e);
        if (t.size() < 2) t = {lo, hi};
        return t;
    }
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(v);
    return t;
}

}  // namespace

PlotScale parse_plot_scale(const std::string& text) {
    if (text == "linear") return PlotScale::Linear;
    if (text == "semilogx") return PlotScale::SemilogX;
    if (text == "semilogy") return PlotScale::SemilogY;
    if (text == "loglog") return PlotScale::LogLog;
    throw InvalidArgument("unknown plot scale '" + text + "'");
}

std::string svg_plot(const Table& table, const PlotSpec& spec) {
    if (spec.y.empty()) throw InvalidArgument("plot needs at least one y column");
    for (const auto& c : spec.y)
        if (!table.has_column(c)) throw InvalidArgument("unknown column '" + c + "' in table '" + table.name + "'");
    if (!table.has_column(spec.x)) throw InvalidArgument("unknown column '" + spec.x + "' in table '" + table.name + "'");
    const bool logx = spec.scale == PlotScale::SemilogX || spec.scale == PlotScale::LogLog;
    const bool logy = spec.scale == PlotScale::SemilogY || spec.scale == PlotScale::LogLog;

    const auto xs = table.column(spec.x);
    std::vector<std::vector<std::pair<double, double>>> series;
    double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
    for (const auto& c : spec.y) {
        const auto ys = table.column(c);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double x = xs[i], y = ys[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if ((logx && x <= 0.0) || (logy && y <= 0.0)) continue;
            if (logx) x = std::log10(x);
            if (logy) y = std::log10(y);
            pts.emplace_back(x, y);
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
        series.push_back(std::move(pts));
    }
    if (!(x0 <= x1)) throw EmptyRegion("nothing to plot: no finite points in '" + table.name + "'");
    // A flat series still needs a nonzero span.
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) {
        const double pad = std::max(0.5, 0.1 * std::abs(y0));
        y0 -= pad;
        y1 += pad;
    }

    const double left = 70, right = 20, top = 36, bottom = 50;
    const double W = spec.width, H = spec.height;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
    auto py = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };
    auto label = [](double v, bool log) { return log ? "1e" + num(v) : num(v); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">"
       << escape(spec.title.empty() ? table.name : spec.title) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
       << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(x0, x1, logx)) {
        os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << H - bottom << "\" x2=\"" << num(px(t)) << "\" y2=\""
           << H - bottom + 4 << "\" stroke=\"black\"/>";
        os << "<text x=\"" << num(px(t)) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">"
           << label(t, logx) << "</text>\n";
    }
    for (double t : ticks(y0, y1, logy)) {
        os << "<line x1=\"" << left - 4 << "\" y1=\"" << num(py(t)) << "\" x2=\"" << left << "\" y2=\"" << num(py(t))
           << "\" stroke=\"black\"/>";
        os << "<text x=\"" << left - 6 << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">" << label(t, logy)
           << "</text>\n";
    }
    os << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
       << escape(spec.x) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kColors[k % 6];
        if (!series[k].empty()) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < series[k].size(); ++i)
                os << (i ? " " : "") << num(px(series[k][i].first)) << ',' << num(py(series[k][i].second));
            os << "\"/>\n";
        }
        os << "<text x=\"" << left + 8 << "\" y=\"" << top + 14 + 14 * k << "\" fill=\"" << color << "\">"
           << escape(spec.y[k]) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace qucl
