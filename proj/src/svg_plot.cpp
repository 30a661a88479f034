#include "afdm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace afdm {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string f2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series, bool log_y) {
    const double w = 640, h = 420, left = 70, right = 170, top = 40, bottom = 50;
    const double pw = w - left - right, ph = h - top - bottom;

    auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (log_y) {
        ymin = std::floor(ymin);
        ymax = std::ceil(ymax);
    }
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + (1.0 - (ty(y) - ymin) / (ymax - ymin)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << f2(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    if (log_y) {
        for (double e = ymin; e <= ymax + 1e-9; e += 1.0) {
            const double y = top + (1.0 - (e - ymin) / (ymax - ymin)) * ph;
            os << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << f2(y) << "\" y2=\"" << f2(y)
               << "\" stroke=\"#ddd\"/>\n";
            os << "<text x=\"" << left - 6 << "\" y=\"" << f2(y + 4) << "\" text-anchor=\"end\" font-size=\"11\">1e"
               << static_cast<int>(e) << "</text>\n";
        }
    } else {
        for (int i = 0; i <= 4; ++i) {
            const double v = ymin + (ymax - ymin) * i / 4.0;
            const double y = top + (1.0 - i / 4.0) * ph;
            os << "<text x=\"" << left - 6 << "\" y=\"" << f2(y + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
               << f2(v) << "</text>\n";
        }
    }
    for (int i = 0; i <= 4; ++i) {
        const double v = xmin + (xmax - xmin) * i / 4.0;
        os << "<text x=\"" << f2(px(v)) << "\" y=\"" << f2(top + ph + 16) << "\" text-anchor=\"middle\" font-size=\"11\">"
           << f2(v) << "</text>\n";
    }
    os << "<text x=\"" << f2(left + pw / 2) << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
       << escape(x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << f2(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
       << f2(top + ph / 2) << ")\">" << escape(y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kColors[k % (sizeof kColors / sizeof kColors[0])];
        std::ostringstream pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
            pts << f2(px(s.x[i])) << ',' << f2(py(s.y[i])) << ' ';
        }
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str()
           << "\"/>\n";
        const double ly = top + 14 + 16.0 * static_cast<double>(k);
        os << "<line x1=\"" << left + pw + 10 << "\" x2=\"" << left + pw + 30 << "\" y1=\"" << f2(ly) << "\" y2=\""
           << f2(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 34 << "\" y=\"" << f2(ly + 4) << "\" font-size=\"11\">" << escape(s.name)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace afdm
