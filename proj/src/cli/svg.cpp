#include "corner/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace corner::cli {

namespace {

constexpr double kW = 640, kH = 440, kLeft = 80, kRight = 150, kTop = 40, kBottom = 60;
const char *const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string &s) {
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

std::string num(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << v;
    return s.str();
}

}  // namespace

void write_loglog_svg(std::ostream &os, const std::string &title, const std::string &xlabel, const std::string &ylabel,
                      const std::vector<PlotSeries> &series) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto &s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, std::log10(s.x[i]));
            xmax = std::max(xmax, std::log10(s.x[i]));
            ymin = std::min(ymin, std::log10(s.y[i]));
            ymax = std::max(ymax, std::log10(s.y[i]));
        }
    if (!std::isfinite(xmin)) xmin = -1, xmax = 0, ymin = -1, ymax = 0;
    xmin = std::floor(xmin), xmax = std::ceil(xmax), ymin = std::floor(ymin), ymax = std::ceil(ymax);
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
    auto X = [&](double lx) { return kLeft + (lx - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double ly) { return kTop + (ymax - ly) / (ymax - ymin) * ph; };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW
       << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n";
    const int xstep = std::max(1, static_cast<int>((xmax - xmin) / 8));
    const int ystep = std::max(1, static_cast<int>((ymax - ymin) / 8));
    for (int d = static_cast<int>(xmin); d <= static_cast<int>(xmax); d += xstep)
        os << "<line x1=\"" << num(X(d)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(X(d)) << "\" y2=\""
           << num(kTop + ph) << "\" stroke=\"#ddd\"/>\n"
           << "<text x=\"" << num(X(d)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">1e" << d
           << "</text>\n";
    for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); d += ystep)
        os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(Y(d)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
           << num(Y(d)) << "\" stroke=\"#ddd\"/>\n"
           << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(Y(d) + 4) << "\" text-anchor=\"end\">1e" << d
           << "</text>\n";
    os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n"
       << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kH - 16) << "\" text-anchor=\"middle\">"
       << escape(xlabel) << "</text>\n"
       << "<text x=\"18\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << num(kTop + ph / 2) << ")\">" << escape(ylabel) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto &s = series[k];
        const char *color = kColors[k % (sizeof(kColors) / sizeof(kColors[0]))];
        std::ostringstream pts;
        std::vector<std::pair<double, double>> xy;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            if (s.x[i] > 0.0 && s.y[i] > 0.0 && std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                xy.emplace_back(X(std::log10(s.x[i])), Y(std::log10(s.y[i])));
        std::sort(xy.begin(), xy.end());
        for (const auto &[px, py] : xy) pts << num(px) << ',' << num(py) << ' ';
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str()
           << "\"/>\n";
        for (const auto &[px, py] : xy)
            os << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        const double ly = kTop + 16 + 18 * static_cast<double>(k);
        os << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kLeft + pw + 32)
           << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
           << "<text x=\"" << num(kLeft + pw + 38) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.name) << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace corner::cli
