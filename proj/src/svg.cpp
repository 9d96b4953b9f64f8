#include "bioref/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "bioref/errors.hpp"

namespace bioref {

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

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// Keeps the min and max of each bucket so spikes survive decimation.
std::vector<std::size_t> pick(const std::vector<double>& y, std::size_t max_points) {
    std::vector<std::size_t> idx;
    const std::size_t n = y.size();
    if (n <= max_points || max_points < 4) {
        idx.resize(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        return idx;
    }
    const std::size_t buckets = max_points / 2;
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t lo = b * n / buckets;
        const std::size_t hi = std::max(lo + 1, (b + 1) * n / buckets);
        std::size_t imin = lo, imax = lo;
        for (std::size_t i = lo; i < hi; ++i) {
            if (y[i] < y[imin]) imin = i;
            if (y[i] > y[imax]) imax = i;
        }
        idx.push_back(std::min(imin, imax));
        if (imin != imax) idx.push_back(std::max(imin, imax));
    }
    return idx;
}

}  // namespace

std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = -1, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) {
        const double pad = ymin == 0 ? 1.0 : std::abs(ymin) * 0.1;
        ymin -= pad;
        ymax += pad;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double left = 70, right = 20, top = 40, bottom = 50;
    const double pw = spec.width - left - right, ph = spec.height - top - bottom;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
       << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(spec.title) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#444\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        os << "<line x1=\"" << px(xv) << "\" y1=\"" << top << "\" x2=\"" << px(xv) << "\" y2=\""
           << top + ph << "\" stroke=\"#eee\"/>\n";
        os << "<line x1=\"" << left << "\" y1=\"" << py(yv) << "\" x2=\"" << left + pw
           << "\" y2=\"" << py(yv) << "\" stroke=\"#eee\"/>\n";
        os << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
           << fmt(xv) << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
           << fmt(yv) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << spec.height - 10
       << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
    os << "<text transform=\"translate(16," << top + ph / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

    int legend = 0;
    for (const auto& s : series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        std::vector<double> y(s.y.begin(), s.y.begin() + std::ptrdiff_t(n));
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\"";
        if (s.dashed) os << " stroke-dasharray=\"6,4\"";
        os << " points=\"";
        for (std::size_t i : pick(y, spec.max_points)) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
            os << buf;
        }
        os << "\"/>\n";
        if (!s.label.empty()) {
            const double ly = top + 14 + 16 * legend++;
            os << "<line x1=\"" << left + pw - 130 << "\" y1=\"" << ly - 4 << "\" x2=\""
               << left + pw - 110 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\"";
            if (s.dashed) os << " stroke-dasharray=\"6,4\"";
            os << "/>\n<text x=\"" << left + pw - 105 << "\" y=\"" << ly << "\">" << escape(s.label)
               << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

void write_svg(const std::string& path, const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path);
    os << render_svg(spec, series);
}

}  // namespace bioref
