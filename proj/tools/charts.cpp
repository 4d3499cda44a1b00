#include "charts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace evolv::cli {

namespace {

constexpr double kW = 640, kH = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

bool finite_number(const Json& v) { return v.is_number() && std::isfinite(v.get<double>()); }

}  // namespace

std::string render_svg(const Chart& c) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto tx = [&](double x) { return c.log_x ? std::log10(x) : x; };
    for (const auto& s : c.series)
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (c.log_x && s.x[k] <= 0) continue;
            x0 = std::min(x0, tx(s.x[k]));
            x1 = std::max(x1, tx(s.x[k]));
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12 * (1 + std::abs(y0))) y0 -= 0.5, y1 += 0.5;
    const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (tx(x) - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(c.title) << "</text>\n";
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double gx = kLeft + pw * k / 4.0, gy = kTop + ph - ph * k / 4.0;
        o << "<text x=\"" << fmt(gx) << "\" y=\"" << fmt(kTop + ph + 16) << "\" text-anchor=\"middle\">"
          << fmt(c.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
        o << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(gy + 4) << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
    }
    o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kH - 10) << "\" text-anchor=\"middle\">" << esc(c.xlabel)
      << "</text>\n";
    o << "<text transform=\"translate(16," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << esc(c.ylabel) << "</text>\n";
    for (std::size_t s = 0; s < c.series.size(); ++s) {
        const auto& ser = c.series[s];
        const char* col = kColours[s % 5];
        o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\"";
        if (ser.dashed) o << " stroke-dasharray=\"5,4\"";
        o << " points=\"";
        for (std::size_t k = 0; k < ser.x.size(); ++k) {
            if (c.log_x && ser.x[k] <= 0) continue;
            o << fmt(px(ser.x[k])) << "," << fmt(py(ser.y[k])) << " ";
        }
        o << "\"/>\n";
        o << "<text x=\"" << fmt(kLeft + 10) << "\" y=\"" << fmt(kTop + 16 + 14.0 * static_cast<double>(s)) << "\" fill=\"" << col
          << "\">" << esc(ser.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

Chart sigma_chart(const Json& report) {
    Chart c{"sigma(r)", "r", "sigma", true, {}};
    Series s{"sup Re lambda", {}, {}, false};
    for (const auto& p : report.at("sigma_curve").at("samples")) {
        if (!finite_number(p.at("sigma"))) continue;
        s.x.push_back(p.at("r").get<double>());
        s.y.push_back(p.at("sigma").get<double>());
    }
    c.series.push_back(s);
    return c;
}

Chart decay_chart(const Json& report) {
    Chart c{"translated pairings", "t", "log |<e_{-lambda} N, phi_t>|", false, {}};
    for (const auto& d : report.at("battery").at("decay")) {
        Series pts{"lambda = " + fmt(d.at("lambda").get<double>()), {}, {}, false};
        for (std::size_t k = 0; k < d.at("t").size(); ++k) {
            if (!finite_number(d.at("log_abs")[k])) continue;
            pts.x.push_back(d.at("t")[k].get<double>());
            pts.y.push_back(d.at("log_abs")[k].get<double>());
        }
        if (pts.x.empty()) continue;
        // least-squares line with the reported slope through the data mean
        if (finite_number(d.at("rate"))) {
            double mx = 0, my = 0;
            for (std::size_t k = 0; k < pts.x.size(); ++k) {
                mx += pts.x[k] / static_cast<double>(pts.x.size());
                my += pts.y[k] / static_cast<double>(pts.y.size());
            }
            const double r = d.at("rate").get<double>();
            Series fit{"fit, rate " + fmt(r), {pts.x.front(), pts.x.back()}, {}, true};
            fit.y = {my + r * (pts.x.front() - mx), my + r * (pts.x.back() - mx)};
            c.series.push_back(pts);
            c.series.push_back(fit);
        } else {
            c.series.push_back(pts);
        }
    }
    return c;
}

Chart slice_chart(const Json& report) {
    Chart c{"|N(x0, 0)|", "x0", "|N|", false, {}};
    Series s{"grid kernel", {}, {}, false};
    const auto& sl = report.at("kernel_slice");
    for (std::size_t k = 0; k < sl.at("x0").size(); ++k) {
        s.x.push_back(sl.at("x0")[k].get<double>());
        s.y.push_back(sl.at("abs_N")[k].get<double>());
    }
    c.series.push_back(s);
    return c;
}

}  // namespace evolv::cli
