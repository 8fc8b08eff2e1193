#include "strbf/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "strbf/errors.hpp"
#include "strbf/io.hpp"

namespace strbf {

namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            default: o += c;
        }
    }
    return o;
}

// Ticks at 1/2/5 x 10^k steps.
std::vector<double> nice_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(v);
    return t;
}

}  // namespace

std::string render_line_chart(const ChartSpec& spec) {
    if (spec.x.empty()) throw ContractViolation("render_line_chart: empty x axis");
    double xmin = spec.x.front(), xmax = spec.x.back();
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& l : spec.lines) {
        if (l.y.size() != spec.x.size()) throw ContractViolation("render_line_chart: series length mismatch");
        for (double v : l.y)
            if (std::isfinite(v)) {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
    }
    if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
    if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
    if (xmax == xmin) xmax = xmin + 1;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         escape(spec.title) + "</text>\n";
    s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : nice_ticks(xmin, xmax)) {
        s += "<line x1=\"" + num(sx(t)) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(sx(t)) + "\" y2=\"" +
             num(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(sx(t)) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
             tick_label(t) + "</text>\n";
    }
    for (double t : nice_ticks(ymin, ymax)) {
        s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(sy(t)) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" +
             num(sy(t)) + "\" stroke=\"#ddd\"/>\n";
        s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(sy(t) + 4) + "\" text-anchor=\"end\">" +
             tick_label(t) + "</text>\n";
    }
    s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 15) + "\" text-anchor=\"middle\">" +
         escape(spec.x_label) + "</text>\n";
    s += "<text transform=\"translate(20," + num(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(spec.y_label) + "</text>\n";

    for (std::size_t li = 0; li < spec.lines.size(); ++li) {
        const auto& l = spec.lines[li];
        s += "<polyline fill=\"none\" stroke=\"" + l.color + "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < spec.x.size(); ++i) {
            if (!std::isfinite(l.y[i])) continue;
            s += num(sx(spec.x[i])) + "," + num(sy(l.y[i])) + " ";
        }
        s += "\"/>\n";
        const double ly = kTop + 20 + 20 * static_cast<double>(li);
        s += "<line x1=\"" + num(kLeft + pw + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(kLeft + pw + 40) +
             "\" y2=\"" + num(ly) + "\" stroke=\"" + l.color + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + num(kLeft + pw + 46) + "\" y=\"" + num(ly + 4) + "\">" + escape(l.label) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

namespace {

std::vector<double> column_values(const CsvTable& t, std::string_view name) {
    const std::size_t c = t.column(name);
    std::vector<double> v;
    v.reserve(t.rows.size());
    for (const auto& r : t.rows) v.push_back(parse_double(r[c]));
    return v;
}

std::vector<double> to_db(std::vector<double> v) {
    for (double& x : v) x = x > 0.0 ? 10.0 * std::log10(x) : std::numeric_limits<double>::quiet_NaN();
    return v;
}

void render_curve(const std::filesystem::path& dir, const char* csv, const char* svg, const char* title) {
    const CsvTable t = parse_csv(read_text_file(dir / csv));
    ChartSpec c;
    c.title = title;
    c.x_label = "iteration";
    c.y_label = "MSE (dB)";
    c.x = column_values(t, "iteration");
    c.lines = {{"RBF", to_db(column_values(t, "rbf_mse_smoothed")), "#d62728"},
               {"STRBF", to_db(column_values(t, "strbf_mse_smoothed")), "#1f77b4"}};
    write_text_file(dir / svg, render_line_chart(c));
}

}  // namespace

void render_plots(const std::filesystem::path& dir) {
    render_curve(dir, "train_curve.csv", "train_curve.svg", "Training MSE");
    render_curve(dir, "test_curve.csv", "test_curve.svg", "Testing MSE");

    const CsvTable t = parse_csv(read_text_file(dir / "predictions.csv"));
    ChartSpec c;
    c.title = "Test data: actual vs predicted";
    c.x_label = "t (s)";
    c.y_label = "u(t)";
    c.x = column_values(t, "t");
    c.lines = {{"actual", column_values(t, "actual"), "black"},
               {"RBF", column_values(t, "rbf_pred"), "#d62728"},
               {"STRBF", column_values(t, "strbf_pred"), "#1f77b4"}};
    write_text_file(dir / "predictions.svg", render_line_chart(c));
}

}  // namespace strbf
