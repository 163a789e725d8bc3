#include "softring/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace softring {

CheckRecord make_check(std::string name, double left, std::string relation, double right, double tolerance,
                       std::string left_source, std::string right_source, std::string note) {
    CheckRecord c;
    c.name = std::move(name);
    c.left = left;
    c.right = right;
    c.tolerance = tolerance;
    c.left_source = std::move(left_source);
    c.right_source = std::move(right_source);
    c.note = std::move(note);
    if (relation == "<=") c.passed = left <= right + tolerance;
    else if (relation == ">=") c.passed = left >= right - tolerance;
    else if (relation == "==") c.passed = std::abs(left - right) <= tolerance;
    else if (relation == "true") c.passed = left != 0.0;
    else throw std::invalid_argument("make_check: unknown relation '" + relation + "'");
    if (!std::isfinite(left) || !std::isfinite(right) || !std::isfinite(tolerance)) c.passed = false;
    c.relation = std::move(relation);
    return c;
}

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.passed; });
}

namespace {

nlohmann::json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return nullptr;
    return x > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json to_json(const CheckRecord& c) {
    return {{"name", c.name},
            {"relation", c.relation},
            {"left", number(c.left)},
            {"right", number(c.right)},
            {"tolerance", number(c.tolerance)},
            {"passed", c.passed},
            {"left_source", c.left_source},
            {"right_source", c.right_source},
            {"note", c.note}};
}

nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return {{"name", r.name},   {"status", r.passed() ? "pass" : "fail"}, {"rerun_at_doubled_resolution", r.rerun},
            {"checks", checks}, {"details", r.details},                     {"notes", r.notes}};
}

nlohmann::json to_json(const TransplantReport& r) {
    return {{"kinetic_2d", r.kinetic_2d},
            {"kinetic_circle_formula", r.kinetic_circle_formula},
            {"l2_2d", r.l2_2d},
            {"l2_circle_formula", r.l2_circle_formula},
            {"omega_2d", r.omega_2d},
            {"omega_circle_formula", r.omega_circle_formula},
            {"potential_2d", r.potential_2d},
            {"potential_circle_formula", r.potential_circle_formula},
            {"quotient_transplanted", r.quotient_transplanted},
            {"quotient_circle", r.quotient_circle},
            {"inradius", r.inradius},
            {"h_grid", r.h_grid},
            {"levels", r.levels}};
}

void write_json(const nlohmann::json& value, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << std::setw(2) << value << '\n';
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

void write_report(const VerificationReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_json(to_json(report), dir / "report.json");

    std::ofstream csv(dir / "results.csv");
    if (!csv) throw std::runtime_error("cannot write " + (dir / "results.csv").string());
    csv << std::setprecision(std::numeric_limits<double>::max_digits10);
    csv << "check,relation,left,right,tolerance,passed,left_source,right_source\n";
    auto quoted = [](const std::string& s) {
        std::string out = "\"";
        for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return out + "\"";
    };
    for (const auto& c : report.checks)
        csv << quoted(c.name) << ',' << quoted(c.relation) << ',' << c.left << ',' << c.right << ',' << c.tolerance
            << ',' << (c.passed ? 1 : 0) << ',' << quoted(c.left_source) << ',' << quoted(c.right_source) << '\n';

    nlohmann::json timing = nlohmann::json::array();
    for (const auto& c : report.checks) timing.push_back({{"check", c.name}, {"seconds", c.seconds}});
    write_json(timing, dir / "timing.json");
    for (const auto& plot : report.plots) write_svg(plot, dir / plot.file);
}

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += ch;
        }
    }
    return out;
}

std::string fmt(double x) {
    std::ostringstream out;
    out << std::setprecision(4) << x;
    return out.str();
}

}  // namespace

void write_svg(const Plot& plot, const std::filesystem::path& path) {
    constexpr double width = 720, height = 480, left = 80, right = 170, top = 40, bottom = 60;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    auto tx = [&](double x) { return plot.log_x ? std::log10(x) : x; };
    for (const auto& s : plot.series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (plot.log_x && !(s.x[i] > 0.0))) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax > xmin)) { xmin -= 1.0; xmax += 1.0; }
    if (!(ymax > ymin)) { ymin -= 1.0; ymax += 1.0; }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double x) { return left + (tx(x) - xmin) / (xmax - xmin) * (width - left - right); };
    auto py = [&](double y) { return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(plot.title)
        << "</text>\n";
    out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
        << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
        const double xs = left + (width - left - right) * k / 4.0, ys = py(yv);
        out << "<text x=\"" << xs << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">"
            << fmt(plot.log_x ? std::pow(10.0, xv) : xv) << "</text>\n";
        out << "<text x=\"" << left - 6 << "\" y=\"" << ys + 4 << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\">"
        << escape(plot.x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << (top + height - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << (top + height - bottom) / 2 << ")\">" << escape(plot.y_label) << "</text>\n";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};
    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* color = colors[k % 7];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (plot.log_x && !(s.x[i] > 0.0))) continue;
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        out << "\"/>\n";
        const double ly = top + 16 + 18.0 * static_cast<double>(k);
        out << "<line x1=\"" << width - right + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << width - right + 30
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - right + 36 << "\" y=\"" << ly << "\">" << escape(s.name) << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace softring
