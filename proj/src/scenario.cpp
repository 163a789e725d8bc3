#include "softring/scenario.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace softring {

Curve CurveSpec::build() const {
    Curve curve = [&] {
        if (kind == "circle") return build_circle(length, samples);
        if (kind == "ellipse") return build_ellipse(a, b, length, samples);
        if (kind == "fourier") return build_fourier_curve(base_radius, coefficients, length, samples);
        if (kind == "points") return curve_from_points(points, samples, label.empty() ? "spline" : label);
        throw std::invalid_argument("unknown curve kind '" + kind + "'");
    }();
    return curve;
}

std::string CurveSpec::name() const {
    if (!label.empty()) return label;
    std::ostringstream out;
    out.precision(6);
    if (kind == "ellipse") {
        out << "ellipse " << a / b << ":1";
    } else if (kind == "fourier") {
        out << "fourier";
        for (const auto& [m, c] : coefficients) out << " a" << m << "=" << c;
    } else {
        out << kind;
    }
    return out.str();
}

TransversalMeasure MeasureSpec::build() const { return TransversalMeasure(atoms, density, d_minus, d_plus, order); }

Resolution parse_resolution(const std::string& text) {
    if (text == "low") return Resolution::low;
    if (text == "default") return Resolution::standard;
    if (text == "high") return Resolution::high;
    throw std::invalid_argument("resolution must be low, default or high (got '" + text + "')");
}

std::string to_string(Resolution r) {
    switch (r) {
    case Resolution::low: return "low";
    case Resolution::standard: return "default";
    case Resolution::high: return "high";
    }
    return "default";
}

double resolution_factor(Resolution r) {
    switch (r) {
    case Resolution::low: return 2.0;
    case Resolution::standard: return 1.0;
    case Resolution::high: return 0.5;
    }
    return 1.0;
}

void Scenario::validate() const {
    std::vector<std::string> problems;
    if (curves.empty()) problems.push_back("at least one curve is required");
    for (const auto& c : curves) {
        if (!(c.length > 0.0)) problems.push_back("curve length must be positive");
        if (c.samples < 16) problems.push_back("curve samples must be at least 16");
        if (c.kind == "ellipse" && !(c.a >= c.b && c.b > 0.0)) problems.push_back("ellipse needs a >= b > 0");
        if (c.kind == "fourier" && !(c.base_radius > 0.0)) problems.push_back("fourier base_radius must be positive");
        if (c.kind == "points" && c.points.size() < 4) problems.push_back("points curve needs at least 4 points");
        if (c.kind != "circle" && c.kind != "ellipse" && c.kind != "fourier" && c.kind != "points")
            problems.push_back("unknown curve kind '" + c.kind + "'");
    }
    if (!(measure.d_minus > 0.0 && measure.d_plus > 0.0)) problems.push_back("d_minus and d_plus must be positive");
    double mass = 0.0;
    for (const auto& a : measure.atoms) {
        if (!(a.alpha > 0.0)) problems.push_back("atom weights must be positive");
        if (a.t < -measure.d_minus || a.t > measure.d_plus) problems.push_back("atom outside [-d_minus, d_plus]");
        mass += a.alpha;
    }
    if (measure.density.kind == Density::Kind::uniform) {
        if (!(measure.density.w0 > 0.0)) problems.push_back("uniform density needs w0 > 0");
        mass += measure.density.w0;
    } else if (measure.density.kind == Density::Kind::table) {
        const auto& d = measure.density;
        if (d.t.size() < 2 || d.t.size() != d.w.size()) problems.push_back("density table needs matching t and w");
        for (double w : d.w)
            if (w < 0.0) problems.push_back("density values must be nonnegative");
        for (double w : d.w) mass += w;
    }
    if (!(mass > 0.0)) problems.push_back("the transversal measure must have positive mass");
    for (double b : betas)
        if (!(b >= 0.0)) problems.push_back("beta must be nonnegative");
    if (betas.empty()) problems.push_back("betas must not be empty");
    if (solver.h < 0.0 || solver.grid_h < 0.0) problems.push_back("solver sizes must be nonnegative");
    if (solver.radial_elements < 64) problems.push_back("radial_elements must be at least 64");
    if (solver.levels < 2) problems.push_back("levels must be at least 2");
    if (solver.t_points < 2) problems.push_back("t_points must be at least 2");
    if (!(rstar.alpha > 0.0 && rstar.r_min > 0.0 && rstar.r_max > rstar.r_min)) problems.push_back("invalid rstar grid");
    if (rstar.points < 3) problems.push_back("rstar points must be at least 3");
    if (!(savo.constant > 0.0)) problems.push_back("savo constant must be positive");
    if (savo.levels < 2) problems.push_back("savo levels must be at least 2");
    if (!(savo.outer_reach > 0.0)) problems.push_back("savo outer_reach must be positive");
    static const std::set<std::string> sweep_params{"beta", "alpha", "t", "radius"};
    if (!sweep_params.count(sweep.parameter)) problems.push_back("sweep parameter must be beta, alpha, t or radius");
    if (sweep.solver != "radial" && sweep.solver != "2d") problems.push_back("sweep solver must be radial or 2d");
    if (problems.empty()) return;
    std::string message = "invalid scenario '" + name + "':";
    for (const auto& p : problems) message += "\n  - " + p;
    throw std::invalid_argument(message);
}

namespace {

void check_keys(const toml::table& table, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, node] : table) {
        (void)node;
        if (!allowed.count(std::string(key.str())))
            throw std::invalid_argument("unknown key '" + std::string(key.str()) + "' in " + where);
    }
}

template <class T>
void read(const toml::table& table, const char* key, T& target, const std::string& where) {
    const toml::node* node = table.get(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, double>) {
        if (auto v = node->value<double>()) {
            target = *v;
            return;
        }
    } else if constexpr (std::is_same_v<T, int>) {
        if (auto v = node->value<int64_t>()) {
            target = static_cast<int>(*v);
            return;
        }
    } else if constexpr (std::is_same_v<T, bool>) {
        if (auto v = node->value<bool>()) {
            target = *v;
            return;
        }
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (auto v = node->value<std::string>()) {
            target = *v;
            return;
        }
    }
    throw std::invalid_argument(std::string("key '") + key + "' in " + where + " has the wrong type");
}

std::vector<double> read_numbers(const toml::node& node, const std::string& where) {
    const toml::array* arr = node.as_array();
    if (!arr) throw std::invalid_argument(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : *arr) {
        auto x = v.value<double>();
        if (!x) throw std::invalid_argument(where + " must contain numbers only");
        out.push_back(*x);
    }
    return out;
}

CurveSpec parse_curve(const toml::table& t, const std::string& where) {
    check_keys(t, {"kind", "length", "a", "b", "base_radius", "coefficients", "points", "samples", "label"}, where);
    CurveSpec c;
    read(t, "kind", c.kind, where);
    read(t, "length", c.length, where);
    read(t, "a", c.a, where);
    read(t, "b", c.b, where);
    read(t, "base_radius", c.base_radius, where);
    read(t, "samples", c.samples, where);
    read(t, "label", c.label, where);
    if (const toml::table* coeff = t["coefficients"].as_table()) {
        for (const auto& [key, node] : *coeff) {
            auto v = node.value<double>();
            if (!v) throw std::invalid_argument(where + ".coefficients values must be numbers");
            int m = 0;
            try {
                m = std::stoi(std::string(key.str()));
            } catch (const std::exception&) {
                throw std::invalid_argument(where + ".coefficients keys must be integers");
            }
            c.coefficients[m] = *v;
        }
    }
    if (const toml::array* pts = t["points"].as_array()) {
        for (const auto& p : *pts) {
            const std::vector<double> xy = read_numbers(p, where + ".points entry");
            if (xy.size() != 2) throw std::invalid_argument(where + ".points entries must be [x, y]");
            c.points.emplace_back(xy[0], xy[1]);
        }
    }
    return c;
}

MeasureSpec parse_measure(const toml::table& t) {
    const std::string where = "[measure]";
    check_keys(t, {"d_minus", "d_plus", "order", "atoms", "density"}, where);
    MeasureSpec m;
    m.atoms.clear();
    read(t, "d_minus", m.d_minus, where);
    read(t, "d_plus", m.d_plus, where);
    read(t, "order", m.order, where);
    if (const toml::node* atoms = t.get("atoms")) {
        const toml::array* arr = atoms->as_array();
        if (!arr) throw std::invalid_argument("measure.atoms must be an array of tables");
        for (const auto& a : *arr) {
            const toml::table* at = a.as_table();
            if (!at) throw std::invalid_argument("measure.atoms entries must be tables {t, alpha}");
            check_keys(*at, {"t", "alpha"}, "measure.atoms");
            Atom atom;
            read(*at, "t", atom.t, "measure.atoms");
            read(*at, "alpha", atom.alpha, "measure.atoms");
            m.atoms.push_back(atom);
        }
    }
    if (const toml::table* d = t["density"].as_table()) {
        check_keys(*d, {"kind", "w0", "t", "w"}, "[measure.density]");
        std::string kind = "none";
        read(*d, "kind", kind, "[measure.density]");
        if (kind == "uniform") {
            m.density.kind = Density::Kind::uniform;
            read(*d, "w0", m.density.w0, "[measure.density]");
        } else if (kind == "table") {
            m.density.kind = Density::Kind::table;
            if (const toml::node* n = d->get("t")) m.density.t = read_numbers(*n, "measure.density.t");
            if (const toml::node* n = d->get("w")) m.density.w = read_numbers(*n, "measure.density.w");
        } else if (kind != "none") {
            throw std::invalid_argument("measure.density.kind must be none, uniform or table");
        }
    }
    return m;
}

}  // namespace

Scenario parse_scenario(const std::string& toml_text, const std::string& source) {
    toml::table root;
    try {
        root = toml::parse(toml_text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "cannot parse " << source << ": " << e.description() << " (line " << e.source().begin.line << ")";
        throw std::invalid_argument(msg.str());
    }
    check_keys(root,
               {"name", "seed", "resolution", "clamp_offsets", "beta", "betas", "curve", "curves", "measure", "solver",
                "rstar", "savo", "sweep"},
               "scenario root");
    Scenario s;
    read(root, "name", s.name, "scenario root");
    if (const toml::node* n = root.get("seed")) {
        auto v = n->value<int64_t>();
        if (!v || *v < 0) throw std::invalid_argument("seed must be a nonnegative integer");
        s.seed = static_cast<std::uint64_t>(*v);
    }
    if (const toml::node* n = root.get("resolution")) {
        auto v = n->value<std::string>();
        if (!v) throw std::invalid_argument("resolution must be a string");
        s.resolution = parse_resolution(*v);
    }
    read(root, "clamp_offsets", s.clamp_offsets, "scenario root");
    if (root.contains("beta") && root.contains("betas"))
        throw std::invalid_argument("give either beta or betas, not both");
    if (const toml::node* n = root.get("beta")) {
        auto v = n->value<double>();
        if (!v) throw std::invalid_argument("beta must be a number");
        s.betas = {*v};
    }
    if (const toml::node* n = root.get("betas")) s.betas = read_numbers(*n, "betas");

    if (root.contains("curve") && root.contains("curves"))
        throw std::invalid_argument("give either [curve] or [[curves]], not both");
    if (const toml::table* c = root["curve"].as_table()) s.curves = {parse_curve(*c, "[curve]")};
    if (const toml::array* cs = root["curves"].as_array()) {
        s.curves.clear();
        for (const auto& c : *cs) {
            const toml::table* ct = c.as_table();
            if (!ct) throw std::invalid_argument("[[curves]] entries must be tables");
            s.curves.push_back(parse_curve(*ct, "[[curves]]"));
        }
    }
    if (const toml::table* m = root["measure"].as_table()) s.measure = parse_measure(*m);
    if (const toml::table* t = root["solver"].as_table()) {
        const std::string where = "[solver]";
        check_keys(*t, {"h", "radial_elements", "grid_h", "levels", "t_points", "rerun_on_failure"}, where);
        read(*t, "h", s.solver.h, where);
        read(*t, "radial_elements", s.solver.radial_elements, where);
        read(*t, "grid_h", s.solver.grid_h, where);
        read(*t, "levels", s.solver.levels, where);
        read(*t, "t_points", s.solver.t_points, where);
        read(*t, "rerun_on_failure", s.solver.rerun_on_failure, where);
    }
    if (const toml::table* t = root["rstar"].as_table()) {
        const std::string where = "[rstar]";
        check_keys(*t, {"alpha", "r_min", "r_max", "points", "elements"}, where);
        read(*t, "alpha", s.rstar.alpha, where);
        read(*t, "r_min", s.rstar.r_min, where);
        read(*t, "r_max", s.rstar.r_max, where);
        read(*t, "points", s.rstar.points, where);
        read(*t, "elements", s.rstar.elements, where);
    }
    if (const toml::table* t = root["savo"].as_table()) {
        const std::string where = "[savo]";
        check_keys(*t, {"levels", "constant", "outer_reach"}, where);
        read(*t, "levels", s.savo.levels, where);
        read(*t, "constant", s.savo.constant, where);
        read(*t, "outer_reach", s.savo.outer_reach, where);
    }
    if (const toml::table* t = root["sweep"].as_table()) {
        const std::string where = "[sweep]";
        check_keys(*t, {"parameter", "values", "solver"}, where);
        read(*t, "parameter", s.sweep.parameter, where);
        read(*t, "solver", s.sweep.solver, where);
        if (const toml::node* n = t->get("values")) s.sweep.values = read_numbers(*n, "sweep.values");
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path.string());
}

TransversalMeasure fit_measure(const MeasureSpec& spec, const Curve& curve, bool clamp, std::string* note) {
    MeasureSpec fitted = spec;
    const double inner_cap = 0.9 * curve.d_minus_max();
    const double outer_cap = std::isfinite(curve.d_plus_max()) ? 0.9 * curve.d_plus_max() : kUnboundedOffset;
    std::ostringstream adjusted;
    if (fitted.d_minus >= curve.d_minus_max() || fitted.d_plus >= curve.d_plus_max()) {
        if (!clamp)
            throw std::invalid_argument("offsets exceed the certified safe radii of " + curve.label() +
                                        " (enable clamp_offsets to shrink them)");
        if (fitted.d_minus >= curve.d_minus_max()) {
            adjusted << "d_minus " << fitted.d_minus << " -> " << inner_cap << "; ";
            fitted.d_minus = inner_cap;
        }
        if (fitted.d_plus >= curve.d_plus_max()) {
            adjusted << "d_plus " << fitted.d_plus << " -> " << outer_cap << "; ";
            fitted.d_plus = outer_cap;
        }
        for (const auto& a : fitted.atoms)
            if (a.t < -fitted.d_minus || a.t > fitted.d_plus)
                throw std::invalid_argument("clamped offsets of " + curve.label() + " exclude an atom");
        if (fitted.density.kind == Density::Kind::uniform)
            adjusted << "uniform density keeps w0, mass changes; ";
    }
    if (note) {
        *note = adjusted.str();
        if (note->size() >= 2) note->resize(note->size() - 2);
    }
    return fitted.build();
}

}  // namespace softring
