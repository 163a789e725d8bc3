#include "softring/measures.hpp"

#include "softring/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace softring {

double Density::operator()(double x) const {
    switch (kind) {
        case Kind::none:
            return 0.0;
        case Kind::uniform:
            return w0;
        case Kind::table: {
            if (x < t.front() || x > t.back()) return 0.0;
            auto it = std::upper_bound(t.begin(), t.end(), x);
            if (it == t.end()) return w.back();
            const std::size_t k = static_cast<std::size_t>(it - t.begin());
            const double u = (x - t[k - 1]) / (t[k] - t[k - 1]);
            return (1.0 - u) * w[k - 1] + u * w[k];
        }
    }
    return 0.0;
}

TransversalMeasure::TransversalMeasure(std::vector<Atom> atoms, Density density, double d_minus,
                                       double d_plus, int density_order)
    : atoms_(std::move(atoms)), density_(std::move(density)), d_minus_(d_minus), d_plus_(d_plus),
      order_(density_order) {
    if (!(d_minus_ > 0.0) || !(d_plus_ > 0.0))
        throw std::invalid_argument("transversal measure: offsets must be positive");
    if (order_ < 2) throw std::invalid_argument("transversal measure: density order must be >= 2");
    for (const auto& a : atoms_) {
        if (!(a.alpha > 0.0)) throw std::invalid_argument("transversal measure: atom weight must be positive");
        if (a.t < -d_minus_ || a.t > d_plus_)
            throw std::invalid_argument("transversal measure: atom outside [-d_minus, d_plus]");
        atom_mass_ += a.alpha;
        first_moment_ += a.alpha * a.t;
    }
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.t < b.t; });
    switch (density_.kind) {
        case Density::Kind::none:
            break;
        case Density::Kind::uniform:
            if (!(density_.w0 > 0.0)) throw std::invalid_argument("uniform density must be positive");
            break;
        case Density::Kind::table: {
            const auto& t = density_.t;
            const auto& w = density_.w;
            if (t.size() < 2 || t.size() != w.size())
                throw std::invalid_argument("density table needs matching nodes and values");
            for (std::size_t k = 0; k < t.size(); ++k) {
                if (w[k] < 0.0 || !std::isfinite(w[k]))
                    throw std::invalid_argument("density table values must be nonnegative");
                if (k > 0 && !(t[k] > t[k - 1]))
                    throw std::invalid_argument("density table nodes must increase");
            }
            if (t.front() < -d_minus_ - 1e-14 || t.back() > d_plus_ + 1e-14)
                throw std::invalid_argument("density table exceeds [-d_minus, d_plus]");
            break;
        }
    }
    if (has_density()) {
        const QuadratureRule rule = gauss_legendre(order_, -d_minus_, d_plus_);
        nodes_ = rule.nodes;
        weights_.resize(rule.size());
        for (std::size_t q = 0; q < rule.size(); ++q) {
            weights_[q] = rule.weights[q] * density_(rule.nodes[q]);
            density_mass_ += weights_[q];
            first_moment_ += weights_[q] * rule.nodes[q];
        }
    }
    if (!(mass() > 0.0) || !std::isfinite(mass()))
        throw std::invalid_argument("transversal measure: total mass must be positive and finite");
}

double TransversalMeasure::integrate(const std::function<double(double)>& g) const {
    double sum = 0.0;
    for (const auto& a : atoms_) sum += a.alpha * g(a.t);
    for (std::size_t q = 0; q < nodes_.size(); ++q) sum += weights_[q] * g(nodes_[q]);
    return sum;
}

TransversalMeasure TransversalMeasure::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
    std::vector<Atom> atoms = atoms_;
    for (auto& a : atoms) a.alpha *= factor;
    Density d = density_;
    d.w0 *= factor;
    for (auto& w : d.w) w *= factor;
    return TransversalMeasure(std::move(atoms), std::move(d), d_minus_, d_plus_, order_);
}

std::string TransversalMeasure::describe() const {
    std::ostringstream out;
    out.precision(6);
    out << "I=[-" << d_minus_ << "," << d_plus_ << "]";
    for (const auto& a : atoms_) out << " atom(t=" << a.t << ",alpha=" << a.alpha << ")";
    if (density_.kind == Density::Kind::uniform) out << " uniform(w0=" << density_.w0 << ")";
    if (density_.kind == Density::Kind::table) out << " table(" << density_.t.size() << " nodes)";
    return out.str();
}

TransversalMeasure delta_at(double t, double alpha, double d_minus, double d_plus) {
    return TransversalMeasure({{t, alpha}}, Density{}, d_minus, d_plus);
}

TransversalMeasure uniform_density(double w0, double d_minus, double d_plus) {
    Density d;
    d.kind = Density::Kind::uniform;
    d.w0 = w0;
    return TransversalMeasure({}, d, d_minus, d_plus);
}

double StripMeasure::total_mass() const {
    return curve.length() * transversal.mass() + 2.0 * std::numbers::pi * transversal.first_moment();
}

double measure_integral(const StripMeasure& measure, const std::function<double(const Point&)>& f) {
    const auto& smp = measure.curve.samples();
    const double ds = measure.curve.spacing();
    double total = 0.0;
    for (const auto& p : smp) {
        total += measure.transversal.integrate([&](double t) {
            return f(p.position + t * p.normal) * (1.0 + p.curvature * t);
        });
    }
    return total * ds;
}

}  // namespace softring
