#include "softring/geometry.hpp"

#include "softring/quadrature.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace softring {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Point rotate_clockwise(const Point& v) { return Point(v.y(), -v.x()); }

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

Curve::Curve(std::vector<CurveSample> samples, double length, std::string label)
    : samples_(std::move(samples)), length_(length), label_(std::move(label)) {
    if (!(length_ > 0.0)) throw std::invalid_argument("Curve: length must be positive");
    if (samples_.size() < 16) throw std::invalid_argument("Curve: at least 16 samples required");
    const double ds = spacing();
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& p = samples_[i];
        if (std::abs(p.tangent.norm() - 1.0) > 1e-10 || std::abs(p.normal.norm() - 1.0) > 1e-10)
            throw std::invalid_argument("Curve: tangent and normal must be unit vectors");
        if (std::abs(p.s - ds * static_cast<double>(i)) > 1e-9 * length_)
            throw std::invalid_argument("Curve: samples must be uniform in arc length");
    }
    if ((samples_.back().position - samples_.front().position).norm() > 2.0 * ds)
        throw std::invalid_argument("Curve: samples do not close up");
}

double Curve::wrap(double s) const {
    double w = std::fmod(s, length_);
    if (w < 0.0) w += length_;
    if (w >= length_) w = 0.0;
    return w;
}

Curve::Jet Curve::jet_at(double s) const {
    const double ds = spacing();
    const double x = wrap(s) / ds;
    const std::size_t n = samples_.size();
    std::size_t i = static_cast<std::size_t>(std::floor(x));
    if (i >= n) i = n - 1;
    const double u = x - static_cast<double>(i);
    const auto& a = samples_[i];
    const auto& b = samples_[(i + 1) % n];
    const Point m0 = a.tangent * ds;
    const Point m1 = b.tangent * ds;
    const double u2 = u * u, u3 = u2 * u;
    Jet jet;
    jet.position = (2 * u3 - 3 * u2 + 1) * a.position + (u3 - 2 * u2 + u) * m0 +
                   (-2 * u3 + 3 * u2) * b.position + (u3 - u2) * m1;
    jet.first = ((6 * u2 - 6 * u) * a.position + (3 * u2 - 4 * u + 1) * m0 +
                 (-6 * u2 + 6 * u) * b.position + (3 * u2 - 2 * u) * m1) /
                ds;
    jet.second = ((12 * u - 6) * a.position + (6 * u - 4) * m0 + (-12 * u + 6) * b.position +
                  (6 * u - 2) * m1) /
                 (ds * ds);
    return jet;
}

Point Curve::tangent_at(double s) const { return jet_at(s).first.normalized(); }

Point Curve::normal_at(double s) const { return rotate_clockwise(tangent_at(s)); }

double Curve::curvature_at(double s) const {
    const double x = wrap(s) / spacing();
    const std::size_t n = samples_.size();
    std::size_t i = static_cast<std::size_t>(std::floor(x));
    if (i >= n) i = n - 1;
    const double u = x - static_cast<double>(i);
    return (1.0 - u) * samples_[i].curvature + u * samples_[(i + 1) % n].curvature;
}

double Curve::total_curvature() const {
    double sum = 0.0;
    for (const auto& p : samples_) sum += p.curvature;
    return sum * spacing();
}

double Curve::enclosed_area() const {
    double sum = 0.0;
    for (const auto& p : samples_) sum += cross(p.position, p.tangent);
    return 0.5 * sum * spacing();
}

Point Curve::centroid() const {
    double sx = 0.0, sy = 0.0;
    for (const auto& p : samples_) {
        sx += 0.5 * p.position.x() * p.position.x() * p.tangent.y();
        sy -= 0.5 * p.position.y() * p.position.y() * p.tangent.x();
    }
    const double area = enclosed_area();
    return Point(sx, sy) * spacing() / area;
}

double Curve::max_curvature() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& p : samples_) m = std::max(m, p.curvature);
    return m;
}

double Curve::min_curvature() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : samples_) m = std::min(m, p.curvature);
    return m;
}

std::pair<double, double> Curve::radial_extent() const {
    const Point c = centroid();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : samples_) {
        const double r = (p.position - c).norm();
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

std::vector<Point> Curve::polyline() const {
    std::vector<Point> pts;
    pts.reserve(samples_.size());
    for (const auto& p : samples_) pts.push_back(p.position);
    return pts;
}

Curve with_certified_offsets(Curve curve) {
    curve.offsets_ = safe_offsets(curve);
    return curve;
}

Curve curve_from_parametrization(const Parametrization& param, double target_length, int samples,
                                 std::string label) {
    if (!(target_length > 0.0)) throw std::invalid_argument("curve: target length must be positive");
    if (samples < 16) throw std::invalid_argument("curve: at least 16 samples required");
    auto speed = [&](double th) { return param(th).first.norm(); };

    const int panels = 4 * samples;
    const double dth = kTwoPi / panels;
    const QuadratureRule gl = gauss_legendre(8, 0.0, 1.0);
    auto panel_integral = [&](double a, double b) {
        double sum = 0.0;
        for (std::size_t q = 0; q < gl.size(); ++q) sum += gl.weights[q] * speed(a + (b - a) * gl.nodes[q]);
        return sum * (b - a);
    };
    std::vector<double> cumulative(panels + 1, 0.0);
    for (int k = 0; k < panels; ++k)
        cumulative[k + 1] = cumulative[k] + panel_integral(k * dth, (k + 1) * dth);
    const double perimeter = cumulative.back();
    const double adaptive = integrate_adaptive(speed, 0.0, kTwoPi, 1e-14);
    if (std::abs(adaptive - perimeter) > 1e-10 * perimeter)
        throw std::runtime_error("curve: arc-length quadrature did not converge");
    const double scale = target_length / perimeter;

    std::vector<CurveSample> out(samples);
    std::size_t panel = 0;
    for (int j = 0; j < samples; ++j) {
        const double target = perimeter * j / samples;
        while (panel + 1 < cumulative.size() - 1 && cumulative[panel + 1] <= target) ++panel;
        const double th0 = panel * dth;
        double th = th0 + dth * (target - cumulative[panel]) /
                              std::max(cumulative[panel + 1] - cumulative[panel], 1e-300);
        for (int it = 0; it < 20; ++it) {
            const double f = cumulative[panel] + panel_integral(th0, th) - target;
            const double step = f / speed(th);
            th -= step;
            if (std::abs(step) < 1e-15) break;
        }
        const Curve::Jet jet = param(th);
        const double sp = jet.first.norm();
        CurveSample smp;
        smp.s = target_length * j / samples;
        smp.position = scale * jet.position;
        smp.tangent = jet.first / sp;
        smp.normal = rotate_clockwise(smp.tangent);
        smp.curvature = cross(jet.first, jet.second) / (sp * sp * sp) / scale;
        out[j] = smp;
    }
    return with_certified_offsets(Curve(std::move(out), target_length, std::move(label)));
}

Curve build_circle(double length, int samples) {
    if (!(length > 0.0)) throw std::invalid_argument("build_circle: length must be positive");
    const double radius = length / kTwoPi;
    std::vector<CurveSample> out(samples);
    for (int j = 0; j < samples; ++j) {
        const double th = kTwoPi * j / samples;
        CurveSample smp;
        smp.s = length * j / samples;
        smp.position = radius * Point(std::cos(th), std::sin(th));
        smp.tangent = Point(-std::sin(th), std::cos(th));
        smp.normal = Point(std::cos(th), std::sin(th));
        smp.curvature = 1.0 / radius;
        out[j] = smp;
    }
    Curve curve(std::move(out), length, "circle");
    return with_certified_offsets(std::move(curve));
}

double ellipse_perimeter(double a, double b) {
    if (!(a >= b && b > 0.0)) throw std::invalid_argument("ellipse: need a >= b > 0");
    return integrate_adaptive(
        [a, b](double th) { return std::hypot(a * std::sin(th), b * std::cos(th)); }, 0.0, kTwoPi,
        1e-15);
}

Curve build_ellipse(double a, double b, double length, int samples) {
    if (!(a >= b && b > 0.0)) throw std::invalid_argument("build_ellipse: need a >= b > 0");
    if (a == b) {
        const Curve c = build_circle(length, samples);
        return with_certified_offsets(Curve(c.samples(), c.length(), "ellipse"));
    }
    auto param = [a, b](double th) {
        Curve::Jet j;
        j.position = Point(a * std::cos(th), b * std::sin(th));
        j.first = Point(-a * std::sin(th), b * std::cos(th));
        j.second = Point(-a * std::cos(th), -b * std::sin(th));
        return j;
    };
    return curve_from_parametrization(param, length, samples, "ellipse");
}

Curve build_fourier_curve(double base_radius, const std::map<int, double>& coeffs, double length,
                          int samples, double min_radius_fraction) {
    if (!(base_radius > 0.0)) throw std::invalid_argument("build_fourier_curve: R must be positive");
    for (const auto& [m, a] : coeffs)
        if (m < 1) throw std::invalid_argument("build_fourier_curve: modes must be >= 1");
    auto radius = [&](double th, double& r1, double& r2) {
        double r = 1.0;
        r1 = 0.0;
        r2 = 0.0;
        for (const auto& [m, a] : coeffs) {
            r += a * std::cos(m * th);
            r1 -= a * m * std::sin(m * th);
            r2 -= a * m * m * std::cos(m * th);
        }
        r1 *= base_radius;
        r2 *= base_radius;
        return r * base_radius;
    };
    double min_r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 8192; ++i) {
        double r1, r2;
        min_r = std::min(min_r, radius(kTwoPi * i / 8192, r1, r2));
    }
    if (!(min_r > min_radius_fraction * base_radius))
        throw std::invalid_argument("build_fourier_curve: radius function dips near zero");
    auto param = [&](double th) {
        double r1, r2;
        const double r = radius(th, r1, r2);
        const double c = std::cos(th), s = std::sin(th);
        Curve::Jet j;
        j.position = Point(r * c, r * s);
        j.first = Point(r1 * c - r * s, r1 * s + r * c);
        j.second = Point(r2 * c - 2 * r1 * s - r * c, r2 * s + 2 * r1 * c - r * s);
        return j;
    };
    Curve curve = curve_from_parametrization(param, length, samples, "fourier");
    if (polyline_self_intersects(curve.polyline()))
        throw std::invalid_argument("build_fourier_curve: curve self-intersects");
    return curve;
}

Curve curve_from_points(const std::vector<Point>& input, int samples, std::string label) {
    const std::size_t n = input.size();
    if (n < 4) throw std::invalid_argument("curve_from_points: at least 4 points required");
    std::vector<Point> pts = input;
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) area2 += cross(pts[i], pts[(i + 1) % n]);
    if (area2 < 0.0) std::reverse(pts.begin(), pts.end());
    if (polyline_self_intersects(pts))
        throw std::invalid_argument("curve_from_points: polygon self-intersects");

    // Periodic cubic spline in chord-length parameter u.
    std::vector<double> h(n), u(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        h[i] = (pts[(i + 1) % n] - pts[i]).norm();
        if (!(h[i] > 0.0)) throw std::invalid_argument("curve_from_points: repeated point");
        u[i + 1] = u[i] + h[i];
    }
    const double total = u[n];
    Eigen::SparseMatrix<double> a(n, n);
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::MatrixXd rhs(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
        trip.emplace_back(i, im, h[im]);
        trip.emplace_back(i, i, 2.0 * (h[im] + h[i]));
        trip.emplace_back(i, ip, h[i]);
        const Point d = (pts[ip] - pts[i]) / h[i] - (pts[i] - pts[im]) / h[im];
        rhs.row(i) = 6.0 * d.transpose();
    }
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    const Eigen::MatrixXd m2 = lu.solve(rhs);

    auto param = [&](double th) {
        double x = th / kTwoPi * total;
        x = std::fmod(x, total);
        if (x < 0) x += total;
        std::size_t i = static_cast<std::size_t>(std::upper_bound(u.begin(), u.end(), x) - u.begin()) - 1;
        if (i >= n) i = n - 1;
        const std::size_t ip = (i + 1) % n;
        const double hi = h[i];
        const double t1 = u[i] + hi - x, t0 = x - u[i];
        const Point mi = m2.row(i).transpose(), mp = m2.row(ip).transpose();
        Curve::Jet j;
        j.position = mi * t1 * t1 * t1 / (6 * hi) + mp * t0 * t0 * t0 / (6 * hi) +
                     (pts[i] - mi * hi * hi / 6) * (t1 / hi) + (pts[ip] - mp * hi * hi / 6) * (t0 / hi);
        j.first = -mi * t1 * t1 / (2 * hi) + mp * t0 * t0 / (2 * hi) - (pts[i] - mi * hi * hi / 6) / hi +
                  (pts[ip] - mp * hi * hi / 6) / hi;
        j.second = mi * t1 / hi + mp * t0 / hi;
        const double dudth = total / kTwoPi;
        j.first *= dudth;
        j.second *= dudth * dudth;
        return j;
    };
    // Keep the physical size: target length is the spline's own arc length.
    const double arc = integrate_adaptive([&](double th) { return param(th).first.norm(); }, 0.0,
                                          kTwoPi, 1e-13);
    return curve_from_parametrization(param, arc, samples, std::move(label));
}

Curve mirrored(const Curve& curve) {
    const auto& src = curve.samples();
    const std::size_t n = src.size();
    std::vector<CurveSample> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& old = src[(n - j) % n];
        CurveSample smp;
        smp.s = curve.spacing() * static_cast<double>(j);
        smp.position = Point(old.position.x(), -old.position.y());
        smp.tangent = Point(-old.tangent.x(), old.tangent.y());
        smp.normal = rotate_clockwise(smp.tangent);
        smp.curvature = old.curvature;
        out[j] = smp;
    }
    return with_certified_offsets(Curve(std::move(out), curve.length(), curve.label() + "-mirrored"));
}

namespace {

int orientation(const Point& a, const Point& b, const Point& c) {
    const double v = cross(b - a, c - a);
    const double scale = (b - a).norm() * (c - a).norm();
    if (std::abs(v) <= 1e-14 * scale) return 0;
    return v > 0 ? 1 : -1;
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
    const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace

bool polyline_self_intersects(const std::vector<Point>& pts) {
    const std::size_t n = pts.size();
    if (n < 4) return false;
    Point lo = pts[0], hi = pts[0];
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lo = lo.cwiseMin(pts[i]);
        hi = hi.cwiseMax(pts[i]);
        total += (pts[(i + 1) % n] - pts[i]).norm();
    }
    const double extent = std::max((hi - lo).maxCoeff(), 1e-300);
    const double cell = std::max(2.0 * total / n, extent / 2048.0);
    const long nx = static_cast<long>(std::floor((hi.x() - lo.x()) / cell)) + 1;
    std::unordered_map<long, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = pts[i];
        const Point& b = pts[(i + 1) % n];
        const long x0 = static_cast<long>(std::floor((std::min(a.x(), b.x()) - lo.x()) / cell));
        const long x1 = static_cast<long>(std::floor((std::max(a.x(), b.x()) - lo.x()) / cell));
        const long y0 = static_cast<long>(std::floor((std::min(a.y(), b.y()) - lo.y()) / cell));
        const long y1 = static_cast<long>(std::floor((std::max(a.y(), b.y()) - lo.y()) / cell));
        for (long y = y0; y <= y1; ++y)
            for (long x = x0; x <= x1; ++x) buckets[y * (nx + 1) + x].push_back(i);
    }
    for (const auto& [key, segs] : buckets) {
        for (std::size_t a = 0; a < segs.size(); ++a) {
            for (std::size_t b = a + 1; b < segs.size(); ++b) {
                const std::size_t i = segs[a], j = segs[b];
                const std::size_t d = i > j ? i - j : j - i;
                if (d <= 1 || d == n - 1) continue;
                if (segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) return true;
            }
        }
    }
    return false;
}

SafeOffsets safe_offsets(const Curve& curve) {
    constexpr int kLevels = 64;
    const auto& smp = curve.samples();
    double max_pos = 0.0, max_neg = 0.0;
    for (const auto& p : smp) {
        max_pos = std::max(max_pos, p.curvature);
        max_neg = std::max(max_neg, -p.curvature);
    }
    auto offset_polyline = [&](double t) {
        std::vector<Point> pts;
        pts.reserve(smp.size());
        for (const auto& p : smp) pts.push_back(p.position + t * p.normal);
        return pts;
    };
    // Largest tested level below the Jacobian bound whose offset polylines
    // (and all smaller levels) are free of self-intersections.
    auto sweep = [&](double jacobian_bound, double sign) {
        const double top = std::isfinite(jacobian_bound) ? jacobian_bound : 0.0;
        double certified = 0.0;
        for (int j = 1; j <= kLevels; ++j) {
            const double t = top * j / (kLevels + 1);
            if (polyline_self_intersects(offset_polyline(sign * t))) break;
            certified = t;
        }
        if (certified == 0.0) {
            double t = top / (kLevels + 1);
            while (t > 1e-12 * curve.length()) {
                t *= 0.5;
                if (!polyline_self_intersects(offset_polyline(sign * t))) return t;
            }
            return t;
        }
        return certified;
    };
    SafeOffsets out;
    out.inner = sweep(max_pos > 0.0 ? 1.0 / max_pos : curve.length(), -1.0);
    out.outer = max_neg > 1e-12 ? sweep(1.0 / max_neg, 1.0) : kUnboundedOffset;
    return out;
}

double ParallelCurve::polyline_length() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        sum += (points[(i + 1) % points.size()] - points[i]).norm();
    return sum;
}

ParallelCurve parallel_curve(const Curve& curve, double offset, int samples) {
    ParallelCurve pc;
    pc.offset = offset;
    const int n = samples > 0 ? samples : static_cast<int>(curve.size());
    const double ds = curve.length() / n;
    pc.s.resize(n);
    pc.points.resize(n);
    pc.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double s = ds * i;
        pc.s[i] = s;
        if (samples <= 0) {
            const auto& p = curve.samples()[i];
            pc.points[i] = p.position + offset * p.normal;
            pc.weights[i] = (1.0 + p.curvature * offset) * ds;
        } else {
            pc.points[i] = curve.parallel_point(s, offset);
            pc.weights[i] = (1.0 + curve.curvature_at(s) * offset) * ds;
        }
        pc.length += pc.weights[i];
    }
    return pc;
}

void export_curve_csv(const Curve& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_curve_csv: cannot open " + path.string());
    out.precision(17);
    out << "s,x,y,kappa\n";
    for (const auto& p : curve.samples())
        out << p.s << ',' << p.position.x() << ',' << p.position.y() << ',' << p.curvature << '\n';
}

}  // namespace softring
