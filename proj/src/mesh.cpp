#include "softring/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace softring {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

struct Builder {
    Mesh mesh;

    int add_node(const Point& p) {
        mesh.nodes.push_back(p);
        mesh.boundary.push_back(0);
        return static_cast<int>(mesh.nodes.size()) - 1;
    }

    void add_triangle(std::array<int, 3> tri, Region region,
                      std::array<Eigen::Vector2d, 3> param = {Eigen::Vector2d(kNaN, kNaN),
                                                              Eigen::Vector2d(kNaN, kNaN),
                                                              Eigen::Vector2d(kNaN, kNaN)}) {
        const Point& a = mesh.nodes[tri[0]];
        const Point& b = mesh.nodes[tri[1]];
        const Point& c = mesh.nodes[tri[2]];
        const double area = 0.5 * cross(b - a, c - a);
        if (area < 0.0) {
            std::swap(tri[1], tri[2]);
            std::swap(param[1], param[2]);
        }
        const double scale = (b - a).squaredNorm() + (c - a).squaredNorm();
        if (!(std::abs(area) > 1e-14 * scale))
            throw std::runtime_error("generate_mesh: degenerate triangle");
        mesh.triangles.push_back(tri);
        mesh.regions.push_back(region);
        mesh.params.push_back(param);
    }

    /// Triangulates the band between two closed rings whose sizes agree or differ by a factor of two.
    void connect(const std::vector<int>& a, const std::vector<int>& b, Region region) {
        const std::size_t na = a.size(), nb = b.size();
        if (na == nb) {
            for (std::size_t i = 0; i < na; ++i) {
                const int a0 = a[i], a1 = a[(i + 1) % na], b0 = b[i], b1 = b[(i + 1) % nb];
                const double d1 = (mesh.nodes[a0] - mesh.nodes[b1]).squaredNorm();
                const double d2 = (mesh.nodes[a1] - mesh.nodes[b0]).squaredNorm();
                if (d1 <= d2) {
                    add_triangle({a0, a1, b1}, region);
                    add_triangle({a0, b1, b0}, region);
                } else {
                    add_triangle({a0, a1, b0}, region);
                    add_triangle({a1, b1, b0}, region);
                }
            }
        } else if (na == 2 * nb) {
            for (std::size_t i = 0; i < nb; ++i) {
                const int p0 = a[2 * i], p1 = a[2 * i + 1], p2 = a[(2 * i + 2) % na];
                const int q0 = b[i], q1 = b[(i + 1) % nb];
                add_triangle({p0, p1, q0}, region);
                add_triangle({p1, q1, q0}, region);
                add_triangle({p1, p2, q1}, region);
            }
        } else if (nb == 2 * na) {
            connect(b, a, region);
        } else {
            throw std::logic_error("generate_mesh: incompatible ring sizes");
        }
    }
};

void require_star_shaped(const std::vector<Point>& ring, const Point& c, const char* what) {
    const std::size_t n = ring.size();
    double winding = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point u = ring[i] - c, v = ring[(i + 1) % n] - c;
        if (!(cross(u, v) > 0.0))
            throw std::invalid_argument(std::string("generate_mesh: ") + what +
                                        " ring is not star-shaped about the centroid");
        winding += std::atan2(cross(u, v), u.dot(v));
    }
    if (std::abs(winding - 2.0 * std::numbers::pi) > 1e-6)
        throw std::invalid_argument(std::string("generate_mesh: ") + what + " ring winds incorrectly");
}

}  // namespace

double Mesh::triangle_area(std::size_t k) const {
    const auto& t = triangles[k];
    return 0.5 * cross(nodes[t[1]] - nodes[t[0]], nodes[t[2]] - nodes[t[0]]);
}

double Mesh::region_area(Region r) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < triangles.size(); ++k)
        if (regions[k] == r) sum += triangle_area(k);
    return sum;
}

double Mesh::min_triangle_area() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < triangles.size(); ++k) m = std::min(m, triangle_area(k));
    return m;
}

const FittedChain* Mesh::chain_at(double t) const {
    for (const auto& c : chains)
        if (std::abs(c.t - t) <= 1e-12 * (1.0 + std::abs(t))) return &c;
    return nullptr;
}

Mesh generate_mesh(const Curve& curve, double d_minus, double d_plus, const std::vector<double>& atom_offsets,
                   const MeshOptions& options) {
    const double length = curve.length();
    const double h = options.h > 0.0 ? options.h : length / 256.0;
    const double h_ref = options.h_reference > 0.0 ? options.h_reference : length / 256.0;
    const double factor = h / h_ref;
    if (!(d_minus > 0.0) || !(d_plus > 0.0)) throw std::invalid_argument("generate_mesh: offsets must be positive");
    if (!(d_minus < curve.d_minus_max()) || !(d_plus < curve.d_plus_max()))
        throw std::invalid_argument("generate_mesh: offsets exceed the certified safe radii");
    for (double t : atom_offsets)
        if (t < -d_minus || t > d_plus) throw std::invalid_argument("generate_mesh: atom outside the strip");

    const double collar_target = std::max(0.25 * (d_minus + d_plus), 4.0 * h_ref);
    const double collar_in = options.collar_inner > 0.0
                                 ? options.collar_inner
                                 : std::max(0.0, std::min(collar_target, 0.9 * curve.d_minus_max() - d_minus));
    const double collar_out =
        options.collar_outer > 0.0
            ? options.collar_outer
            : std::min(collar_target, std::isfinite(curve.d_plus_max()) ? std::max(0.0, 0.9 * curve.d_plus_max() - d_plus)
                                                                        : collar_target);
    if (-d_minus - collar_in <= -curve.d_minus_max() || d_plus + collar_out >= curve.d_plus_max())
        throw std::invalid_argument("generate_mesh: collar exceeds the safe radii");

    Builder b;
    Mesh& m = b.mesh;
    m.center = curve.centroid();
    m.h = h;
    const int n_s = 64 * std::max(1, static_cast<int>(std::ceil(length / (64.0 * h))));
    m.ring_points = n_s;
    const double ds = length / n_s;

    // Offsets of the parallel rings: breakpoints plus uniform subdivision of size about h.
    std::vector<double> breaks = {-d_minus - collar_in, -d_minus, d_plus, d_plus + collar_out};
    breaks.insert(breaks.end(), atom_offsets.begin(), atom_offsets.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                 breaks.end());
    std::vector<double> offsets = {breaks.front()};
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const int parts = std::max(1, static_cast<int>(std::ceil((breaks[k + 1] - breaks[k]) / h - 1e-9)));
        for (int p = 1; p < parts; ++p) offsets.push_back(breaks[k] + (breaks[k + 1] - breaks[k]) * p / parts);
        offsets.push_back(breaks[k + 1]);
    }

    std::vector<std::vector<int>> rings(offsets.size());
    for (std::size_t j = 0; j < offsets.size(); ++j) {
        FittedChain chain;
        chain.t = offsets[j];
        for (int i = 0; i < n_s; ++i) {
            const int id = b.add_node(curve.parallel_point(ds * i, offsets[j]));
            rings[j].push_back(id);
            chain.nodes.push_back(id);
            chain.s.push_back(ds * i);
        }
        m.chains.push_back(std::move(chain));
    }
    auto band_region = [&](double t0, double t1) {
        const double eps = 1e-12;
        if (t1 <= -d_minus + eps) return Region::omega;
        if (t0 >= -d_minus - eps && t1 <= d_plus + eps) return Region::strip;
        return Region::exterior;
    };
    for (std::size_t j = 0; j + 1 < offsets.size(); ++j) {
        const Region region = band_region(offsets[j], offsets[j + 1]);
        const double t0 = offsets[j], t1 = offsets[j + 1];
        for (int i = 0; i < n_s; ++i) {
            const int ip = (i + 1) % n_s;
            const int a0 = rings[j][i], a1 = rings[j][ip], b0 = rings[j + 1][i], b1 = rings[j + 1][ip];
            const Eigen::Vector2d pa0(ds * i, t0), pa1(ds * (i + 1), t0), pb0(ds * i, t1), pb1(ds * (i + 1), t1);
            const double d1 = (m.nodes[a0] - m.nodes[b1]).squaredNorm();
            const double d2 = (m.nodes[a1] - m.nodes[b0]).squaredNorm();
            if (d1 <= d2) {
                b.add_triangle({a0, a1, b1}, region, {pa0, pa1, pb1});
                b.add_triangle({a0, b1, b0}, region, {pa0, pb1, pb0});
            } else {
                b.add_triangle({a0, a1, b0}, region, {pa0, pa1, pb0});
                b.add_triangle({a1, b1, b0}, region, {pa1, pb1, pb0});
            }
        }
    }

    // Inner zone: homothetic rings toward the centroid.
    {
        const std::vector<int>& base = rings.front();
        std::vector<Point> base_pts;
        for (int id : base) base_pts.push_back(m.nodes[id]);
        require_star_shaped(base_pts, m.center, "inner");
        double mean_r = 0.0, perimeter = 0.0;
        for (std::size_t i = 0; i < base_pts.size(); ++i) {
            mean_r += (base_pts[i] - m.center).norm();
            perimeter += (base_pts[(i + 1) % base_pts.size()] - base_pts[i]).norm();
        }
        mean_r /= static_cast<double>(base_pts.size());
        const int layers = std::max(2, static_cast<int>(std::lround(mean_r / h)));
        const double dr = mean_r / layers;
        std::vector<int> prev = base;
        int stride = 1;
        for (int j = 1; j < layers; ++j) {
            const double lambda = 1.0 - static_cast<double>(j) / layers;
            int n = n_s / stride;
            if (lambda * perimeter / n < 0.6 * dr && n % 2 == 0 && n / 2 >= 8) {
                stride *= 2;
                n /= 2;
            }
            std::vector<int> ring;
            for (int i = 0; i < n; ++i)
                ring.push_back(b.add_node(m.center + lambda * (base_pts[static_cast<std::size_t>(i * stride)] - m.center)));
            b.connect(prev, ring, Region::omega);
            prev = std::move(ring);
        }
        const int centre = b.add_node(m.center);
        for (std::size_t i = 0; i < prev.size(); ++i)
            b.add_triangle({centre, prev[i], prev[(i + 1) % prev.size()]}, Region::omega);
    }

    // Outer zone: rays from the outermost parallel ring to the truncation circle.
    {
        const double t_hi = offsets.back();
        std::vector<Point> base_pts;
        for (int id : rings.back()) base_pts.push_back(m.nodes[id]);
        require_star_shaped(base_pts, m.center, "outer");
        double mean_r = 0.0, max_r = 0.0;
        for (const Point& p : base_pts) {
            const double r = (p - m.center).norm();
            mean_r += r;
            max_r = std::max(max_r, r);
        }
        mean_r /= static_cast<double>(base_pts.size());
        if (!(options.r_out > max_r + 2.0 * h))
            throw std::invalid_argument("generate_mesh: truncation radius too small for the strip");
        m.r_out = options.r_out;

        const double growth = std::pow(options.growth, factor);
        const double s_max = factor * std::max(8.0 * h_ref, 0.1 * options.decay_length);
        std::vector<double> steps;
        double total = 0.0, step = h;
        const double span = options.r_out - mean_r;
        while (total < span) {
            steps.push_back(step);
            total += step;
            step = std::min(step * growth, s_max);
        }
        if (steps.size() > 1 && total - span > 0.5 * steps.back()) {
            total -= steps.back();
            steps.pop_back();
        }
        std::vector<int> prev = rings.back();
        int n = n_s;
        double eta = 0.0;
        for (std::size_t j = 0; j < steps.size(); ++j) {
            eta += steps[j] / total;
            if (j + 1 == steps.size()) eta = 1.0;
            const double radius = (1.0 - eta) * mean_r + eta * options.r_out;
            const double next_step = j + 1 < steps.size() ? steps[j + 1] : steps[j];
            if (2.0 * std::numbers::pi * radius / n > 1.5 * next_step) n *= 2;
            std::vector<int> ring;
            for (int i = 0; i < n; ++i) {
                const double s = length * i / n;
                const Point bp = curve.parallel_point(s, t_hi);
                const Point dir = (bp - m.center).normalized();
                ring.push_back(b.add_node((1.0 - eta) * bp + eta * (m.center + options.r_out * dir)));
            }
            b.connect(prev, ring, Region::exterior);
            prev = std::move(ring);
        }
        for (int id : prev) m.boundary[static_cast<std::size_t>(id)] = 1;
    }
    return std::move(b.mesh);
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(mesh) {
    Point lo = mesh.nodes.front(), hi = lo;
    for (const Point& p : mesh.nodes) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double extent = std::max((hi - lo).maxCoeff(), 1e-12);
    const int per_side = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.triangles.size()))));
    cell_ = extent / per_side * (1.0 + 1e-9);
    lo_ = lo;
    nx_ = static_cast<int>((hi.x() - lo.x()) / cell_) + 1;
    ny_ = static_cast<int>((hi.y() - lo.y()) / cell_) + 1;
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
        const auto& t = mesh.triangles[k];
        Point tlo = mesh.nodes[t[0]], thi = tlo;
        for (int v = 1; v < 3; ++v) {
            tlo = tlo.cwiseMin(mesh.nodes[t[v]]);
            thi = thi.cwiseMax(mesh.nodes[t[v]]);
        }
        const int x0 = static_cast<int>((tlo.x() - lo_.x()) / cell_), x1 = static_cast<int>((thi.x() - lo_.x()) / cell_);
        const int y0 = static_cast<int>((tlo.y() - lo_.y()) / cell_), y1 = static_cast<int>((thi.y() - lo_.y()) / cell_);
        for (int y = y0; y <= std::min(y1, ny_ - 1); ++y)
            for (int x = x0; x <= std::min(x1, nx_ - 1); ++x)
                buckets_[static_cast<std::size_t>(y) * nx_ + x].push_back(static_cast<int>(k));
    }
}

int PointLocator::locate(const Point& x, Eigen::Vector3d& bary) const {
    const int cx = static_cast<int>(std::floor((x.x() - lo_.x()) / cell_));
    const int cy = static_cast<int>(std::floor((x.y() - lo_.y()) / cell_));
    if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) return -1;
    int best = -1;
    double best_min = -std::numeric_limits<double>::infinity();
    for (int k : buckets_[static_cast<std::size_t>(cy) * nx_ + cx]) {
        const auto& t = mesh_.triangles[static_cast<std::size_t>(k)];
        const Point& a = mesh_.nodes[t[0]];
        const Point& b = mesh_.nodes[t[1]];
        const Point& c = mesh_.nodes[t[2]];
        const double det = cross(b - a, c - a);
        const double l1 = cross(b - x, c - x) / det;
        const double l2 = cross(c - x, a - x) / det;
        const double l3 = 1.0 - l1 - l2;
        const double lmin = std::min({l1, l2, l3});
        if (lmin > best_min) {
            best_min = lmin;
            best = k;
            bary = Eigen::Vector3d(l1, l2, l3);
        }
        if (lmin >= 0.0) return k;
    }
    return best_min > -1e-9 ? best : -1;
}

void export_mesh_csv(const Mesh& mesh, const std::filesystem::path& nodes_path,
                     const std::filesystem::path& triangles_path) {
    std::ofstream nodes(nodes_path);
    std::ofstream tris(triangles_path);
    if (!nodes || !tris) throw std::runtime_error("export_mesh_csv: cannot open output");
    nodes.precision(17);
    nodes << "id,x,y,boundary\n";
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
        nodes << i << ',' << mesh.nodes[i].x() << ',' << mesh.nodes[i].y() << ',' << int(mesh.boundary[i]) << '\n';
    tris << "id,a,b,c,region\n";
    for (std::size_t k = 0; k < mesh.triangles.size(); ++k)
        tris << k << ',' << mesh.triangles[k][0] << ',' << mesh.triangles[k][1] << ',' << mesh.triangles[k][2] << ','
             << static_cast<int>(mesh.regions[k]) << '\n';
}

}  // namespace softring
