#pragma once

#include "softring/geometry.hpp"

#include <memory>
#include <vector>

namespace softring {

/// Nearest point on the curve and the signed distance t(x):
/// negative inside the enclosed domain, positive outside.
struct DistanceQuery {
    double t = 0.0;
    double s = 0.0;          // arc-length parameter of the foot point
    Point foot = Point::Zero();
};

/// Exact signed distance to a smooth curve.
///
/// A bounding-volume hierarchy over the sample polyline finds the nearest
/// segment; the foot point is then refined by Newton iteration on the Hermite
/// interpolant, so the result is accurate to the curve representation rather
/// than to the polyline.
class DistanceField {
public:
    explicit DistanceField(Curve curve);

    const Curve& curve() const { return curve_; }
    DistanceQuery query(const Point& x) const;
    double operator()(const Point& x) const { return query(x).t; }

    /// Curvature of the level set through x, kappa / (1 + kappa t), from the foot point.
    double level_curvature(const DistanceQuery& q) const;

private:
    struct Node {
        Eigen::AlignedBox2d box;
        int first = 0, count = 0;  // leaf segment range
        int left = -1, right = -1;
    };
    int build(int first, int count);

    Curve curve_;
    std::vector<Node> nodes_;
};

/// Axis-aligned box [lo, hi].
struct Box {
    Point lo = Point::Zero();
    Point hi = Point::Zero();
};

/// Node-based grid of signed distance values; node (i, j) sits at lo + h (i, j).
struct DistanceGrid {
    Box box;
    double h = 0.0;
    int nx = 0, ny = 0;               // nodes per direction
    std::vector<double> values;       // row-major, index j * nx + i
    std::shared_ptr<const DistanceField> field;

    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
    Point node(int i, int j) const { return box.lo + h * Point(i, j); }
};

/// Exact signed distance at every node. Throws std::invalid_argument when the
/// box does not contain the curve with a margin of at least one cell, unless
/// `local_patch` is set (a window used to resolve small level sets).
DistanceGrid signed_distance_grid(std::shared_ptr<const DistanceField> field, const Box& box,
                                  double h_grid, bool local_patch = false);

/// Bounding box of the curve enlarged by `margin` on every side.
Box curve_box(const Curve& curve, double margin);

/// Length of the level set {x : t(x) = level} inside the grid.
///
/// Marching squares locates the crossed cells; crossing points on cell edges
/// are refined with the exact distance (regula falsi), and each chord is
/// corrected to the arc it subtends using the level-set curvature. A level
/// below zero measures the inner set L_+(|level|), above zero the outer L_-(level).
double level_set_length(const DistanceGrid& grid, double level);

/// Batch version; cells are bucketed by value range so each level only visits
/// the cells it crosses.
std::vector<double> level_set_lengths(const DistanceGrid& grid, const std::vector<double>& levels);

/// Largest inner distance max(-t) (inradius R_+), located on the grid and
/// refined by a local maximization of the exact distance.
double inradius(const DistanceGrid& grid);

}  // namespace softring
