#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace softring {

using Point = Eigen::Vector2d;

/// Encodes D_+ = infinity (convex inner domain).
inline constexpr double kUnboundedOffset = std::numeric_limits<double>::infinity();

/// Default number of arc-length samples per curve.
inline constexpr int kDefaultCurveSamples = 2048;

struct CurveSample {
    double s = 0.0;
    Point position = Point::Zero();
    Point tangent = Point::Zero();  // unit, counterclockwise orientation
    Point normal = Point::Zero();   // unit, pointing out of the enclosed domain
    double curvature = 0.0;         // positive where the enclosed domain is convex
};

/// Certified injectivity radii of the parallel-coordinate map (s, t) -> sigma(s) + t nu(s).
struct SafeOffsets {
    double inner = 0.0;               // D_- certified
    double outer = kUnboundedOffset;  // D_+ certified, or kUnboundedOffset
};

/// Closed simple counterclockwise C^2 curve stored as uniform arc-length samples.
///
/// Off-sample positions use cubic Hermite interpolation on (position, tangent),
/// which is O(ds^4) accurate for smooth curves; curvature is interpolated
/// linearly between samples. Instances are immutable once built.
class Curve {
public:
    Curve(std::vector<CurveSample> samples, double length, std::string label = "curve");

    const std::vector<CurveSample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double length() const { return length_; }
    double spacing() const { return length_ / static_cast<double>(samples_.size()); }
    const std::string& label() const { return label_; }

    const SafeOffsets& safe_offsets() const { return offsets_; }
    double d_minus_max() const { return offsets_.inner; }
    double d_plus_max() const { return offsets_.outer; }

    /// Hermite-interpolated point, its derivative and second derivative with respect to s.
    struct Jet {
        Point position, first, second;
    };
    Jet jet_at(double s) const;
    Point point_at(double s) const { return jet_at(s).position; }
    Point tangent_at(double s) const;
    Point normal_at(double s) const;
    double curvature_at(double s) const;
    Point parallel_point(double s, double t) const { return point_at(s) + t * normal_at(s); }

    /// Periodic trapezoidal sum of kappa ds (equals 2 pi for a simple closed curve).
    double total_curvature() const;
    double enclosed_area() const;
    Point centroid() const;
    double max_curvature() const;
    double min_curvature() const;
    /// Smallest and largest distance from the centroid to the samples.
    std::pair<double, double> radial_extent() const;

    std::vector<Point> polyline() const;

    /// Wraps s into [0, L).
    double wrap(double s) const;

private:
    friend Curve with_certified_offsets(Curve curve);
    std::vector<CurveSample> samples_;
    double length_;
    std::string label_;
    SafeOffsets offsets_{};
};

/// Computes and attaches the certified offsets.
Curve with_certified_offsets(Curve curve);

/// Circle of length L centred at the origin.
Curve build_circle(double length, int samples = kDefaultCurveSamples);

/// Ellipse with semi-axes a >= b > 0, rescaled so its perimeter equals `length`.
Curve build_ellipse(double a, double b, double length, int samples = kDefaultCurveSamples);

/// Perimeter of the ellipse with semi-axes a, b by adaptive quadrature.
double ellipse_perimeter(double a, double b);

/// r(theta) = R (1 + sum_m a_m cos(m theta)), rescaled to perimeter `length`.
/// Rejects radius functions dipping below `min_radius_fraction * R` and
/// self-intersecting results.
Curve build_fourier_curve(double base_radius, const std::map<int, double>& cosine_coefficients,
                          double length, int samples = kDefaultCurveSamples,
                          double min_radius_fraction = 0.2);

/// Periodic cubic spline through the given closed polygon (no repeated end
/// point), resampled to uniform arc length; orientation is made counterclockwise.
Curve curve_from_points(const std::vector<Point>& points, int samples = kDefaultCurveSamples,
                        std::string label = "spline");

/// Smooth closed parametrization theta in [0, 2pi) -> (x, x', x'').
using Parametrization = std::function<Curve::Jet(double theta)>;
Curve curve_from_parametrization(const Parametrization& param, double target_length, int samples,
                                 std::string label);

/// Mirror image across the x axis (orientation restored to counterclockwise).
Curve mirrored(const Curve& curve);

/// Conservative injectivity radii: the Jacobian bound 1/max(0, -+kappa)
/// intersected with a self-intersection sweep of offset polylines at 64 levels.
SafeOffsets safe_offsets(const Curve& curve);

/// True when the closed polyline has two non-adjacent segments that intersect.
bool polyline_self_intersects(const std::vector<Point>& closed_polyline);

/// Parallel curve Sigma_t = { sigma(s) + t nu(s) }.
struct ParallelCurve {
    double offset = 0.0;
    std::vector<double> s;
    std::vector<Point> points;
    std::vector<double> weights;  // (1 + kappa t) ds at each sample
    double length = 0.0;          // sum of weights: ∫ (1 + kappa t) ds

    double polyline_length() const;
};

ParallelCurve parallel_curve(const Curve& curve, double offset, int samples = 0);

/// CSV with columns s,x,y,kappa.
void export_curve_csv(const Curve& curve, const std::filesystem::path& path);

}  // namespace softring
