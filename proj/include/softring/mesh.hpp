#pragma once

#include "softring/geometry.hpp"

#include <array>
#include <filesystem>
#include <vector>

namespace softring {

enum class Region : unsigned char { omega, strip, exterior };

/// Closed chain of mesh nodes on the parallel curve Sigma_t (ring order, s increasing).
struct FittedChain {
    double t = 0.0;
    std::vector<int> nodes;
    std::vector<double> s;
};

/// Triangulation of the disk of radius r_out around the curve centroid.
///
/// The strip and a collar around it are meshed by rings of parallel-curve
/// points, so every offset in the ring set is an exact edge chain. Inside,
/// homothetic copies of the innermost ring shrink to the centroid; outside,
/// rings blend from the outermost parallel curve to the truncation circle.
/// Ring resolution changes by factors of two through conforming transition rows.
struct Mesh {
    std::vector<Point> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Region> regions;
    std::vector<char> boundary;                       // node lies on the truncation circle
    /// Parallel coordinates (s, t) of the triangle corners for ring-zone triangles
    /// (s unwrapped across the seam); NaN elsewhere.
    std::vector<std::array<Eigen::Vector2d, 3>> params;
    std::vector<FittedChain> chains;
    Point center = Point::Zero();
    double r_out = 0.0;
    double h = 0.0;
    int ring_points = 0;                              // points per parallel ring

    double triangle_area(std::size_t k) const;
    double region_area(Region r) const;
    const FittedChain* chain_at(double t) const;
    double min_triangle_area() const;
};

struct MeshOptions {
    double h = 0.0;              // collar size; 0 selects L / 256
    double h_reference = 0.0;    // size that fixes far-field scales; 0 selects L / 256
    double collar_inner = 0.0;   // 0 selects an automatic width within the safe offsets
    double collar_outer = 0.0;
    double r_out = 0.0;          // truncation radius around the centroid (required)
    double decay_length = 0.0;   // 1 / sqrt(|lambda|) estimate for far-field sizing
    double growth = 1.1;         // size ratio between successive outer rings at reference size
};

/// Strip-fitted mesh with rings at -d_minus, d_plus and every atom offset.
/// Throws std::invalid_argument when the offsets exceed the safe radii or a
/// ring is not star-shaped about the centroid.
Mesh generate_mesh(const Curve& curve, double d_minus, double d_plus, const std::vector<double>& atom_offsets,
                   const MeshOptions& options);

/// Uniform bucket grid for point location.
class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh);
    /// Triangle containing x and its barycentric coordinates; -1 when outside.
    int locate(const Point& x, Eigen::Vector3d& bary) const;

private:
    const Mesh& mesh_;
    Point lo_;
    double cell_ = 1.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> buckets_;
};

void export_mesh_csv(const Mesh& mesh, const std::filesystem::path& nodes_path,
                     const std::filesystem::path& triangles_path);

}  // namespace softring
