#pragma once

#include "bodyfield/voxel_grid.hpp"

#include <optional>
#include <vector>

namespace bodyfield {

struct RayHit {
    double t = 0.0;
    std::uint32_t face = 0;
    Vec3 barycentric = Vec3::Zero();
    bool near_edge = false;
};

struct TriangleHit {
    double t = 0.0;
    Vec3 barycentric = Vec3::Zero();
    /// Set when the hit sits within 1e-9 (barycentric) of an edge or vertex,
    /// or the ray nearly lies in the triangle plane.
    bool near_degenerate = false;
};

/// Moller-Trumbore with closed edges. Returns hits with t > 0 only.
std::optional<TriangleHit> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                              const Vec3& c);

struct RayCast {
    std::vector<RayHit> hits;  // sorted by (t, face)
    bool degenerate = false;   // some hit grazes an edge/vertex
};

/// Grid-accelerated intersection against every face the ray meets.
RayCast cast_ray(const TriMesh& mesh, const VoxelGrid& grid, const Ray& ray);
/// Reference intersector that tests every face.
RayCast cast_ray_brute(const TriMesh& mesh, const Ray& ray);

/// All intersections with t > 0, sorted ascending (ties by face index).
/// A crossing through a shared edge or vertex is reported once, by the
/// lowest-indexed face. `direction` must be unit length within 1e-9.
std::vector<RayHit> intersect_ray(const TriMesh& mesh, const VoxelGrid& grid, const Vec3& origin,
                                  const Vec3& direction);
std::vector<RayHit> intersect_ray_brute(const TriMesh& mesh, const Vec3& origin,
                                        const Vec3& direction);

}  // namespace bodyfield
