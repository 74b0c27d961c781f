#pragma once

#include "bodyfield/voxel_grid.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace bodyfield {

// Sign convention: points INSIDE the mesh have POSITIVE signed distance and
// sign +1; outside is negative / -1. This is the opposite of the usual SDF
// convention.

/// Distances at or below this are treated as "on the surface".
inline constexpr double kSurfaceEpsilon = 1e-9;

struct SignQuery {
    int sign = -1;
    bool on_surface = false;  // sign forced to -1
};

/// Ray-parity inside test along a fixed direction. Rays that graze an edge or
/// vertex are re-cast from an origin shifted by k * 1e-9 * bbox diagonal along
/// a fixed tie-break axis (k = 1..3). Throws for non-watertight meshes.
SignQuery sign_query(const Vec3& x, const TriMesh& mesh, const VoxelGrid& grid);
inline int sign_of(const Vec3& x, const TriMesh& mesh, const VoxelGrid& grid) {
    return sign_query(x, mesh, grid).sign;
}

/// sign(x) * distance to the closest point; exactly 0 on the surface.
double sdf(const Vec3& x, const TriMesh& mesh, const VoxelGrid& grid);

/// sign(x) * (x - v) / |x - v| with v the first-indexed closest point.
/// Throws GeometryError when x lies on the surface.
Vec3 sdf_gradient(const Vec3& x, const TriMesh& mesh, const VoxelGrid& grid);

/// Applies the closest point's barycentric weights to the canonical vertices.
Vec3 canonical_correspondence(std::uint32_t face, const Vec3& barycentric, const TriMesh& mesh);

struct BodyEmbedding {
    double sdf = 0.0;
    Vec3 grad = Vec3::Zero();  // zero when x is on the surface
    Vec3 canonical_point = Vec3::Zero();
    std::uint32_t face = 0;
    Vec3 barycentric = Vec3::Zero();
};

/// (S, S', v-bar) from a single closest-point search.
BodyEmbedding body_embedding(const Vec3& x, const TriMesh& mesh, const VoxelGrid& grid);
std::vector<BodyEmbedding> body_embeddings(std::span<const Vec3> points, const TriMesh& mesh,
                                           const VoxelGrid& grid);

/// Body-aligned normalized coordinates: y = scale * rotation * (x - center).
/// The rotation undoes the global body orientation; the mesh's rotated
/// bounding box maps into [-1, 1)^3 with one uniform scale.
struct NormalizedFrame {
    Mat3 rotation = Mat3::Identity();
    Vec3 center = Vec3::Zero();
    double scale = 1.0;

    Vec3 apply(const Vec3& x) const { return scale * (rotation * (x - center)); }
    Vec3 apply_direction(const Vec3& d) const { return rotation * d; }
    Vec3 inverse(const Vec3& y) const { return rotation.transpose() * (y / scale) + center; }
};

/// `global_rotation` is the body's world orientation (orthonormal, det +1).
NormalizedFrame normalize_frame(const TriMesh& mesh, const Mat3& global_rotation = Mat3::Identity());

/// Scalar volume file: "SDF3", u32 nx, ny, nz, then little-endian float32
/// with x varying fastest, then y, then z. Non-finite values are written as 0.
struct ScalarVolume {
    int nx = 0, ny = 0, nz = 0;
    std::vector<float> values;
};
void write_sdf3(const std::filesystem::path& path, int nx, int ny, int nz, const std::vector<double>& values);
ScalarVolume read_sdf3(const std::filesystem::path& path);

}  // namespace bodyfield
