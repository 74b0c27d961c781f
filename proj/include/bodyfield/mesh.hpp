#pragma once

#include "bodyfield/types.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace bodyfield {

using Face = std::array<std::uint32_t, 3>;

/// Faces with area below this (m^2) are rejected at construction.
inline constexpr double kDegenerateArea = 1e-12;

/// Indexed triangle mesh with an optional canonical-pose vertex buffer that
/// shares the face list. Immutable after construction; every constructor
/// path validates indices, face areas and canonical buffer length.
class TriMesh {
public:
    TriMesh() = default;
    TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces,
            std::optional<std::vector<Vec3>> canonical = std::nullopt);

    std::span<const Vec3> vertices() const { return vertices_; }
    std::span<const Face> faces() const { return faces_; }
    bool has_canonical() const { return canonical_.has_value(); }
    std::span<const Vec3> canonical_vertices() const;

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t face_count() const { return faces_.size(); }
    bool empty() const { return faces_.empty(); }

    const Vec3& corner(std::size_t face, int j) const { return vertices_[faces_[face][j]]; }
    std::array<Vec3, 3> triangle(std::size_t face) const {
        const Face& f = faces_[face];
        return {vertices_[f[0]], vertices_[f[1]], vertices_[f[2]]};
    }
    double face_area(std::size_t face) const;
    /// Unit normal following the face winding.
    Vec3 face_normal(std::size_t face) const;

    const Aabb& bounds() const { return bounds_; }
    /// Cached result of is_watertight() computed at construction.
    bool watertight() const { return watertight_; }

    /// Returns a copy whose canonical buffer is `canonical`. Throws when the
    /// canonical mesh's faces differ from this mesh's faces.
    TriMesh with_canonical(const TriMesh& canonical) const;
    /// Applies x -> rotation * x + translation to both posed vertices;
    /// the canonical buffer is left untouched.
    TriMesh transformed(const Mat3& rotation, const Vec3& translation) const;

private:
    std::vector<Vec3> vertices_;
    std::vector<Face> faces_;
    std::optional<std::vector<Vec3>> canonical_;
    Aabb bounds_;
    bool watertight_ = false;
};

/// Edge-manifold closed-surface check: every undirected edge is used by
/// exactly two faces, once in each direction.
bool is_watertight(std::span<const Face> faces);
inline bool is_watertight(const TriMesh& mesh) { return is_watertight(mesh.faces()); }

/// Loads OBJ (v/f records) or PLY (ascii, binary little-endian). Vertex order
/// is preserved; polygons are fan-triangulated.
TriMesh load_mesh(const std::filesystem::path& path);
/// Loads `path` and attaches the vertices of `canonical_path` as the canonical
/// buffer. The two face lists must be identical.
TriMesh load_mesh_pair(const std::filesystem::path& path,
                       const std::filesystem::path& canonical_path);
void save_obj(const TriMesh& mesh, const std::filesystem::path& path);

// Procedural meshes used by tests, benchmarks and the CLI.
TriMesh make_cube(const Vec3& center = Vec3::Zero(), double edge = 1.0);
/// Subdivided icosahedron projected to a sphere: 20 * 4^level faces.
TriMesh make_icosphere(int level, const Vec3& center = Vec3::Zero(), double radius = 1.0);
/// Torus around the z axis with major radius R and tube radius r.
TriMesh make_torus(double major_radius, double minor_radius, int major_segments,
                   int minor_segments);
/// Latitude/longitude sphere with `slices * (stacks - 1) * 2` faces.
TriMesh make_uv_sphere(int slices, int stacks, const Vec3& center = Vec3::Zero(),
                       double radius = 1.0);
/// Moves every vertex radially by a factor in [1 - amplitude, 1 + amplitude].
TriMesh radially_perturbed(const TriMesh& mesh, const Vec3& center, double amplitude,
                           std::uint64_t seed);

}  // namespace bodyfield
