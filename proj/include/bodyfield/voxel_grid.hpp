#pragma once

#include "bodyfield/mesh.hpp"

#include <array>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <vector>

namespace bodyfield {

using VoxelIndex = std::array<int, 3>;

/// Uniform grid over a mesh. Each voxel stores the faces whose triangle
/// overlaps the (slightly inflated) closed voxel box, so no face is ever
/// missed by a voxel that touches it. The grid keeps a one-cell empty margin
/// around the mesh bounding box.
class VoxelGrid {
public:
    VoxelGrid() = default;

    const Vec3& origin() const { return origin_; }
    double cell_size() const { return cell_; }
    const VoxelIndex& dims() const { return dims_; }
    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
    }
    std::size_t face_count() const { return face_count_; }
    Aabb bounds() const {
        return {origin_, origin_ + cell_ * Vec3(dims_[0], dims_[1], dims_[2])};
    }

    bool inside(const VoxelIndex& v) const {
        return v[0] >= 0 && v[1] >= 0 && v[2] >= 0 && v[0] < dims_[0] && v[1] < dims_[1] &&
               v[2] < dims_[2];
    }
    std::size_t linear(const VoxelIndex& v) const {
        return (static_cast<std::size_t>(v[2]) * dims_[1] + v[1]) * dims_[0] + v[0];
    }
    /// floor((p - origin) / cell_size), unclamped.
    VoxelIndex voxel_of(const Vec3& p) const;
    VoxelIndex clamp(const VoxelIndex& v) const;
    Aabb voxel_box(const VoxelIndex& v) const;

    /// Faces listed for the voxel (P(V_i)).
    std::span<const std::uint32_t> faces_in(std::size_t linear_index) const {
        return {faces_.data() + offsets_[linear_index],
                faces_.data() + offsets_[linear_index + 1]};
    }
    std::span<const std::uint32_t> faces_in(const VoxelIndex& v) const { return faces_in(linear(v)); }
    /// Chebyshev distance (in cells) from the voxel to the nearest non-empty voxel.
    int empty_radius(const VoxelIndex& v) const { return empty_radius_[linear(v)]; }

    /// Calls visit(linear_index) for every voxel the ray passes through with
    /// t in [t_min, t_max], in order of entry (3D DDA).
    void traverse(const Ray& ray, double t_min, double t_max,
                  const std::function<void(std::size_t)>& visit) const;

    friend VoxelGrid build_grid(const TriMesh& mesh, int resolution);

private:
    Vec3 origin_ = Vec3::Zero();
    double cell_ = 1.0;
    VoxelIndex dims_{0, 0, 0};
    std::size_t face_count_ = 0;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> faces_;
    std::vector<std::int32_t> empty_radius_;
};

inline constexpr int kDefaultGridResolution = 64;

/// Builds the grid with `resolution` cells across the longest bbox axis
/// (plus the one-cell margin on each side). Throws for empty meshes or
/// resolution < 2.
VoxelGrid build_grid(const TriMesh& mesh, int resolution = kDefaultGridResolution);

/// Separating-axis triangle / axis-aligned box overlap (13 axes).
bool triangle_box_overlap(const Vec3& box_center, const Vec3& half_size, const Vec3& a,
                          const Vec3& b, const Vec3& c);

struct ShellVoxel {
    VoxelIndex voxel{0, 0, 0};
    std::size_t linear = 0;
    double lower_bound = 0.0;
};

/// Enumerates the non-empty voxels of a grid ring by ring (Chebyshev rings
/// around a seed voxel) and yields them in nondecreasing lower-bound order.
///
/// With a seed voxel only, the lower bound is the box-to-box gap between the
/// seed voxel and the yielded voxel. With a query point, it is the exact
/// distance from the point to the yielded voxel box; the seed is then the
/// voxel containing the point (clamped into the grid).
class ShellIterator {
public:
    ShellIterator(const VoxelGrid& grid, const VoxelIndex& seed);
    ShellIterator(const VoxelGrid& grid, const Vec3& query);

    std::optional<ShellVoxel> next();
    /// Lower bound of the next voxel next() would yield, or +inf when exhausted.
    double peek_lower_bound();
    /// Voxels whose lower bound exceeds the cutoff may be skipped from now on.
    /// The cutoff only ever decreases.
    void set_cutoff(double cutoff) { cutoff_ = std::min(cutoff_, cutoff); }
    /// Closest-point mode: every non-empty voxel seen lowers the cutoff to the
    /// farthest corner of its box, which bounds the distance to its faces.
    void enable_far_corner_cutoff() { far_corner_cutoff_ = true; }

private:
    struct Entry {
        double lower_bound;
        std::size_t linear;
        VoxelIndex voxel;
        bool operator>(const Entry& o) const {
            return lower_bound > o.lower_bound ||
                   (lower_bound == o.lower_bound && linear > o.linear);
        }
    };

    void fill();
    void push_ring(int ring);
    double bound_of(const VoxelIndex& v) const;

    const VoxelGrid* grid_;
    VoxelIndex seed_;
    std::optional<Vec3> query_;
    double seed_offset_ = 0.0;  // distance from the query to the seed voxel box
    int next_ring_ = 0;
    int max_ring_ = 0;
    double cutoff_ = kInf;
    bool far_corner_cutoff_ = false;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap_;
};

struct ClosestHit {
    std::uint32_t face = 0;
    Vec3 barycentric = Vec3::Zero();
    Vec3 point = Vec3::Zero();
    double squared_distance = kInf;
    int active_set_size = 0;

    double distance() const { return std::sqrt(squared_distance); }
};

/// Exact global closest point over all faces; ties go to the lowest face index.
ClosestHit brute_closest_point(const TriMesh& mesh, const Vec3& x);

/// Grid-accelerated closest point. Shell expansion stops once the next
/// voxel's lower bound strictly exceeds the best distance found, so the
/// answer (including the lowest-index tie rule) equals brute_closest_point.
ClosestHit accel_closest_point(const VoxelGrid& grid, const TriMesh& mesh, const Vec3& x);

std::vector<ClosestHit> brute_closest_points(const TriMesh& mesh, std::span<const Vec3> points);
std::vector<ClosestHit> accel_closest_points(const VoxelGrid& grid, const TriMesh& mesh,
                                             std::span<const Vec3> points);

}  // namespace bodyfield
