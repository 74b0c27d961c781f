#pragma once

#include "bodyfield/mesh.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <vector>

namespace bodyfield {

/// Pinhole camera. `rotation`/`translation` map world to camera coordinates
/// (x right, y down, z forward). Pixel (i, j) covers [i, i+1) x [j, j+1) in
/// image coordinates, so its center is at (i + 0.5, j + 0.5).
struct Camera {
    double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    int width = 1, height = 1;

    /// Throws GeometryError when the intrinsics or rotation are invalid.
    void validate() const;

    Vec3 to_camera(const Vec3& x) const { return rotation * x + translation; }
    Vec3 center() const { return -rotation.transpose() * translation; }
    /// Image coordinates of x, or nullopt when x is not in front of the camera.
    std::optional<Vec2> project(const Vec3& x) const;
    /// Pixel containing the projection of x, or nullopt when outside the image.
    std::optional<std::array<int, 2>> pixel_of(const Vec3& x) const;
    /// Unit world-space ray through continuous image coordinates (u, v).
    Ray ray_through(double u, double v) const;
    Ray pixel_ray(int i, int j) const { return ray_through(i + 0.5, j + 0.5); }

    static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double focal,
                          int width, int height);
};

/// Per-pixel view-space depth; +inf marks pixels with no surface.
struct DepthMap {
    int width = 0, height = 0;
    std::vector<double> depth;

    DepthMap() = default;
    DepthMap(int w, int h) : width(w), height(h), depth(static_cast<std::size_t>(w) * h, kInf) {}

    double at(int i, int j) const { return depth[static_cast<std::size_t>(j) * width + i]; }
    double& at(int i, int j) { return depth[static_cast<std::size_t>(j) * width + i]; }
    bool covered(int i, int j) const { return std::isfinite(at(i, j)); }
};

/// Z-buffer rasterization with perspective-correct depth, top-left fill rule
/// at pixel centers and no back-face culling. Triangles are clipped against a
/// near plane at z = 1e-9 * scene scale. Tiles are rasterized independently.
DepthMap rasterize_depth(const TriMesh& mesh, const Camera& camera);

/// Float layer file: "DPTH", u32 width, u32 height, u32 reserved, then
/// row-major little-endian float32. Non-finite values are written as 0.
void write_dpth(const std::filesystem::path& path, int width, int height,
                const std::vector<double>& values);
void write_depth_map(const std::filesystem::path& path, const DepthMap& map);
/// Reads a DPTH file; zeros become the +inf sentinel.
DepthMap read_depth_map(const std::filesystem::path& path);

}  // namespace bodyfield
