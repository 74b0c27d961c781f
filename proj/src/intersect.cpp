#include "bodyfield/intersect.hpp"

#include <cmath>

namespace bodyfield {

namespace {

constexpr double kEdgeTolerance = 1e-9;

void check_unit(const Vec3& d) {
    if (std::abs(d.norm() - 1.0) > 1e-9) throw GeometryError("ray direction must be unit length");
}

void finish(RayCast& cast) {
    std::sort(cast.hits.begin(), cast.hits.end(), [](const RayHit& a, const RayHit& b) {
        return a.t < b.t || (a.t == b.t && a.face < b.face);
    });
}

void test_face(const TriMesh& mesh, const Ray& ray, std::uint32_t f, RayCast& cast) {
    const Face& face = mesh.faces()[f];
    const auto& v = mesh.vertices();
    if (auto hit = intersect_triangle(ray, v[face[0]], v[face[1]], v[face[2]])) {
        cast.hits.push_back({hit->t, f, hit->barycentric, hit->near_degenerate});
        cast.degenerate = cast.degenerate || hit->near_degenerate;
    }
}

// Collapses coincident edge/vertex hits reported by adjacent faces.
std::vector<RayHit> merge_shared(std::vector<RayHit> hits) {
    std::vector<RayHit> out;
    for (const RayHit& h : hits) {
        if (!out.empty() && h.near_edge) {
            bool merged = false;
            for (auto it = out.rbegin(); it != out.rend() && std::abs(it->t - h.t) <= 1e-9 * std::max(1.0, h.t); ++it) {
                if (it->near_edge) {
                    if (h.face < it->face) *it = h;
                    merged = true;
                    break;
                }
            }
            if (merged) continue;
        }
        out.push_back(h);
    }
    return out;
}

}  // namespace

std::optional<TriangleHit> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                              const Vec3& c) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 p = ray.direction.cross(e2);
    const double det = e1.dot(p);
    if (det == 0.0) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = ray.origin - a;
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 q = s.cross(e1);
    const double v = ray.direction.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = e2.dot(q) * inv;
    if (!(t > 0.0)) return std::nullopt;

    TriangleHit hit;
    hit.t = t;
    hit.barycentric = Vec3(1.0 - u - v, u, v);
    const double grazing = std::abs(det) / (e1.norm() * e2.norm());
    hit.near_degenerate = hit.barycentric.minCoeff() < kEdgeTolerance || grazing < 1e-12;
    return hit;
}

RayCast cast_ray(const TriMesh& mesh, const VoxelGrid& grid, const Ray& ray) {
    RayCast cast;
    std::vector<std::uint32_t> candidates;
    grid.traverse(ray, 0.0, kInf, [&](std::size_t cell) {
        const auto faces = grid.faces_in(cell);
        candidates.insert(candidates.end(), faces.begin(), faces.end());
    });
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (std::uint32_t f : candidates) test_face(mesh, ray, f, cast);
    finish(cast);
    return cast;
}

RayCast cast_ray_brute(const TriMesh& mesh, const Ray& ray) {
    RayCast cast;
    const auto n = static_cast<std::uint32_t>(mesh.face_count());
    for (std::uint32_t f = 0; f < n; ++f) test_face(mesh, ray, f, cast);
    finish(cast);
    return cast;
}

std::vector<RayHit> intersect_ray(const TriMesh& mesh, const VoxelGrid& grid, const Vec3& origin,
                                  const Vec3& direction) {
    check_unit(direction);
    return merge_shared(cast_ray(mesh, grid, {origin, direction}).hits);
}

std::vector<RayHit> intersect_ray_brute(const TriMesh& mesh, const Vec3& origin,
                                        const Vec3& direction) {
    check_unit(direction);
    return merge_shared(cast_ray_brute(mesh, {origin, direction}).hits);
}

}  // namespace bodyfield
