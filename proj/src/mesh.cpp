#include "bodyfield/mesh.hpp"

#include "bodyfield/rng.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

namespace bodyfield {

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces,
                 std::optional<std::vector<Vec3>> canonical)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), canonical_(std::move(canonical)) {
    const auto n = static_cast<std::uint32_t>(vertices_.size());
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        for (std::uint32_t idx : faces_[f]) {
            if (idx >= n) {
                std::ostringstream msg;
                msg << "face " << f << " references vertex " << idx << " but the mesh has " << n
                    << " vertices";
                throw GeometryError(msg.str());
            }
        }
    }
    if (canonical_ && canonical_->size() != vertices_.size()) {
        throw GeometryError("canonical vertex count " + std::to_string(canonical_->size()) +
                            " does not match posed vertex count " +
                            std::to_string(vertices_.size()));
    }

    std::vector<std::size_t> degenerate;
    for (std::size_t f = 0; f < faces_.size(); ++f)
        if (!(face_area(f) >= kDegenerateArea)) degenerate.push_back(f);
    if (!degenerate.empty()) {
        std::ostringstream msg;
        msg << degenerate.size() << " degenerate face(s) with area < " << kDegenerateArea << ":";
        for (std::size_t i = 0; i < degenerate.size() && i < 32; ++i) msg << ' ' << degenerate[i];
        if (degenerate.size() > 32) msg << " ...";
        throw GeometryError(msg.str());
    }

    for (const Vec3& v : vertices_) bounds_.extend(v);
    watertight_ = is_watertight(faces_);
}

std::span<const Vec3> TriMesh::canonical_vertices() const {
    if (!canonical_) throw GeometryError("mesh has no canonical vertices");
    return *canonical_;
}

double TriMesh::face_area(std::size_t face) const {
    const auto [a, b, c] = triangle(face);
    return 0.5 * (b - a).cross(c - a).norm();
}

Vec3 TriMesh::face_normal(std::size_t face) const {
    const auto [a, b, c] = triangle(face);
    return (b - a).cross(c - a).normalized();
}

TriMesh TriMesh::with_canonical(const TriMesh& canonical) const {
    if (canonical.faces_ != faces_) {
        std::size_t first = 0;
        while (first < faces_.size() && first < canonical.faces_.size() &&
               faces_[first] == canonical.faces_[first])
            ++first;
        throw GeometryError("canonical mesh topology differs from posed mesh (first mismatch at face " +
                            std::to_string(first) + ")");
    }
    return TriMesh(vertices_, faces_, std::vector<Vec3>(canonical.vertices_));
}

TriMesh TriMesh::transformed(const Mat3& rotation, const Vec3& translation) const {
    std::vector<Vec3> moved;
    moved.reserve(vertices_.size());
    for (const Vec3& v : vertices_) moved.push_back(rotation * v + translation);
    return TriMesh(std::move(moved), faces_, canonical_);
}

bool is_watertight(std::span<const Face> faces) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(faces.size() * 3);
    for (const Face& f : faces)
        for (int j = 0; j < 3; ++j) edges.emplace_back(f[j], f[(j + 1) % 3]);
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) return false;
    for (const auto& [a, b] : edges)
        if (!std::binary_search(edges.begin(), edges.end(), std::make_pair(b, a))) return false;
    return true;
}

TriMesh make_cube(const Vec3& center, double edge) {
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i)
        v.push_back(center + edge * Vec3((i & 1) ? 0.5 : -0.5, (i & 2) ? 0.5 : -0.5,
                                         (i & 4) ? 0.5 : -0.5));
    std::vector<Face> f = {{0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}, {0, 1, 5}, {0, 5, 4},
                           {2, 6, 7}, {2, 7, 3}, {0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}};
    return TriMesh(std::move(v), std::move(f));
}

TriMesh make_icosphere(int level, const Vec3& center, double radius) {
    const double t = std::numbers::phi;
    std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                           {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                           {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (Vec3& p : v) p.normalize();
    std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
        auto mid = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            v.push_back((0.5 * (v[a] + v[b])).normalized());
            const auto idx = static_cast<std::uint32_t>(v.size() - 1);
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<Face> next;
        next.reserve(f.size() * 4);
        for (const Face& tri : f) {
            const std::uint32_t ab = mid(tri[0], tri[1]);
            const std::uint32_t bc = mid(tri[1], tri[2]);
            const std::uint32_t ca = mid(tri[2], tri[0]);
            next.push_back({tri[0], ab, ca});
            next.push_back({tri[1], bc, ab});
            next.push_back({tri[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    for (Vec3& p : v) p = center + radius * p;
    return TriMesh(std::move(v), std::move(f));
}

TriMesh make_torus(double major_radius, double minor_radius, int major_segments,
                   int minor_segments) {
    if (major_segments < 3 || minor_segments < 3)
        throw GeometryError("torus needs at least 3 segments per direction");
    std::vector<Vec3> v;
    v.reserve(static_cast<std::size_t>(major_segments) * minor_segments);
    for (int i = 0; i < major_segments; ++i) {
        const double u = 2.0 * std::numbers::pi * i / major_segments;
        for (int j = 0; j < minor_segments; ++j) {
            const double w = 2.0 * std::numbers::pi * j / minor_segments;
            const double ring = major_radius + minor_radius * std::cos(w);
            v.emplace_back(ring * std::cos(u), ring * std::sin(u), minor_radius * std::sin(w));
        }
    }
    auto index = [&](int i, int j) {
        return static_cast<std::uint32_t>((i % major_segments) * minor_segments + (j % minor_segments));
    };
    std::vector<Face> f;
    f.reserve(v.size() * 2);
    for (int i = 0; i < major_segments; ++i)
        for (int j = 0; j < minor_segments; ++j) {
            const auto a = index(i, j), b = index(i + 1, j), c = index(i + 1, j + 1), d = index(i, j + 1);
            f.push_back({a, b, c});
            f.push_back({a, c, d});
        }
    return TriMesh(std::move(v), std::move(f));
}

TriMesh make_uv_sphere(int slices, int stacks, const Vec3& center, double radius) {
    if (slices < 3 || stacks < 2) throw GeometryError("uv sphere needs slices >= 3 and stacks >= 2");
    std::vector<Vec3> v;
    v.push_back(center + radius * Vec3::UnitZ());
    for (int i = 1; i < stacks; ++i) {
        const double theta = std::numbers::pi * i / stacks;
        for (int k = 0; k < slices; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / slices;
            v.push_back(center + radius * Vec3(std::sin(theta) * std::cos(phi),
                                               std::sin(theta) * std::sin(phi), std::cos(theta)));
        }
    }
    v.push_back(center - radius * Vec3::UnitZ());
    const auto bottom = static_cast<std::uint32_t>(v.size() - 1);
    auto ring = [&](int i, int k) { return static_cast<std::uint32_t>(1 + i * slices + (k % slices)); };

    std::vector<Face> f;
    for (int k = 0; k < slices; ++k) f.push_back({0, ring(0, k), ring(0, k + 1)});
    for (int i = 0; i + 1 < stacks - 1; ++i)
        for (int k = 0; k < slices; ++k) {
            f.push_back({ring(i, k), ring(i + 1, k), ring(i + 1, k + 1)});
            f.push_back({ring(i, k), ring(i + 1, k + 1), ring(i, k + 1)});
        }
    for (int k = 0; k < slices; ++k) f.push_back({ring(stacks - 2, k), bottom, ring(stacks - 2, k + 1)});
    return TriMesh(std::move(v), std::move(f));
}

TriMesh radially_perturbed(const TriMesh& mesh, const Vec3& center, double amplitude,
                           std::uint64_t seed) {
    const CounterRng rng(seed);
    std::vector<Vec3> v(mesh.vertices().begin(), mesh.vertices().end());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double factor = 1.0 + amplitude * (2.0 * rng.uniform(0, i) - 1.0);
        v[i] = center + factor * (v[i] - center);
    }
    return TriMesh(std::move(v), std::vector<Face>(mesh.faces().begin(), mesh.faces().end()));
}

}  // namespace bodyfield
