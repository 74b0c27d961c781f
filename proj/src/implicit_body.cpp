#include "bodyfield/implicit_body.hpp"

#include "bodyfield/intersect.hpp"
#include "bodyfield/parallel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace bodyfield {

namespace {

// Generic directions so axis-aligned geometry rarely produces grazing hits.
const Vec3 kParityDirection = Vec3(0.8372, 0.4419, 0.3221).normalized();
const Vec3 kTieBreakAxis = Vec3(-0.3137, 0.2411, 0.9184).normalized();
constexpr int kTieAttempts = 3;

void require_watertight(const TriMesh& mesh) {
    if (!mesh.watertight())
        throw GeometryError("inside/outside test requires a watertight mesh");
}

int parity_sign(const Vec3& x, const TriMesh& mesh, const VoxelGrid& grid) {
    const double eps = 1e-9 * mesh.bounds().diagonal();
    RayCast cast = cast_ray(mesh, grid, {x, kParityDirection});
    for (int k = 1; k <= kTieAttempts && cast.degenerate; ++k)
        cast = cast_ray(mesh, grid, {x + (k * eps) * kTieBreakAxis, kParityDirection});
    return cast.hits.size() % 2 == 1 ? 1 : -1;
}

}  // namespace

SignQuery sign_query(const Vec3& x, const TriMesh& mesh, const VoxelGrid& grid) {
    require_watertight(mesh);
    if (accel_closest_point(grid, mesh, x).distance() <= kSurfaceEpsilon) return {-1, true};
    return {parity_sign(x, mesh, grid), false};
}

double sdf(const Vec3& x, const TriMesh& mesh, const VoxelGrid& grid) {
    require_watertight(mesh);
    const double d = accel_closest_point(grid, mesh, x).distance();
    if (d <= kSurfaceEpsilon) return 0.0;
    return parity_sign(x, mesh, grid) * d;
}

Vec3 sdf_gradient(const Vec3& x, const TriMesh& mesh, const VoxelGrid& grid) {
    require_watertight(mesh);
    const ClosestHit hit = accel_closest_point(grid, mesh, x);
    const double d = hit.distance();
    if (d <= kSurfaceEpsilon) throw GeometryError("signed distance gradient is undefined on the surface");
    return parity_sign(x, mesh, grid) * (x - hit.point) / d;
}

Vec3 canonical_correspondence(std::uint32_t face, const Vec3& barycentric, const TriMesh& mesh) {
    const auto canon = mesh.canonical_vertices();
    if (face >= mesh.face_count()) throw GeometryError("face index out of range");
    const Face& f = mesh.faces()[face];
    return barycentric[0] * canon[f[0]] + barycentric[1] * canon[f[1]] + barycentric[2] * canon[f[2]];
}

BodyEmbedding body_embedding(const Vec3& x, const TriMesh& mesh, const VoxelGrid& grid) {
    require_watertight(mesh);
    if (!mesh.has_canonical()) throw GeometryError("body embedding requires canonical vertices");
    const ClosestHit hit = accel_closest_point(grid, mesh, x);
    BodyEmbedding e;
    e.face = hit.face;
    e.barycentric = hit.barycentric;
    e.canonical_point = canonical_correspondence(hit.face, hit.barycentric, mesh);
    const double d = hit.distance();
    if (d > kSurfaceEpsilon) {
        const int s = parity_sign(x, mesh, grid);
        e.sdf = s * d;
        e.grad = s * (x - hit.point) / d;
    }
    return e;
}

std::vector<BodyEmbedding> body_embeddings(std::span<const Vec3> points, const TriMesh& mesh,
                                           const VoxelGrid& grid) {
    std::vector<BodyEmbedding> out(points.size());
    parallel_for(points.size(), 256, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = body_embedding(points[i], mesh, grid);
    });
    return out;
}

NormalizedFrame normalize_frame(const TriMesh& mesh, const Mat3& global_rotation) {
    if (mesh.vertex_count() == 0) throw GeometryError("cannot normalize an empty mesh");
    if ((global_rotation * global_rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
        std::abs(global_rotation.determinant() - 1.0) > 1e-6)
        throw GeometryError("global rotation must be orthonormal with determinant +1");

    NormalizedFrame frame;
    frame.rotation = global_rotation.transpose();
    Aabb box;
    for (const Vec3& v : mesh.vertices()) box.extend(frame.rotation * v);
    const double half = 0.5 * box.extent().maxCoeff();
    frame.center = frame.rotation.transpose() * box.center();
    // The slight shrink keeps the maximum corner strictly below +1.
    frame.scale = half > 0.0 ? (1.0 - 1e-9) / half : 1.0;
    return frame;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                       static_cast<char>(v >> 24)};
    out.write(b, 4);
}

std::uint32_t get_u32(const unsigned char* p) {
    return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

}  // namespace

void write_sdf3(const std::filesystem::path& path, int nx, int ny, int nz, const std::vector<double>& values) {
    if (nx < 1 || ny < 1 || nz < 1 || values.size() != static_cast<std::size_t>(nx) * ny * nz)
        throw Error("SDF3 volume size does not match its dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write("SDF3", 4);
    put_u32(out, static_cast<std::uint32_t>(nx));
    put_u32(out, static_cast<std::uint32_t>(ny));
    put_u32(out, static_cast<std::uint32_t>(nz));
    for (double v : values) {
        const float f = std::isfinite(v) ? static_cast<float>(v) : 0.0f;
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(out, bits);
    }
    if (!out) throw Error("failed writing " + path.string());
}

ScalarVolume read_sdf3(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open volume file " + path.string());
    unsigned char header[16];
    if (!in.read(reinterpret_cast<char*>(header), 16) || std::memcmp(header, "SDF3", 4) != 0)
        throw ParseError(path.string() + ": not an SDF3 file");
    ScalarVolume v;
    v.nx = static_cast<int>(get_u32(header + 4));
    v.ny = static_cast<int>(get_u32(header + 8));
    v.nz = static_cast<int>(get_u32(header + 12));
    const std::size_t n = static_cast<std::size_t>(v.nx) * v.ny * v.nz;
    std::vector<unsigned char> body(4 * n);
    if (!in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size())))
        throw ParseError(path.string() + ": truncated SDF3 payload");
    v.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t bits = get_u32(body.data() + 4 * i);
        std::memcpy(&v.values[i], &bits, 4);
    }
    return v;
}

}  // namespace bodyfield
