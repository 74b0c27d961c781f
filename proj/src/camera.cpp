#include "bodyfield/camera.hpp"

#include "bodyfield/parallel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace bodyfield {

void Camera::validate() const {
    std::string problems;
    if (!(fx > 0.0) || !(fy > 0.0)) problems += " focal lengths must be positive;";
    if (width <= 0 || height <= 0) problems += " image size must be positive;";
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
        problems += " principal point must lie inside the image;";
    if ((rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
        std::abs(rotation.determinant() - 1.0) > 1e-6)
        problems += " rotation must be orthonormal with determinant +1;";
    if (!translation.allFinite()) problems += " translation must be finite;";
    if (!problems.empty()) throw GeometryError("invalid camera:" + problems);
}

std::optional<Vec2> Camera::project(const Vec3& x) const {
    const Vec3 p = to_camera(x);
    if (!(p.z() > 0.0)) return std::nullopt;
    return Vec2(fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy);
}

std::optional<std::array<int, 2>> Camera::pixel_of(const Vec3& x) const {
    const auto uv = project(x);
    if (!uv) return std::nullopt;
    const double u = std::floor(uv->x()), v = std::floor(uv->y());
    if (u < 0.0 || v < 0.0 || u >= width || v >= height) return std::nullopt;
    return std::array<int, 2>{static_cast<int>(u), static_cast<int>(v)};
}

Ray Camera::ray_through(double u, double v) const {
    const Vec3 local((u - cx) / fx, (v - cy) / fy, 1.0);
    return {center(), (rotation.transpose() * local).normalized()};
}

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double focal,
                       int width, int height) {
    const Vec3 forward = (target - eye).normalized();
    const Vec3 right = forward.cross(up).normalized();
    const Vec3 down = forward.cross(right);
    Camera cam;
    cam.rotation.row(0) = right;
    cam.rotation.row(1) = down;
    cam.rotation.row(2) = forward;
    cam.translation = -cam.rotation * eye;
    cam.fx = cam.fy = focal;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    cam.width = width;
    cam.height = height;
    return cam;
}

// ------------------------------------------------------------ rasterizer

namespace {

constexpr int kTile = 32;

struct ScreenTriangle {
    Vec2 p[3];
    double inv_z[3];
    double area;  // > 0 after orientation fix
    double min_u, max_u, min_v, max_v;
};

double edge(const Vec2& a, const Vec2& b, const Vec2& p) {
    return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

bool top_left(const Vec2& a, const Vec2& b) {
    const double dx = b.x() - a.x(), dy = b.y() - a.y();
    return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

// Clips a camera-space triangle against z >= near; returns 0, 3 or 4 vertices.
int clip_near(const std::array<Vec3, 3>& in, double near, std::array<Vec3, 4>& out) {
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        const Vec3& a = in[i];
        const Vec3& b = in[(i + 1) % 3];
        const bool ina = a.z() >= near, inb = b.z() >= near;
        if (ina) out[n++] = a;
        if (ina != inb) {
            const double s = (near - a.z()) / (b.z() - a.z());
            Vec3 p = a + s * (b - a);
            p.z() = near;
            out[n++] = p;
        }
    }
    return n;
}

}  // namespace

DepthMap rasterize_depth(const TriMesh& mesh, const Camera& camera) {
    camera.validate();
    DepthMap map(camera.width, camera.height);
    const double near = 1e-9 * std::max(1.0, mesh.bounds().diagonal());

    std::vector<ScreenTriangle> tris;
    tris.reserve(mesh.face_count());
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const auto [a, b, c] = mesh.triangle(f);
        const std::array<Vec3, 3> cam = {camera.to_camera(a), camera.to_camera(b), camera.to_camera(c)};
        std::array<Vec3, 4> poly;
        const int n = clip_near(cam, near, poly);
        for (int k = 1; k + 1 < n; ++k) {
            const Vec3* v[3] = {&poly[0], &poly[k], &poly[k + 1]};
            ScreenTriangle t;
            for (int j = 0; j < 3; ++j) {
                t.p[j] = Vec2(camera.fx * v[j]->x() / v[j]->z() + camera.cx,
                              camera.fy * v[j]->y() / v[j]->z() + camera.cy);
                t.inv_z[j] = 1.0 / v[j]->z();
            }
            t.area = edge(t.p[0], t.p[1], t.p[2]);
            if (t.area == 0.0 || !std::isfinite(t.area)) continue;
            if (t.area < 0.0) {
                std::swap(t.p[1], t.p[2]);
                std::swap(t.inv_z[1], t.inv_z[2]);
                t.area = -t.area;
            }
            t.min_u = std::min({t.p[0].x(), t.p[1].x(), t.p[2].x()});
            t.max_u = std::max({t.p[0].x(), t.p[1].x(), t.p[2].x()});
            t.min_v = std::min({t.p[0].y(), t.p[1].y(), t.p[2].y()});
            t.max_v = std::max({t.p[0].y(), t.p[1].y(), t.p[2].y()});
            if (t.max_u < 0.0 || t.max_v < 0.0 || t.min_u > camera.width || t.min_v > camera.height)
                continue;
            tris.push_back(t);
        }
    }

    const int tiles_x = (camera.width + kTile - 1) / kTile;
    const int tiles_y = (camera.height + kTile - 1) / kTile;
    parallel_for(static_cast<std::size_t>(tiles_x) * tiles_y, 1, [&](std::size_t b, std::size_t e) {
        for (std::size_t tile = b; tile < e; ++tile) {
            const int x0 = static_cast<int>(tile % tiles_x) * kTile;
            const int y0 = static_cast<int>(tile / tiles_x) * kTile;
            const int x1 = std::min(camera.width, x0 + kTile);
            const int y1 = std::min(camera.height, y0 + kTile);
            for (const ScreenTriangle& t : tris) {
                // Pixel centers i + 0.5 inside [min_u, max_u].
                const int i0 = std::max(x0, static_cast<int>(std::ceil(t.min_u - 0.5)));
                const int i1 = std::min(x1 - 1, static_cast<int>(std::floor(t.max_u - 0.5)));
                const int j0 = std::max(y0, static_cast<int>(std::ceil(t.min_v - 0.5)));
                const int j1 = std::min(y1 - 1, static_cast<int>(std::floor(t.max_v - 0.5)));
                if (i0 > i1 || j0 > j1) continue;
                const bool tl0 = top_left(t.p[1], t.p[2]);
                const bool tl1 = top_left(t.p[2], t.p[0]);
                const bool tl2 = top_left(t.p[0], t.p[1]);
                for (int j = j0; j <= j1; ++j)
                    for (int i = i0; i <= i1; ++i) {
                        const Vec2 p(i + 0.5, j + 0.5);
                        const double w0 = edge(t.p[1], t.p[2], p);
                        const double w1 = edge(t.p[2], t.p[0], p);
                        const double w2 = edge(t.p[0], t.p[1], p);
                        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
                        if ((w0 == 0.0 && !tl0) || (w1 == 0.0 && !tl1) || (w2 == 0.0 && !tl2)) continue;
                        const double inv_z =
                            (w0 * t.inv_z[0] + w1 * t.inv_z[1] + w2 * t.inv_z[2]) / t.area;
                        const double z = 1.0 / inv_z;
                        double& slot = map.at(i, j);
                        if (z < slot) slot = z;
                    }
            }
        }
    });
    return map;
}

// ------------------------------------------------------------ DPTH files

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* p) {
    return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_dpth(const std::filesystem::path& path, int width, int height,
                const std::vector<double>& values) {
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw Error("DPTH layer size does not match its dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write("DPTH", 4);
    put_u32(out, static_cast<std::uint32_t>(width));
    put_u32(out, static_cast<std::uint32_t>(height));
    put_u32(out, 0);
    for (double v : values) {
        const float f = std::isfinite(v) ? static_cast<float>(v) : 0.0f;
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(out, bits);
    }
    if (!out) throw Error("failed writing " + path.string());
}

void write_depth_map(const std::filesystem::path& path, const DepthMap& map) {
    write_dpth(path, map.width, map.height, map.depth);
}

DepthMap read_depth_map(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open depth file " + path.string());
    unsigned char header[16];
    if (!in.read(reinterpret_cast<char*>(header), 16) || std::memcmp(header, "DPTH", 4) != 0)
        throw ParseError(path.string() + ": not a DPTH file");
    const auto w = get_u32(header + 4), h = get_u32(header + 8);
    DepthMap map(static_cast<int>(w), static_cast<int>(h));
    std::vector<unsigned char> body(static_cast<std::size_t>(w) * h * 4);
    if (!in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size())))
        throw ParseError(path.string() + ": truncated DPTH payload");
    for (std::size_t i = 0; i < map.depth.size(); ++i) {
        const std::uint32_t bits = get_u32(body.data() + 4 * i);
        float f;
        std::memcpy(&f, &bits, 4);
        map.depth[i] = f > 0.0f ? static_cast<double>(f) : kInf;
    }
    return map;
}

}  // namespace bodyfield
