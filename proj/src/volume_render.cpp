#include "bodyfield/volume_render.hpp"

#include "bodyfield/parallel.hpp"

#include <chrono>
#include <cmath>
#include <mutex>
#include <unordered_map>

namespace bodyfield {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr int kTile = 32;

}  // namespace

FieldSample Field::make_sample(double sigma, const Vec3& color) {
    FieldSample s;
    s.sigma = std::max(sigma, 0.0);
    s.color = color.cwiseMax(0.0).cwiseMin(1.0);
    s.feature = {s.color.x(), s.color.y(), s.color.z(), occupancy(s.sigma)};
    return s;
}

UniformBall::UniformBall(const Vec3& center, double radius, double sigma0, const Vec3& color)
    : center_(center), radius_(radius), sigma0_(sigma0), color_(color) {
    if (!(radius > 0.0) || !(sigma0 >= 0.0)) throw GeometryError("uniform_ball needs radius > 0 and sigma >= 0");
}

FieldSample UniformBall::eval(const Vec3& x, const Vec3&) const {
    if ((x - center_).squaredNorm() <= radius_ * radius_) return make_sample(sigma0_, color_);
    return {};
}

Aabb UniformBall::bounds() const {
    return {center_ - Vec3::Constant(radius_), center_ + Vec3::Constant(radius_)};
}

GaussianBlob::GaussianBlob(const Vec3& center, double s, double sigma0, const Vec3& color)
    : center_(center), s_(s), sigma0_(sigma0), color_(color) {
    if (!(s > 0.0) || !(sigma0 >= 0.0)) throw GeometryError("gaussian_blob needs s > 0 and sigma >= 0");
}

FieldSample GaussianBlob::eval(const Vec3& x, const Vec3&) const {
    return make_sample(sigma0_ * std::exp(-(x - center_).squaredNorm() / (2.0 * s_ * s_)), color_);
}

Aabb GaussianBlob::bounds() const {
    return {center_ - Vec3::Constant(6.0 * s_), center_ + Vec3::Constant(6.0 * s_)};
}

MeshShell::MeshShell(const TriMesh& mesh, const VoxelGrid& grid, double width, double sigma0,
                     const Vec3& color)
    : mesh_(&mesh), grid_(&grid), width_(width), sigma0_(sigma0), color_(color) {
    if (!(width > 0.0) || !(sigma0 >= 0.0)) throw GeometryError("mesh_shell needs width > 0 and sigma >= 0");
}

FieldSample MeshShell::eval(const Vec3& x, const Vec3&) const {
    if (mesh_->bounds().distance(x) >= width_) return {};
    const ClosestHit hit = accel_closest_point(*grid_, *mesh_, x);
    if (hit.squared_distance < width_ * width_) return make_sample(sigma0_, color_);
    return {};
}

Aabb MeshShell::bounds() const { return mesh_->bounds().padded(width_); }

RayIntegral integrate_ray(std::span<const double> t, double t_far, std::span<const double> sigma,
                          std::span<const Vec3> color, std::span<const SampleFlag> flags) {
    const std::size_t n = t.size();
    if (sigma.size() != n || color.size() != n || (!flags.empty() && flags.size() != n))
        throw GeometryError("sample arrays must have equal length");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(t[i] < t[i + 1])) throw GeometryError("sample depths must be strictly increasing");
    if (n > 0 && !(t[n - 1] <= t_far)) throw GeometryError("sample depth beyond t_far");

    RayIntegral out;
    double T = 1.0, weighted_depth = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!flags.empty() && flags[i] != SampleFlag::Valid) continue;
        const double delta = (i + 1 < n ? t[i + 1] : t_far) - t[i];
        const double a = -std::expm1(-sigma[i] * delta);
        const double w = T * a;
        out.color += w * color[i];
        out.alpha += w;
        weighted_depth += w * t[i];
        T *= 1.0 - a;
    }
    // Round-off can push the weight sum a few ulps past 1.
    out.alpha = std::min(out.alpha, 1.0);
    out.color = out.color.cwiseMin(out.alpha);
    out.transmittance = T;
    out.depth = out.alpha > 0.0 ? weighted_depth / out.alpha : 0.0;
    return out;
}

RenderOutput render_image(const Camera& camera, const Field& field, const Aabb& scene_box,
                          const VisualHull* hull, const SamplerConfig& config,
                          const SampleShader* shader) {
    camera.validate();
    if (config.samples < 2) throw GeometryError("at least two samples per ray are required");
    const int w = camera.width, h = camera.height;
    RenderOutput out;
    out.width = w;
    out.height = h;
    out.color = Image(w, h);
    out.color0 = Image(w, h);
    out.alpha.assign(static_cast<std::size_t>(w) * h, 0.0);
    out.depth.assign(out.alpha.size(), 0.0);

    const int tiles_x = (w + kTile - 1) / kTile, tiles_y = (h + kTile - 1) / kTile;
    std::mutex stats_mutex;
    parallel_for(static_cast<std::size_t>(tiles_x) * tiles_y, 1, [&](std::size_t begin, std::size_t end) {
        RenderTimings local;
        std::size_t total = 0, valid = 0;
        std::vector<double> sigma;
        std::vector<Vec3> c0, c;
        for (std::size_t tile = begin; tile < end; ++tile) {
            const int tx = static_cast<int>(tile % tiles_x), ty = static_cast<int>(tile / tiles_x);
            for (int j = ty * kTile; j < std::min(h, (ty + 1) * kTile); ++j)
                for (int i = tx * kTile; i < std::min(w, (tx + 1) * kTile); ++i) {
                    const std::size_t p = static_cast<std::size_t>(j) * w + i;
                    auto start = Clock::now();
                    const Ray ray = camera.pixel_ray(i, j);
                    auto interval = ray_box(ray, scene_box);
                    if (interval && hull && !hull->empty())
                        interval = hull_interval(ray, *interval, *hull, config.hull_probes);
                    if (!interval) {
                        local.sampling += seconds_since(start);
                        continue;
                    }
                    const RaySamples rs = sample_ray(ray, *interval, config.samples, config.seed, p, hull);
                    local.sampling += seconds_since(start);
                    total += rs.t.size();
                    valid += rs.valid_count();

                    start = Clock::now();
                    const std::size_t n = rs.t.size();
                    sigma.assign(n, 0.0);
                    c0.assign(n, Vec3::Zero());
                    std::vector<FieldSample> fs(n);
                    for (std::size_t k = 0; k < n; ++k) {
                        if (rs.flags[k] != SampleFlag::Valid) continue;
                        fs[k] = field.eval(ray.at(rs.t[k]), ray.direction);
                        sigma[k] = fs[k].sigma;
                        c0[k] = fs[k].color;
                    }
                    local.field += seconds_since(start);

                    if (shader) {
                        start = Clock::now();
                        c.assign(n, Vec3::Zero());
                        for (std::size_t k = 0; k < n; ++k)
                            if (sigma[k] > 0.0) c[k] = shader->shade(ray.at(rs.t[k]), ray.direction, fs[k]);
                        local.blend += seconds_since(start);
                    }

                    start = Clock::now();
                    const RayIntegral base = integrate_ray(rs.t, interval->t_far, sigma, c0, rs.flags);
                    out.color0.pixels[p] = base.color;
                    out.color.pixels[p] =
                        shader ? integrate_ray(rs.t, interval->t_far, sigma, c, rs.flags).color : base.color;
                    out.alpha[p] = base.alpha;
                    out.depth[p] = base.depth;
                    local.integration += seconds_since(start);
                }
        }
        std::lock_guard lock(stats_mutex);
        out.timings.sampling += local.sampling;
        out.timings.field += local.field;
        out.timings.blend += local.blend;
        out.timings.integration += local.integration;
        out.samples_total += total;
        out.samples_valid += valid;
    });
    return out;
}

Image unpremultiply(const Image& color, const std::vector<double>& alpha) {
    Image out(color.width, color.height);
    for (std::size_t i = 0; i < color.pixels.size(); ++i)
        out.pixels[i] = alpha[i] > 0.0 ? Vec3((color.pixels[i] / alpha[i]).cwiseMin(1.0)) : Vec3::Zero();
    return out;
}

Isosurface extract_isosurface(const Field& field, const Aabb& box, int resolution, double threshold) {
    if (resolution < 8) throw GeometryError("isosurface resolution must be >= 8");
    if (box.empty()) throw GeometryError("isosurface box is empty");
    Isosurface iso;
    const double cell = box.extent().maxCoeff() / resolution;
    iso.cell_size = cell;
    std::array<int, 3> n{};  // lattice points per axis
    for (int k = 0; k < 3; ++k) n[k] = std::max(2, static_cast<int>(std::ceil(box.extent()[k] / cell - 1e-9)) + 1);
    const auto index = [&](int x, int y, int z) {
        return (static_cast<std::size_t>(z) * n[1] + y) * n[0] + x;
    };
    const auto point = [&](std::size_t id) {
        const int x = static_cast<int>(id % n[0]);
        const int y = static_cast<int>(id / n[0] % n[1]);
        const int z = static_cast<int>(id / n[0] / n[1]);
        return Vec3(box.lo + cell * Vec3(x, y, z));
    };

    const std::size_t total = static_cast<std::size_t>(n[0]) * n[1] * n[2];
    std::vector<double> occ(total);
    const Vec3 dir = Vec3::UnitZ();
    parallel_for(total, 4096, [&](std::size_t begin, std::size_t end) {
        for (std::size_t id = begin; id < end; ++id) occ[id] = occupancy(field.eval(point(id), dir).sigma);
    });

    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
    const auto crossing = [&](std::size_t a, std::size_t b) {
        if (a > b) std::swap(a, b);
        const std::uint64_t key = static_cast<std::uint64_t>(a) * total + b;
        auto [it, inserted] = edge_vertex.try_emplace(key, static_cast<std::uint32_t>(vertices.size()));
        if (inserted) {
            const double s = (threshold - occ[a]) / (occ[b] - occ[a]);
            vertices.push_back(point(a) + s * (point(b) - point(a)));
        }
        return it->second;
    };
    const auto emit = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, const Vec3& outward) {
        if (a == b || b == c || a == c) return;
        const Vec3 nrm = (vertices[b] - vertices[a]).cross(vertices[c] - vertices[a]);
        if (0.5 * nrm.norm() < kDegenerateArea) return;
        if (nrm.dot(outward) < 0.0) std::swap(b, c);
        faces.push_back({a, b, c});
    };

    // Kuhn split: each tet walks from corner 0 to corner 7 adding one axis at a time.
    static constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int z = 0; z + 1 < n[2]; ++z)
        for (int y = 0; y + 1 < n[1]; ++y)
            for (int x = 0; x + 1 < n[0]; ++x)
                for (const auto& perm : kPerm) {
                    std::array<int, 3> c{x, y, z};
                    std::array<std::size_t, 4> v;
                    v[0] = index(c[0], c[1], c[2]);
                    for (int s = 0; s < 3; ++s) {
                        ++c[perm[s]];
                        v[s + 1] = index(c[0], c[1], c[2]);
                    }
                    std::array<std::size_t, 4> in, outv;
                    int ni = 0, no = 0;
                    for (std::size_t id : v) (occ[id] > threshold ? in[ni++] : outv[no++]) = id;
                    if (ni == 0 || no == 0) continue;
                    Vec3 ci = Vec3::Zero(), co = Vec3::Zero();
                    for (int k = 0; k < ni; ++k) ci += point(in[k]) / ni;
                    for (int k = 0; k < no; ++k) co += point(outv[k]) / no;
                    const Vec3 outward = co - ci;
                    if (ni == 1 || no == 1) {
                        const std::size_t apex = ni == 1 ? in[0] : outv[0];
                        const auto& others = ni == 1 ? outv : in;
                        emit(crossing(apex, others[0]), crossing(apex, others[1]), crossing(apex, others[2]), outward);
                    } else {
                        const std::uint32_t ac = crossing(in[0], outv[0]), ad = crossing(in[0], outv[1]);
                        const std::uint32_t bd = crossing(in[1], outv[1]), bc = crossing(in[1], outv[0]);
                        emit(ac, ad, bd, outward);
                        emit(ac, bd, bc, outward);
                    }
                }

    iso.empty = faces.empty();
    if (!iso.empty) iso.mesh = TriMesh(std::move(vertices), std::move(faces));
    return iso;
}

}  // namespace bodyfield
