#include "bodyfield/eval_metrics.hpp"

#include "bodyfield/implicit_body.hpp"
#include "bodyfield/parallel.hpp"
#include "bodyfield/rng.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace bodyfield {

namespace {

void require_same_size(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        throw GeometryError("image sizes differ: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                            " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
}

std::vector<double> gaussian_window() {
    std::vector<double> w(11);
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
        w[i] = std::exp(-(i - 5) * (i - 5) / (2.0 * 1.5 * 1.5));
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable "valid" filtering of a row-major plane.
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h, const std::vector<double>& k) {
    const int n = static_cast<int>(k.size());
    const int ow = w - n + 1, oh = h - n + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h), out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += k[i] * in[static_cast<std::size_t>(y) * w + x + i];
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    return out;
}

// Normal at the closest feature: the face normal in the interior, the mean
// of the adjacent face normals on an edge, the angle-weighted normal at a
// vertex. Every face that shares the feature reports the same normal.
class FeatureNormals {
public:
    explicit FeatureNormals(const TriMesh& mesh) : mesh_(mesh), vertex_(mesh.vertex_count(), Vec3::Zero()) {
        for (std::size_t f = 0; f < mesh.face_count(); ++f) {
            const Vec3 n = mesh.face_normal(f);
            const auto& tri = mesh.faces()[f];
            for (int k = 0; k < 3; ++k) {
                const Vec3& p = mesh.vertices()[tri[k]];
                const Vec3 e1 = (mesh.vertices()[tri[(k + 1) % 3]] - p).normalized();
                const Vec3 e2 = (mesh.vertices()[tri[(k + 2) % 3]] - p).normalized();
                vertex_[tri[k]] += std::acos(std::clamp(e1.dot(e2), -1.0, 1.0)) * n;
                edge_.try_emplace(key(tri[k], tri[(k + 1) % 3]), Vec3::Zero()).first->second += n;
            }
        }
    }

    Vec3 at(const ClosestHit& hit) const {
        const auto& tri = mesh_.faces()[hit.face];
        const Vec3& b = hit.barycentric;
        const int zeros = (b[0] == 0.0) + (b[1] == 0.0) + (b[2] == 0.0);
        if (zeros == 0) return mesh_.face_normal(hit.face);
        if (zeros == 1) {
            const int k = b[0] == 0.0 ? 0 : b[1] == 0.0 ? 1 : 2;
            return safe_normalized(edge_.at(key(tri[(k + 1) % 3], tri[(k + 2) % 3])), hit.face);
        }
        const int k = b[0] != 0.0 ? 0 : b[1] != 0.0 ? 1 : 2;
        return safe_normalized(vertex_[tri[k]], hit.face);
    }

private:
    static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
        return (std::uint64_t{std::min(a, b)} << 32) | std::max(a, b);
    }
    Vec3 safe_normalized(const Vec3& v, std::uint32_t face) const {
        const double n = v.norm();
        return n > 0.0 ? Vec3(v / n) : mesh_.face_normal(face);
    }

    const TriMesh& mesh_;
    std::vector<Vec3> vertex_;
    std::unordered_map<std::uint64_t, Vec3> edge_;
};

void directed(const SurfaceSamples& from, const TriMesh& to, int resolution, std::vector<double>& dist,
              std::vector<double>& normal_term) {
    const VoxelGrid grid = build_grid(to, resolution);
    const FeatureNormals normals(to);
    const auto hits = accel_closest_points(grid, to, from.points);
    dist.resize(hits.size());
    normal_term.resize(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
        dist[i] = hits[i].distance();
        normal_term[i] = 1.0 - std::abs(from.normals[i].dot(normals.at(hits[i])));
    }
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double fraction_within(const std::vector<double>& v, double threshold) {
    std::size_t n = 0;
    for (double x : v) n += x <= threshold;
    return v.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(v.size());
}

}  // namespace

double psnr(const Image& image, const Image& reference, const Mask* mask) {
    require_same_size(image, reference);
    if (mask && (mask->width != image.width || mask->height != image.height))
        throw GeometryError("mask size does not match the images");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        if (mask && !mask->bits[i]) continue;
        sum += (image.pixels[i] - reference.pixels[i]).squaredNorm();
        n += 3;
    }
    if (n == 0) throw GeometryError("psnr over an empty mask");
    const double mse = sum / static_cast<double>(n);
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& image, const Image& reference) {
    require_same_size(image, reference);
    if (image.width < 11 || image.height < 11) throw GeometryError("ssim needs images of at least 11x11 pixels");
    const int w = image.width, h = image.height;
    const std::size_t n = image.pixels.size();
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = luma(image.pixels[i]);
        y[i] = luma(reference.pixels[i]);
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto k = gaussian_window();
    const auto mx = filter_valid(x, w, h, k), my = filter_valid(y, w, h, k);
    const auto sxx = filter_valid(xx, w, h, k), syy = filter_valid(yy, w, h, k), sxy = filter_valid(xy, w, h, k);
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = sxx[i] - mx[i] * mx[i], vy = syy[i] - my[i] * my[i], cxy = sxy[i] - mx[i] * my[i];
        total += ((2 * mx[i] * my[i] + c1) * (2 * cxy + c2)) /
                 ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(mx.size());
}

SurfaceSamples sample_surface(const TriMesh& mesh, std::size_t count, std::uint64_t seed) {
    if (mesh.empty()) throw GeometryError("cannot sample an empty mesh");
    std::vector<double> cdf(mesh.face_count());
    double acc = 0.0;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) cdf[f] = acc += mesh.face_area(f);
    const CounterRng rng(seed);
    SurfaceSamples s;
    s.points.resize(count);
    s.normals.resize(count);
    s.faces.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = rng.uniform(i, 0) * acc;
        const auto f = static_cast<std::uint32_t>(
            std::min<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), cdf.size() - 1));
        const double r1 = std::sqrt(rng.uniform(i, 1)), r2 = rng.uniform(i, 2);
        const auto [a, b, c] = mesh.triangle(f);
        s.points[i] = (1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c;
        s.normals[i] = mesh.face_normal(f);
        s.faces[i] = f;
    }
    return s;
}

MeshComparison::MeshComparison(const TriMesh& a, const TriMesh& b, std::size_t samples_per_mesh,
                               std::uint64_t seed, int grid_resolution) {
    if (a.empty() || b.empty()) throw GeometryError("mesh comparison needs two non-empty meshes");
    if (samples_per_mesh == 0) throw GeometryError("mesh comparison needs at least one sample");
    // Same seed for both meshes, so swapping a and b swaps the two directions exactly.
    const SurfaceSamples sa = sample_surface(a, samples_per_mesh, seed);
    const SurfaceSamples sb = sample_surface(b, samples_per_mesh, seed);
    directed(sa, b, grid_resolution, a_to_b_, a_normal_);
    directed(sb, a, grid_resolution, b_to_a_, b_normal_);
}

double MeshComparison::chamfer() const { return 0.5 * (mean(a_to_b_) + mean(b_to_a_)); }

double MeshComparison::normal_distance() const { return 0.5 * (mean(a_normal_) + mean(b_normal_)); }

double MeshComparison::uhd() const {
    double m = 0.0;
    for (double d : a_to_b_) m = std::max(m, d);
    for (double d : b_to_a_) m = std::max(m, d);
    return m;
}

double MeshComparison::precision(double threshold) const { return fraction_within(a_to_b_, threshold); }

double MeshComparison::recall(double threshold) const { return fraction_within(b_to_a_, threshold); }

double MeshComparison::fscore(double threshold) const {
    if (!(threshold > 0.0)) throw GeometryError("f-score threshold must be > 0");
    const double p = precision(threshold), r = recall(threshold);
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

ChamferResult chamfer(const TriMesh& a, const TriMesh& b, std::size_t samples, std::uint64_t seed) {
    const MeshComparison cmp(a, b, samples, seed);
    return {cmp.chamfer(), cmp.normal_distance()};
}

double uhd(const TriMesh& a, const TriMesh& b, std::size_t samples, std::uint64_t seed) {
    return MeshComparison(a, b, samples, seed).uhd();
}

double fscore(const TriMesh& a, const TriMesh& b, double threshold, std::size_t samples, std::uint64_t seed) {
    if (!(threshold > 0.0)) throw GeometryError("f-score threshold must be > 0");
    return MeshComparison(a, b, samples, seed).fscore(threshold);
}

double photometric_loss(std::span<const Vec3> c, std::span<const Vec3> c0, std::span<const Vec3> reference) {
    if (c.size() != reference.size() || c0.size() != reference.size())
        throw GeometryError("photometric loss inputs differ in size");
    if (reference.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i)
        sum += (c0[i] - reference[i]).squaredNorm() + (c[i] - reference[i]).squaredNorm();
    return sum / static_cast<double>(reference.size());
}

double geometry_loss(std::span<const double> sigma, std::span<const double> labels,
                     std::span<const double> visibility, std::span<const double> targets) {
    if (sigma.size() != labels.size() || visibility.size() != targets.size())
        throw GeometryError("geometry loss inputs differ in size");
    double occ = 0.0, vis = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i) occ += std::pow(std::tanh(sigma[i]) - labels[i], 2);
    for (std::size_t i = 0; i < visibility.size(); ++i) vis += std::pow(visibility[i] - targets[i], 2);
    const double a = sigma.empty() ? 0.0 : occ / static_cast<double>(sigma.size());
    const double b = visibility.empty() ? 0.0 : vis / static_cast<double>(visibility.size());
    return a + b;
}

std::vector<double> occupancy_labels(std::span<const Vec3> points, const TriMesh& scan, const VoxelGrid& grid) {
    std::vector<double> out(points.size());
    parallel_for(points.size(), 256, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = sign_of(points[i], scan, grid) > 0 ? 1.0 : 0.0;
    });
    return out;
}

}  // namespace bodyfield
