#include "bodyfield/ray_sampling.hpp"

#include "bodyfield/rng.hpp"

#include <cmath>

namespace bodyfield {

Mask silhouette_mask(const DepthMap& depth) {
    Mask m(depth.width, depth.height);
    for (std::size_t i = 0; i < depth.depth.size(); ++i) m.bits[i] = std::isfinite(depth.depth[i]) ? 1 : 0;
    return m;
}

Mask dilate_mask(const Mask& mask, double radius) {
    if (!(radius >= 0.0)) throw GeometryError("dilation radius must be >= 0");
    const int r = static_cast<int>(std::floor(radius));
    std::vector<std::array<int, 2>> disk;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (dx * dx + dy * dy <= radius * radius) disk.push_back({dx, dy});

    Mask out(mask.width, mask.height);
    for (int j = 0; j < mask.height; ++j)
        for (int i = 0; i < mask.width; ++i) {
            if (!mask.at(i, j)) continue;
            for (const auto& [dx, dy] : disk)
                if (out.inside(i + dx, j + dy)) out.set(i + dx, j + dy, true);
        }
    return out;
}

bool classify_point(const Vec3& x, std::span<const Camera> cameras, std::span<const Mask> masks) {
    if (cameras.size() != masks.size()) throw GeometryError("one mask per camera is required");
    for (std::size_t c = 0; c < cameras.size(); ++c) {
        const auto px = cameras[c].pixel_of(x);
        if (!px || !masks[c].inside((*px)[0], (*px)[1]) || !masks[c].at((*px)[0], (*px)[1])) return false;
    }
    return true;
}

VisualHull::VisualHull(std::vector<Camera> cameras, const std::vector<Mask>& masks,
                       double dilation_radius)
    : cameras_(std::move(cameras)) {
    if (cameras_.size() != masks.size()) throw GeometryError("one mask per camera is required");
    for (std::size_t c = 0; c < masks.size(); ++c) {
        if (masks[c].width != cameras_[c].width || masks[c].height != cameras_[c].height)
            throw GeometryError("mask " + std::to_string(c) + " size does not match its camera");
        masks_.push_back(dilate_mask(masks[c], dilation_radius));
    }
}

double default_dilation_radius(const Camera& camera) {
    return 0.02 * std::hypot(camera.width, camera.height);
}

std::optional<Interval> ray_box(const Ray& ray, const Aabb& box) {
    double t0 = -kInf, t1 = kInf;
    for (int k = 0; k < 3; ++k) {
        const double o = ray.origin[k], d = ray.direction[k];
        if (d == 0.0) {
            if (o < box.lo[k] || o > box.hi[k]) return std::nullopt;
            continue;
        }
        double a = (box.lo[k] - o) / d, b = (box.hi[k] - o) / d;
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
    }
    t0 = std::max(t0, kMinNear);
    if (!(t0 < t1)) return std::nullopt;
    return Interval{t0, t1};
}

std::optional<Interval> ray_bounds(const Ray& ray, const TriMesh& mesh, double padding) {
    const Aabb& b = mesh.bounds();
    return ray_box(ray, b.padded(padding * b.diagonal()));
}

std::vector<double> stratified_samples(const Interval& interval, int count, std::uint64_t seed,
                                       std::uint64_t stream) {
    if (count < 2) throw GeometryError("at least two samples per ray are required");
    if (!(interval.t_near < interval.t_far) || !std::isfinite(interval.t_far))
        throw GeometryError("invalid sampling interval");
    const CounterRng rng(seed ^ static_cast<std::uint64_t>(RngPurpose::Stratified) << 56);
    const double step = interval.length() / count;
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) {
        // Open unit interval so samples never sit on a stratum boundary.
        const double u = (static_cast<double>(rng.bits(stream, i) >> 11) + 0.5) * 0x1.0p-53;
        t[i] = interval.t_near + (i + u) * step;
    }
    return t;
}

std::optional<Interval> hull_interval(const Ray& ray, const Interval& interval,
                                      const VisualHull& hull, int probes) {
    if (hull.empty()) return interval;
    if (probes < 2) throw GeometryError("hull probing needs at least two probes");
    const double step = interval.length() / (probes - 1);
    int first = -1, last = -1;
    for (int i = 0; i < probes; ++i) {
        if (hull.contains(ray.at(interval.t_near + i * step))) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) return std::nullopt;
    const double lo = std::max(interval.t_near, interval.t_near + (first - 1) * step);
    const double hi = std::min(interval.t_far, interval.t_near + (last + 1) * step);
    return Interval{lo, hi};
}

std::size_t RaySamples::valid_count() const {
    return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), SampleFlag::Valid));
}

RaySamples sample_ray(const Ray& ray, const Interval& interval, int count, std::uint64_t seed,
                      std::uint64_t stream, const VisualHull* hull) {
    RaySamples s{ray, interval, stratified_samples(interval, count, seed, stream), {}};
    s.flags.resize(s.t.size(), SampleFlag::Valid);
    if (hull && !hull->empty())
        for (std::size_t i = 0; i < s.t.size(); ++i)
            if (!hull->contains(ray.at(s.t[i]))) s.flags[i] = SampleFlag::OutsideHull;
    return s;
}

FreeSpaceSamples sample_free_space(const Aabb& box, const VisualHull& hull, int count,
                                   std::uint64_t seed, int max_attempts_per_point) {
    if (count < 0) throw GeometryError("free-space sample count must be >= 0");
    FreeSpaceSamples out;
    const CounterRng rng(seed ^ static_cast<std::uint64_t>(RngPurpose::FreeSpace) << 56);
    const std::uint64_t budget = static_cast<std::uint64_t>(count) * max_attempts_per_point;
    for (std::uint64_t attempt = 0; attempt < budget && out.points.size() < static_cast<std::size_t>(count);
         ++attempt) {
        const Vec3 u(rng.uniform(attempt, 0), rng.uniform(attempt, 1), rng.uniform(attempt, 2));
        const Vec3 x = box.lo + u.cwiseProduct(box.extent());
        if (hull.empty() || !hull.contains(x)) out.points.push_back(x);
    }
    out.budget_exceeded = out.points.size() < static_cast<std::size_t>(count);
    return out;
}

}  // namespace bodyfield
