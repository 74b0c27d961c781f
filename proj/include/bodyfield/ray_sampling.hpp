#pragma once

#include "bodyfield/camera.hpp"
#include "bodyfield/image.hpp"

#include <optional>
#include <span>
#include <vector>

namespace bodyfield {

/// Foreground wherever the depth map is covered.
Mask silhouette_mask(const DepthMap& depth);

/// Binary dilation with the disk {(dx, dy) : dx^2 + dy^2 <= radius^2}.
Mask dilate_mask(const Mask& mask, double radius);

/// True iff x projects into the foreground of every mask. A projection that is
/// undefined (behind the camera) or outside the image counts as outside.
bool classify_point(const Vec3& x, std::span<const Camera> cameras, std::span<const Mask> masks);

/// Cameras plus their dilated silhouettes.
class VisualHull {
public:
    VisualHull() = default;
    /// Dilates every mask by `dilation_radius` pixels. Throws on a count or
    /// size mismatch.
    VisualHull(std::vector<Camera> cameras, const std::vector<Mask>& masks, double dilation_radius);

    bool contains(const Vec3& x) const { return classify_point(x, cameras_, masks_); }
    bool empty() const { return cameras_.empty(); }
    std::span<const Camera> cameras() const { return cameras_; }
    std::span<const Mask> masks() const { return masks_; }

private:
    std::vector<Camera> cameras_;
    std::vector<Mask> masks_;
};

/// Default dilation radius: 2% of the image diagonal.
double default_dilation_radius(const Camera& camera);

struct Interval {
    double t_near = 0.0;
    double t_far = 0.0;
    double length() const { return t_far - t_near; }
};

inline constexpr double kMinNear = 1e-6;
inline constexpr double kBoundsPadding = 0.05;

/// Slab-method intersection of a ray with a box, t_near clamped to >= 1e-6.
std::optional<Interval> ray_box(const Ray& ray, const Aabb& box);
/// Ray against the mesh bounding box padded by `padding` times its diagonal.
std::optional<Interval> ray_bounds(const Ray& ray, const TriMesh& mesh,
                                   double padding = kBoundsPadding);

/// Independent salts for the RNG streams of different sampling stages.
enum class RngPurpose : std::uint64_t { Stratified = 1, FreeSpace = 2 };

/// One uniform draw strictly inside each of `count` equal sub-intervals.
/// Draws are indexed by (seed, stream, sample index).
std::vector<double> stratified_samples(const Interval& interval, int count, std::uint64_t seed,
                                       std::uint64_t stream = 0);

enum class SampleFlag : std::uint8_t { Valid, OutsideHull, FreeSpaceRegularizer };

/// Shrinks `interval` to the part of the ray that can reach the hull, by
/// marching `probes` evenly spaced probes; the result is padded by one probe
/// spacing on each side (clamped to the input). nullopt when no probe lies in
/// the hull.
std::optional<Interval> hull_interval(const Ray& ray, const Interval& interval,
                                      const VisualHull& hull, int probes = 128);

struct RaySamples {
    Ray ray;
    Interval interval;
    std::vector<double> t;
    std::vector<SampleFlag> flags;

    std::size_t valid_count() const;
};

/// Stratified samples on the interval, each flagged Valid or OutsideHull.
/// With an empty hull every sample is Valid.
RaySamples sample_ray(const Ray& ray, const Interval& interval, int count, std::uint64_t seed,
                      std::uint64_t stream, const VisualHull* hull);

struct FreeSpaceSamples {
    std::vector<Vec3> points;  // all flagged FreeSpaceRegularizer
    bool budget_exceeded = false;
};

/// Rejection-samples `count` points of `box` outside the hull, with at most
/// `max_attempts_per_point * count` draws.
FreeSpaceSamples sample_free_space(const Aabb& box, const VisualHull& hull, int count,
                                   std::uint64_t seed, int max_attempts_per_point = 64);

}  // namespace bodyfield
