#pragma once

#include "bodyfield/image.hpp"
#include "bodyfield/voxel_grid.hpp"

#include <span>
#include <vector>

namespace bodyfield {

/// Reported for identical images.
inline constexpr double kPsnrCap = 99.0;

/// 10 log10(1 / MSE) over all channels of the masked pixels, capped at 99 dB.
double psnr(const Image& image, const Image& reference, const Mask* mask = nullptr);

inline double luma(const Vec3& c) { return 0.299 * c.x() + 0.587 * c.y() + 0.114 * c.z(); }

/// Mean local SSIM of the luma channels with an 11x11 Gaussian window
/// (sigma 1.5), K1 = 0.01, K2 = 0.03 and dynamic range 1, over the positions
/// where the window fits inside the image.
double ssim(const Image& image, const Image& reference);

struct SurfaceSamples {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    std::vector<std::uint32_t> faces;
};

/// Area-weighted uniform samples on the surface; deterministic given seed.
SurfaceSamples sample_surface(const TriMesh& mesh, std::size_t count, std::uint64_t seed);

inline constexpr std::size_t kDefaultSurfaceSamples = 100000;

/// Point-to-surface distances from samples of each mesh to the other one.
class MeshComparison {
public:
    MeshComparison(const TriMesh& a, const TriMesh& b, std::size_t samples_per_mesh = kDefaultSurfaceSamples,
                   std::uint64_t seed = 0, int grid_resolution = kDefaultGridResolution);

    /// Symmetric mean of the two directed mean distances.
    double chamfer() const;
    /// Symmetric mean of (1 - |n_sample . n_closest|).
    double normal_distance() const;
    /// Largest sample-to-surface distance in either direction.
    double uhd() const;
    double precision(double threshold) const;  // a-samples within threshold of b
    double recall(double threshold) const;     // b-samples within threshold of a
    double fscore(double threshold) const;

    std::span<const double> a_to_b() const { return a_to_b_; }
    std::span<const double> b_to_a() const { return b_to_a_; }

private:
    std::vector<double> a_to_b_, b_to_a_;
    std::vector<double> a_normal_, b_normal_;
};

struct ChamferResult {
    double chamfer = 0.0;
    double normal_distance = 0.0;
};

ChamferResult chamfer(const TriMesh& a, const TriMesh& b, std::size_t samples = kDefaultSurfaceSamples,
                      std::uint64_t seed = 0);
double uhd(const TriMesh& a, const TriMesh& b, std::size_t samples = kDefaultSurfaceSamples,
           std::uint64_t seed = 0);
double fscore(const TriMesh& a, const TriMesh& b, double threshold,
              std::size_t samples = kDefaultSurfaceSamples, std::uint64_t seed = 0);

/// (sum ||c0 - ref||^2 + sum ||c - ref||^2) / |R|.
double photometric_loss(std::span<const Vec3> c, std::span<const Vec3> c0, std::span<const Vec3> reference);

/// mean (tanh(sigma) - label)^2 + mean (o - target)^2.
double geometry_loss(std::span<const double> sigma, std::span<const double> labels,
                     std::span<const double> visibility, std::span<const double> targets);

/// Occupancy targets from a closed scan: 1 inside, 0 outside.
std::vector<double> occupancy_labels(std::span<const Vec3> points, const TriMesh& scan, const VoxelGrid& grid);

}  // namespace bodyfield
