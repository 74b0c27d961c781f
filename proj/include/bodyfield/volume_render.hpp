#pragma once

#include "bodyfield/image.hpp"
#include "bodyfield/ray_sampling.hpp"
#include "bodyfield/voxel_grid.hpp"

#include <array>
#include <memory>
#include <span>
#include <string>

namespace bodyfield {

inline constexpr int kFieldFeatureWidth = 4;

struct FieldSample {
    double sigma = 0.0;             // density, >= 0
    Vec3 color = Vec3::Zero();      // radiance c0, clamped to [0, 1]
    std::array<double, kFieldFeatureWidth> feature{};  // [r, g, b, occupancy]
};

/// Radiance field. eval must be safe to call concurrently.
class Field {
public:
    virtual ~Field() = default;
    virtual FieldSample eval(const Vec3& x, const Vec3& d) const = 0;
    /// Box outside which the density is zero (or negligible).
    virtual Aabb bounds() const = 0;
    virtual std::string name() const = 0;

protected:
    static FieldSample make_sample(double sigma, const Vec3& color);
};

class EmptyField final : public Field {
public:
    FieldSample eval(const Vec3&, const Vec3&) const override { return {}; }
    Aabb bounds() const override { return {Vec3::Zero(), Vec3::Zero()}; }
    std::string name() const override { return "empty"; }
};

/// sigma0 and `color` inside the closed ball, zero outside.
class UniformBall final : public Field {
public:
    UniformBall(const Vec3& center, double radius, double sigma0, const Vec3& color);
    FieldSample eval(const Vec3& x, const Vec3& d) const override;
    Aabb bounds() const override;
    std::string name() const override { return "uniform_ball"; }

private:
    Vec3 center_;
    double radius_, sigma0_;
    Vec3 color_;
};

/// sigma0 * exp(-|x - center|^2 / (2 s^2)). bounds() is the 6-sigma box.
class GaussianBlob final : public Field {
public:
    GaussianBlob(const Vec3& center, double s, double sigma0, const Vec3& color);
    FieldSample eval(const Vec3& x, const Vec3& d) const override;
    Aabb bounds() const override;
    std::string name() const override { return "gaussian_blob"; }

private:
    Vec3 center_;
    double s_, sigma0_;
    Vec3 color_;
};

/// sigma0 where the unsigned distance to the mesh is below `width`. The mesh
/// and grid must outlive the field.
class MeshShell final : public Field {
public:
    MeshShell(const TriMesh& mesh, const VoxelGrid& grid, double width, double sigma0,
              const Vec3& color);
    FieldSample eval(const Vec3& x, const Vec3& d) const override;
    Aabb bounds() const override;
    std::string name() const override { return "mesh_shell"; }

private:
    const TriMesh* mesh_;
    const VoxelGrid* grid_;
    double width_, sigma0_;
    Vec3 color_;
};

struct RayIntegral {
    Vec3 color = Vec3::Zero();  // premultiplied
    double alpha = 0.0;
    double depth = 0.0;          // expected depth, 0 when alpha = 0
    double transmittance = 1.0;  // T after the last sample
};

/// Quadrature of the emission-absorption integral. delta_i = t_{i+1} - t_i and
/// the last delta is t_far - t_N. Samples whose flag is not Valid contribute
/// zero density and radiance. Throws when depths are not strictly increasing
/// or exceed t_far.
RayIntegral integrate_ray(std::span<const double> t, double t_far, std::span<const double> sigma,
                          std::span<const Vec3> color, std::span<const SampleFlag> flags = {});

/// Occupancy probability tanh(sigma).
inline double occupancy(double sigma) { return std::tanh(sigma); }

/// Optional per-sample color stage applied after field evaluation (for
/// example camera blending). Must be safe to call concurrently.
class SampleShader {
public:
    virtual ~SampleShader() = default;
    virtual Vec3 shade(const Vec3& x, const Vec3& d, const FieldSample& sample) const = 0;
};

struct SamplerConfig {
    int samples = 256;
    std::uint64_t seed = 0;
    int hull_probes = 128;
};

struct RenderTimings {
    double sampling = 0.0, field = 0.0, blend = 0.0, integration = 0.0;  // seconds, summed over workers
};

struct RenderOutput {
    int width = 0, height = 0;
    Image color;   // blended color c (equals color0 without a shader), premultiplied
    Image color0;  // field radiance c0, premultiplied
    std::vector<double> alpha;
    std::vector<double> depth;
    RenderTimings timings;
    std::size_t samples_total = 0, samples_valid = 0;
};

/// Renders every pixel: rays are clipped to `scene_box`, then to the hull when
/// one is given (rays that miss are background), sampled with stratified
/// depths seeded by (seed, pixel index) and integrated. Deterministic for any
/// worker count.
RenderOutput render_image(const Camera& camera, const Field& field, const Aabb& scene_box,
                          const VisualHull* hull, const SamplerConfig& config,
                          const SampleShader* shader = nullptr);

/// Straight (un-premultiplied) color for export.
Image unpremultiply(const Image& color, const std::vector<double>& alpha);

struct Isosurface {
    TriMesh mesh;
    double cell_size = 0.0;
    bool empty = false;  // nothing crossed the threshold
};

/// Marching tetrahedra (six per lattice cube, split along the main diagonal)
/// over the occupancy level set {tanh(sigma) = threshold}. The lattice has
/// `resolution` cells along the longest side of `box`. Vertices are shared
/// per lattice edge, so closed level sets give watertight meshes; triangles
/// are oriented toward lower occupancy.
Isosurface extract_isosurface(const Field& field, const Aabb& box, int resolution,
                              double threshold = 0.5);

}  // namespace bodyfield
