#pragma once

#include "bodyfield/camera.hpp"
#include "bodyfield/eval_metrics.hpp"
#include "bodyfield/occlusion_blend.hpp"
#include "bodyfield/volume_render.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bodyfield::cli {

using nlohmann::json;

/// Either a mesh file or a procedural generator with its parameters.
struct MeshSource {
    std::filesystem::path path;  // empty for generators
    std::string generator;       // icosphere, cube, torus, uv_sphere
    int level = 3;
    int slices = 64, stacks = 32;
    int major_segments = 48, minor_segments = 24;
    double radius = 0.5, edge = 1.0, major_radius = 0.5, minor_radius = 0.2;
    Vec3 center = Vec3::Zero();
};

struct CameraSpec {
    Camera camera;
    std::optional<std::filesystem::path> image, mask, depth;
};

struct FieldSpec {
    std::string name = "uniform_ball";  // uniform_ball, gaussian_blob, mesh_shell, empty
    Vec3 center = Vec3::Zero();
    double radius = 0.5;
    double s = 0.2;
    double width = 0.02;
    double sigma = 50.0;
    Vec3 color = Vec3::Constant(0.8);
};

struct SamplerSpec {
    int samples = 256;
    std::uint64_t seed = 0;
    std::optional<double> dilation_radius;  // pixels; default 2% of the image diagonal
    double padding = kBoundsPadding;
    int hull_probes = 128;
    bool use_hull = true;
};

struct BlendSpec {
    bool enabled = false;
    double sharpness = kDefaultSharpness;
    int key_width = kDefaultKeyWidth;
    int octaves = kDefaultOctaves;
    LogitMode logit_mode = LogitMode::Multiplicative;
};

struct OutputSpec {
    int render_camera = 0;
    std::optional<int> width, height;  // override the render camera size, scaling intrinsics
    int grid_resolution = kDefaultGridResolution;
    int sdf_resolution = 64;
    bool sdf_gradient = false;
    bool sdf_canonical = false;
    int isosurface_resolution = 256;
    bool write_dpth = true;
    std::size_t metric_samples = kDefaultSurfaceSamples;
    double chamfer_scale = 1.0;
    double fscore_threshold = 0.01;
    int embed_points = 1000;
    int bench_queries = 10000;
};

struct SceneConfig {
    MeshSource mesh;
    std::optional<std::filesystem::path> canonical_mesh;
    std::vector<CameraSpec> cameras;
    FieldSpec field;
    SamplerSpec sampler;
    BlendSpec blend;
    OutputSpec output;
};

/// Every problem found, each prefixed by the JSON path of the offending field.
struct ValidationResult {
    std::optional<SceneConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

/// Parses and checks a config document; relative paths resolve against
/// `base_dir`. All errors are collected before returning.
ValidationResult validate(const json& doc, const std::filesystem::path& base_dir);
ValidationResult validate_file(const std::filesystem::path& path);

/// Fully resolved document: defaults filled in, absolute paths, explicit
/// camera matrices. validate(emit(c)) reproduces c.
json emit(const SceneConfig& config);

}  // namespace bodyfield::cli
