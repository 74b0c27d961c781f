#include "commands.hpp"

#include "bodyfield/eval_metrics.hpp"
#include "bodyfield/implicit_body.hpp"
#include "bodyfield/parallel.hpp"
#include "bodyfield/rng.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

namespace bodyfield::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Thrown for problems in the command-line inputs, reported as validation errors.
class UsageError : public Error {
public:
    using Error::Error;
};

struct Context {
    const RunOptions& options;
    std::optional<SceneConfig> config;
    std::ostream& log;
    std::vector<fs::path> artifacts;

    const SceneConfig& scene() const { return *config; }
    fs::path artifact(const std::string& name) {
        artifacts.push_back(options.out / name);
        return artifacts.back();
    }
};

TriMesh build_mesh(const SceneConfig& c) {
    const MeshSource& m = c.mesh;
    if (m.generator.empty())
        return c.canonical_mesh ? load_mesh_pair(m.path, *c.canonical_mesh) : load_mesh(m.path);
    if (m.generator == "icosphere") return make_icosphere(m.level, m.center, m.radius);
    if (m.generator == "cube") return make_cube(m.center, m.edge);
    if (m.generator == "uv_sphere") return make_uv_sphere(m.slices, m.stacks, m.center, m.radius);
    return make_torus(m.major_radius, m.minor_radius, m.major_segments, m.minor_segments)
        .transformed(Mat3::Identity(), m.center);
}

// Without a canonical mesh the posed mesh is its own rest pose.
TriMesh with_identity_canonical(const TriMesh& mesh) {
    return mesh.has_canonical() ? mesh : mesh.with_canonical(mesh);
}

std::unique_ptr<Field> build_field(const FieldSpec& f, const TriMesh& mesh, const VoxelGrid& grid) {
    if (f.name == "uniform_ball") return std::make_unique<UniformBall>(f.center, f.radius, f.sigma, f.color);
    if (f.name == "gaussian_blob") return std::make_unique<GaussianBlob>(f.center, f.s, f.sigma, f.color);
    if (f.name == "mesh_shell") return std::make_unique<MeshShell>(mesh, grid, f.width, f.sigma, f.color);
    return std::make_unique<EmptyField>();
}

Aabb scene_box(const SceneConfig& c, const TriMesh& mesh, const Field& field) {
    Aabb box = mesh.bounds().padded(c.sampler.padding * mesh.bounds().diagonal());
    if (field.name() != "empty") {
        const Aabb fb = field.bounds();
        box.extend(fb.lo);
        box.extend(fb.hi);
    }
    return box;
}

Camera render_camera(const SceneConfig& c) {
    Camera cam = c.cameras.at(static_cast<std::size_t>(c.output.render_camera)).camera;
    if (c.output.width) {
        const double s = static_cast<double>(*c.output.width) / cam.width;
        cam.fx *= s;
        cam.cx *= s;
        cam.width = *c.output.width;
    }
    if (c.output.height) {
        const double s = static_cast<double>(*c.output.height) / cam.height;
        cam.fy *= s;
        cam.cy *= s;
        cam.height = *c.output.height;
    }
    return cam;
}

DepthMap body_depth(const CameraSpec& spec, const TriMesh& mesh) {
    if (!spec.depth) return rasterize_depth(mesh, spec.camera);
    DepthMap d = read_depth_map(*spec.depth);
    if (d.width != spec.camera.width || d.height != spec.camera.height)
        throw GeometryError("depth file " + spec.depth->string() + " does not match its camera size");
    return d;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json timings_json(const std::map<std::string, double>& t) {
    json j = json::object();
    for (const auto& [k, v] : t) j[k] = v;
    return j;
}

// ------------------------------------------------------------------ render

json cmd_render(Context& ctx) {
    const SceneConfig& c = ctx.scene();
    std::map<std::string, double> timings;
    auto start = Clock::now();
    const TriMesh mesh = build_mesh(c);
    const VoxelGrid grid = build_grid(mesh, c.output.grid_resolution);
    timings["grid_build"] = seconds_since(start);

    const auto field = build_field(c.field, mesh, grid);
    const Camera cam = render_camera(c);

    std::optional<VisualHull> hull;
    if (c.sampler.use_hull) {
        std::vector<Camera> cams;
        std::vector<Mask> masks;
        double radius = 0.0;
        for (const CameraSpec& s : c.cameras) {
            if (!s.mask) continue;
            cams.push_back(s.camera);
            masks.push_back(read_mask_png(*s.mask));
            radius = std::max(radius, default_dilation_radius(s.camera));
        }
        if (!cams.empty()) hull.emplace(cams, masks, c.sampler.dilation_radius.value_or(radius));
    }

    std::vector<SourceView> sources;
    std::optional<AnalyticFeatureProvider> provider;
    std::optional<BlendShader> shader;
    if (c.blend.enabled) {
        start = Clock::now();
        for (const CameraSpec& s : c.cameras) {
            SourceView v;
            v.camera = s.camera;
            v.image = read_image_png(*s.image);
            if (v.image.width != s.camera.width || v.image.height != s.camera.height)
                throw GeometryError("image " + s.image->string() + " does not match its camera size");
            v.body_depth = body_depth(s, mesh);
            sources.push_back(std::move(v));
        }
        provider.emplace(c.blend.key_width, c.blend.octaves, c.sampler.seed);
        shader.emplace(sources, *provider, BlendConfig{c.blend.sharpness, c.blend.key_width, c.blend.logit_mode});
        timings["blend_setup"] = seconds_since(start);
    }

    SamplerConfig sc;
    sc.samples = c.sampler.samples;
    sc.seed = c.sampler.seed;
    sc.hull_probes = c.sampler.hull_probes;
    start = Clock::now();
    const RenderOutput r = render_image(cam, *field, scene_box(c, mesh, *field), hull ? &*hull : nullptr, sc,
                                        shader ? &*shader : nullptr);
    timings["render_wall"] = seconds_since(start);
    timings["sampling"] = r.timings.sampling;
    timings["field_eval"] = r.timings.field;
    timings["blend"] = r.timings.blend;
    timings["integration"] = r.timings.integration;

    start = Clock::now();
    const Image straight = unpremultiply(r.color, r.alpha);
    write_rgba_png(ctx.artifact("render_rgba.png"), straight, r.alpha);
    Image over_white = r.color;
    for (std::size_t i = 0; i < over_white.pixels.size(); ++i)
        over_white.pixels[i] += Vec3::Constant(1.0 - r.alpha[i]);
    write_image_png(ctx.artifact("render.png"), over_white);
    if (shader) write_rgba_png(ctx.artifact("render_c0_rgba.png"), unpremultiply(r.color0, r.alpha), r.alpha);
    if (c.output.write_dpth) {
        write_dpth(ctx.artifact("alpha.dpth"), r.width, r.height, r.alpha);
        write_dpth(ctx.artifact("depth.dpth"), r.width, r.height, r.depth);
    }
    timings["export"] = seconds_since(start);

    double alpha_sum = 0.0;
    for (double a : r.alpha) alpha_sum += a;
    return {{"width", r.width},
            {"height", r.height},
            {"field", field->name()},
            {"hull", hull.has_value()},
            {"blend", shader.has_value()},
            {"samples_total", r.samples_total},
            {"samples_valid", r.samples_valid},
            {"mean_alpha", alpha_sum / static_cast<double>(r.alpha.size())},
            {"timings", timings_json(timings)}};
}

// ---------------------------------------------------------------- sdf-grid

json cmd_sdf_grid(Context& ctx) {
    const SceneConfig& c = ctx.scene();
    std::map<std::string, double> timings;
    auto start = Clock::now();
    const TriMesh posed = build_mesh(c);
    if (c.output.sdf_canonical && !posed.has_canonical())
        throw GeometryError("sdf_canonical requested but the config has no canonical_mesh");
    const TriMesh mesh = with_identity_canonical(posed);
    const VoxelGrid grid = build_grid(mesh, c.output.grid_resolution);
    timings["grid_build"] = seconds_since(start);
    if (!mesh.watertight()) throw GeometryError("sdf-grid needs a watertight mesh");

    const NormalizedFrame frame = normalize_frame(mesh);
    const int n = c.output.sdf_resolution;
    const double step = 2.0 / n;
    std::vector<Vec3> points;
    points.reserve(static_cast<std::size_t>(n) * n * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                points.push_back(frame.inverse(Vec3(-1.0 + (i + 0.5) * step, -1.0 + (j + 0.5) * step,
                                                    -1.0 + (k + 0.5) * step)));
    start = Clock::now();
    const auto emb = body_embeddings(points, mesh, grid);
    timings["embedding"] = seconds_since(start);

    start = Clock::now();
    std::vector<std::string> layers = {"sdf"};
    std::vector<double> values(emb.size());
    auto write_layer = [&](const std::string& name, auto&& get) {
        for (std::size_t i = 0; i < emb.size(); ++i) values[i] = get(emb[i]);
        write_sdf3(ctx.artifact(name + ".sdf3"), n, n, n, values);
    };
    write_layer("sdf", [](const BodyEmbedding& e) { return e.sdf; });
    if (c.output.sdf_gradient)
        for (int a = 0; a < 3; ++a) {
            const std::string name = std::string("gradient_") + "xyz"[a];
            write_layer(name, [a](const BodyEmbedding& e) { return e.grad[a]; });
            layers.push_back(name);
        }
    if (c.output.sdf_canonical)
        for (int a = 0; a < 3; ++a) {
            const std::string name = std::string("canonical_") + "xyz"[a];
            write_layer(name, [a](const BodyEmbedding& e) { return e.canonical_point[a]; });
            layers.push_back(name);
        }
    json rot = json::array();
    for (int r = 0; r < 3; ++r) rot.push_back(json::array({frame.rotation(r, 0), frame.rotation(r, 1), frame.rotation(r, 2)}));
    const json sidecar = {{"dims", {n, n, n}},
                          {"order", "x fastest, then y, then z"},
                          {"lattice", "normalized coordinates -1 + (i + 0.5) * 2 / n per axis"},
                          {"frame", {{"rotation", rot}, {"center", vec_json(frame.center)}, {"scale", frame.scale}}},
                          {"world_from_normalized", "x = rotation^T * (y / scale) + center"},
                          {"sign_convention", "positive inside"},
                          {"layers", layers}};
    std::ofstream(ctx.artifact("sdf_grid.json")) << sidecar.dump(2) << "\n";
    timings["export"] = seconds_since(start);

    std::size_t inside = 0;
    for (const auto& e : emb) inside += e.sdf > 0.0;
    return {{"dims", {n, n, n}}, {"layers", layers}, {"inside_fraction", double(inside) / emb.size()},
            {"timings", timings_json(timings)}};
}

// ------------------------------------------------------------------- embed

json cmd_embed(Context& ctx) {
    const SceneConfig& c = ctx.scene();
    std::map<std::string, double> timings;
    auto start = Clock::now();
    const TriMesh mesh = with_identity_canonical(build_mesh(c));
    const VoxelGrid grid = build_grid(mesh, c.output.grid_resolution);
    timings["grid_build"] = seconds_since(start);
    if (!mesh.watertight()) throw GeometryError("embed needs a watertight mesh");

    const Aabb box = mesh.bounds().padded(c.sampler.padding * mesh.bounds().diagonal());
    const CounterRng rng(c.sampler.seed);
    std::vector<Vec3> points(static_cast<std::size_t>(c.output.embed_points));
    for (std::size_t i = 0; i < points.size(); ++i)
        for (int a = 0; a < 3; ++a)
            points[i][a] = box.lo[a] + rng.uniform(i, static_cast<std::uint64_t>(a)) * (box.hi[a] - box.lo[a]);
    start = Clock::now();
    const auto emb = body_embeddings(points, mesh, grid);
    timings["embedding"] = seconds_since(start);

    start = Clock::now();
    const NormalizedFrame frame = normalize_frame(mesh);
    std::ofstream out(ctx.artifact("embedding.csv"));
    out << "x,y,z,sdf,grad_x,grad_y,grad_z,canonical_x,canonical_y,canonical_z,face,norm_x,norm_y,norm_z\n";
    char line[512];
    for (std::size_t i = 0; i < emb.size(); ++i) {
        const Vec3& p = points[i];
        const BodyEmbedding& e = emb[i];
        const Vec3 y = frame.apply(p);
        std::snprintf(line, sizeof line,
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%u,%.17g,%.17g,%.17g\n", p.x(),
                      p.y(), p.z(), e.sdf, e.grad.x(), e.grad.y(), e.grad.z(), e.canonical_point.x(),
                      e.canonical_point.y(), e.canonical_point.z(), e.face, y.x(), y.y(), y.z());
        out << line;
    }
    if (!out) throw Error("failed writing embedding.csv");
    timings["export"] = seconds_since(start);

    std::size_t inside = 0;
    for (const auto& e : emb) inside += e.sdf > 0.0;
    return {{"points", emb.size()}, {"inside", inside}, {"canonical", c.canonical_mesh.has_value()},
            {"timings", timings_json(timings)}};
}

// --------------------------------------------------------------- occlusion

json cmd_occlusion(Context& ctx) {
    const SceneConfig& c = ctx.scene();
    std::map<std::string, double> timings;
    auto start = Clock::now();
    const TriMesh mesh = build_mesh(c);
    const Camera cam = render_camera(c);
    const DepthMap probe = rasterize_depth(mesh, cam);
    std::vector<DepthMap> depths;
    for (const CameraSpec& s : c.cameras) depths.push_back(body_depth(s, mesh));
    timings["rasterize"] = seconds_since(start);

    // Probe points sit on the body as seen from the render camera, moved
    // 2 / k toward each source camera so visible points read about sigmoid(2).
    start = Clock::now();
    const double k = c.blend.sharpness;
    const double nudge = 2.0 / k;
    json views = json::array();
    for (std::size_t v = 0; v < c.cameras.size(); ++v) {
        const Camera& src = c.cameras[v].camera;
        std::vector<double> e(probe.depth.size(), 0.0);
        double visible = 0.0;
        std::size_t covered = 0;
        parallel_for(probe.depth.size(), 1024, [&](std::size_t begin, std::size_t end) {
            for (std::size_t idx = begin; idx < end; ++idx) {
                const int i = static_cast<int>(idx % cam.width), j = static_cast<int>(idx / cam.width);
                if (!probe.covered(i, j)) continue;
                const double z = probe.at(i, j);
                const Vec3 pc((i + 0.5 - cam.cx) / cam.fx * z, (j + 0.5 - cam.cy) / cam.fy * z, z);
                const Vec3 x = cam.rotation.transpose() * (pc - cam.translation);
                const Vec3 toward = (src.center() - x).normalized();
                e[idx] = occlusion_prior(x + nudge * toward, src, depths[v], k);
            }
        });
        for (std::size_t idx = 0; idx < e.size(); ++idx)
            if (std::isfinite(probe.depth[idx])) {
                ++covered;
                visible += e[idx] > 0.5;
            }
        const std::string name = "occlusion_" + std::to_string(v);
        write_gray_png(ctx.artifact(name + ".png"), cam.width, cam.height, e);
        if (c.output.write_dpth) write_dpth(ctx.artifact(name + ".dpth"), cam.width, cam.height, e);
        views.push_back({{"camera", v}, {"visible_fraction", covered ? visible / covered : 0.0}});
    }
    timings["occlusion"] = seconds_since(start);
    return {{"width", cam.width}, {"height", cam.height}, {"sharpness", k}, {"views", views},
            {"timings", timings_json(timings)}};
}

// -------------------------------------------------------------- recon-eval

json cmd_recon_eval(Context& ctx) {
    const RunOptions& o = ctx.options;
    const OutputSpec defaults;
    const OutputSpec& out = ctx.config ? ctx.scene().output : defaults;
    const std::uint64_t seed = ctx.config ? ctx.scene().sampler.seed : o.seed.value_or(0);
    std::map<std::string, double> timings;
    auto start = Clock::now();

    TriMesh pred, gt;
    std::string source;
    if (o.pred || o.gt) {
        if (!o.pred || !o.gt) throw UsageError("recon-eval needs both --pred and --gt");
        pred = load_mesh(*o.pred);
        gt = load_mesh(*o.gt);
        source = "files";
    } else {
        if (!ctx.config) throw UsageError("recon-eval needs --pred/--gt or a --config to reconstruct from");
        const SceneConfig& c = ctx.scene();
        gt = build_mesh(c);
        const VoxelGrid grid = build_grid(gt, out.grid_resolution);
        const auto field = build_field(c.field, gt, grid);
        const Isosurface isosurface = extract_isosurface(*field, scene_box(c, gt, *field), out.isosurface_resolution);
        timings["isosurface"] = seconds_since(start);
        if (isosurface.empty) throw GeometryError("the field has no surface at occupancy 0.5");
        pred = isosurface.mesh;
        save_obj(pred, ctx.artifact("isosurface.obj"));
        source = "isosurface";
    }
    start = Clock::now();
    const MeshComparison cmp(pred, gt, out.metric_samples, seed, out.grid_resolution);
    timings["metrics"] = seconds_since(start);
    const double tau = out.fscore_threshold;
    const json report = {{"source", source},
                         {"chamfer", cmp.chamfer() * out.chamfer_scale},
                         {"normal_distance", cmp.normal_distance()},
                         {"uhd", cmp.uhd() * out.chamfer_scale},
                         {"fscore", cmp.fscore(tau)},
                         {"precision", cmp.precision(tau)},
                         {"recall", cmp.recall(tau)},
                         {"fscore_threshold", tau},
                         {"distance_scale", out.chamfer_scale},
                         {"samples_per_mesh", out.metric_samples},
                         {"seed", seed},
                         {"pred_faces", pred.face_count()},
                         {"gt_faces", gt.face_count()}};
    std::ofstream(ctx.artifact("recon_metrics.json")) << report.dump(2) << "\n";
    json summary = report;
    summary["timings"] = timings_json(timings);
    return summary;
}

// ------------------------------------------------------------- img-metrics

json cmd_img_metrics(Context& ctx) {
    const RunOptions& o = ctx.options;
    if (!o.image || !o.reference) throw UsageError("img-metrics needs --image and --reference");
    const Image image = read_image_png(*o.image);
    const Image reference = read_image_png(*o.reference);
    std::optional<Mask> mask;
    if (o.mask) mask = read_mask_png(*o.mask);
    const json report = {{"psnr", psnr(image, reference, mask ? &*mask : nullptr)},
                         {"ssim", ssim(image, reference)},
                         {"masked", mask.has_value()},
                         {"width", image.width},
                         {"height", image.height}};
    std::ofstream(ctx.artifact("image_metrics.json")) << report.dump(2) << "\n";
    return report;
}

// ---------------------------------------------------------------- bench-cp

json cmd_bench_cp(Context& ctx) {
    const RunOptions& o = ctx.options;
    TriMesh mesh;
    int resolution = kDefaultGridResolution;
    int queries = 10000;
    std::uint64_t seed = o.seed.value_or(0);
    double padding = 0.1;
    if (ctx.config) {
        mesh = build_mesh(ctx.scene());
        resolution = ctx.scene().output.grid_resolution;
        queries = ctx.scene().output.bench_queries;
        seed = ctx.scene().sampler.seed;
    } else if (o.mesh) {
        mesh = load_mesh(*o.mesh);
    } else {
        mesh = make_icosphere(4);
    }
    if (o.queries) queries = *o.queries;
    if (queries < 1) throw UsageError("--queries must be >= 1");

    const Aabb box = mesh.bounds().padded(padding * mesh.bounds().diagonal());
    const CounterRng rng(seed);
    std::vector<Vec3> points(static_cast<std::size_t>(queries));
    for (std::size_t i = 0; i < points.size(); ++i)
        for (int a = 0; a < 3; ++a)
            points[i][a] = box.lo[a] + rng.uniform(i, static_cast<std::uint64_t>(a)) * (box.hi[a] - box.lo[a]);

    auto start = Clock::now();
    const VoxelGrid grid = build_grid(mesh, resolution);
    const double build_seconds = seconds_since(start);
    start = Clock::now();
    const auto accel = accel_closest_points(grid, mesh, points);
    const double accel_seconds = seconds_since(start);
    start = Clock::now();
    const auto brute = brute_closest_points(mesh, points);
    const double brute_seconds = seconds_since(start);

    double max_err = 0.0;
    std::size_t face_mismatch = 0;
    std::ofstream bin(ctx.artifact("bench_cp_results.bin"), std::ios::binary);
    for (std::size_t i = 0; i < points.size(); ++i) {
        max_err = std::max(max_err, std::abs(accel[i].distance() - brute[i].distance()));
        face_mismatch += accel[i].face != brute[i].face;
        const double d = accel[i].distance();
        const std::uint32_t f = accel[i].face;
        bin.write(reinterpret_cast<const char*>(&d), sizeof d);
        bin.write(reinterpret_cast<const char*>(&f), sizeof f);
    }
    if (!bin) throw Error("failed writing bench_cp_results.bin");
    const json report = {{"faces", mesh.face_count()},
                         {"queries", queries},
                         {"grid_resolution", resolution},
                         {"grid_build_seconds", build_seconds},
                         {"accel_seconds", accel_seconds},
                         {"brute_seconds", brute_seconds},
                         {"speedup", accel_seconds > 0.0 ? brute_seconds / accel_seconds : 0.0},
                         {"max_abs_error", max_err},
                         {"face_mismatches", face_mismatch},
                         {"seed", seed}};
    std::ofstream(ctx.artifact("bench_cp.json")) << report.dump(2) << "\n";
    return report;
}

using Handler = json (*)(Context&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
    static const std::vector<std::pair<std::string, Handler>> table = {
        {"render", cmd_render},         {"sdf-grid", cmd_sdf_grid},       {"embed", cmd_embed},
        {"occlusion", cmd_occlusion},   {"recon-eval", cmd_recon_eval},   {"img-metrics", cmd_img_metrics},
        {"bench-cp", cmd_bench_cp}};
    return table;
}

bool needs_config(const std::string& command) {
    return command == "render" || command == "sdf-grid" || command == "embed" || command == "occlusion";
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, _] : handlers()) n.push_back(name);
        return n;
    }();
    return names;
}

int run(const std::string& command, const RunOptions& options, std::ostream& out, std::ostream& err) {
    Handler handler = nullptr;
    for (const auto& [name, h] : handlers())
        if (name == command) handler = h;
    if (!handler) {
        err << "error: unknown subcommand '" << command << "'\n";
        return kExitValidation;
    }

    Context ctx{options, std::nullopt, err, {}};
    if (options.config) {
        ValidationResult v = validate_file(*options.config);
        if (!v.ok()) {
            for (const std::string& e : v.errors) err << "config error: " << e << "\n";
            if (options.json) out << json{{"command", command}, {"status", "invalid"}, {"errors", v.errors}}.dump() << "\n";
            return kExitValidation;
        }
        ctx.config = std::move(v.config);
        if (options.seed) ctx.config->sampler.seed = *options.seed;
    } else if (needs_config(command)) {
        err << "error: " << command << " needs --config\n";
        return kExitValidation;
    }

    set_thread_count(options.threads);
    try {
        fs::create_directories(options.out);
        const auto start = Clock::now();
        json summary = handler(ctx);
        summary["command"] = command;
        summary["status"] = "ok";
        summary["seconds"] = seconds_since(start);
        json files = json::array();
        for (const fs::path& p : ctx.artifacts) files.push_back(p.string());
        summary["artifacts"] = files;
        if (options.json)
            out << summary.dump() << "\n";
        else
            err << command << ": wrote " << ctx.artifacts.size() << " artifact(s) to " << options.out.string() << "\n";
        return kExitOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        if (options.json) out << json{{"command", command}, {"status", "invalid"}, {"errors", {e.what()}}}.dump() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        if (options.json) out << json{{"command", command}, {"status", "failed"}, {"errors", {e.what()}}}.dump() << "\n";
        return kExitRuntime;
    }
}

}  // namespace bodyfield::cli
