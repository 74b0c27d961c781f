#include "config.hpp"

#include <fstream>
#include <set>

namespace bodyfield::cli {

namespace fs = std::filesystem;

namespace {

class Reader {
public:
    Reader(std::vector<std::string>& errors, fs::path base) : errors_(errors), base_(std::move(base)) {}

    void error(const std::string& path, const std::string& message) { errors_.push_back(path + ": " + message); }

    const json* object(const json& parent, const std::string& key, const std::string& path, bool required) {
        if (!parent.contains(key)) {
            if (required) error(path, "required field missing");
            return nullptr;
        }
        const json& v = parent.at(key);
        if (!v.is_object()) {
            error(path, "expected an object");
            return nullptr;
        }
        return &v;
    }

    void known_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, _] : obj.items())
            if (!allowed.count(k)) error(join(path, k), "unknown field");
    }

    template <class T>
    void number(const json& obj, const std::string& key, const std::string& path, T& out, double lo,
                double hi = kInf, bool lo_open = false) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        const std::string p = join(path, key);
        if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) return error(p, "expected an integer");
        } else {
            if (!v.is_number()) return error(p, "expected a number");
        }
        const double x = v.get<double>();
        if (!std::isfinite(x) || x < lo || x > hi || (lo_open && x == lo))
            return error(p, "value " + v.dump() + " out of range " + (lo_open ? "(" : "[") + fmt(lo) + ", " +
                                fmt(hi) + "]");
        out = v.get<T>();
    }

    void boolean(const json& obj, const std::string& key, const std::string& path, bool& out) {
        if (!obj.contains(key)) return;
        if (!obj.at(key).is_boolean()) return error(join(path, key), "expected true or false");
        out = obj.at(key).get<bool>();
    }

    void string(const json& obj, const std::string& key, const std::string& path, std::string& out) {
        if (!obj.contains(key)) return;
        if (!obj.at(key).is_string()) return error(join(path, key), "expected a string");
        out = obj.at(key).get<std::string>();
    }

    bool vec3(const json& obj, const std::string& key, const std::string& path, Vec3& out) {
        if (!obj.contains(key)) return false;
        const json& v = obj.at(key);
        if (!v.is_array() || v.size() != 3 || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
            error(join(path, key), "expected an array of 3 numbers");
            return false;
        }
        out = Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
        return true;
    }

    bool mat3(const json& obj, const std::string& key, const std::string& path, Mat3& out) {
        if (!obj.contains(key)) return false;
        const json& v = obj.at(key);
        bool ok = v.is_array() && v.size() == 3;
        for (std::size_t r = 0; ok && r < 3; ++r) {
            ok = v[r].is_array() && v[r].size() == 3;
            for (std::size_t c = 0; ok && c < 3; ++c) {
                ok = v[r][c].is_number();
                if (ok) out(r, c) = v[r][c].get<double>();
            }
        }
        if (!ok) error(join(path, key), "expected a 3x3 array of numbers (rows)");
        return ok;
    }

    std::optional<fs::path> file(const json& obj, const std::string& key, const std::string& path) {
        if (!obj.contains(key)) return std::nullopt;
        const std::string p = join(path, key);
        if (!obj.at(key).is_string()) {
            error(p, "expected a file path string");
            return std::nullopt;
        }
        fs::path f = obj.at(key).get<std::string>();
        if (f.is_relative()) f = base_ / f;
        f = f.lexically_normal();
        if (!fs::is_regular_file(f)) {
            error(p, "file not found: " + f.string());
            return std::nullopt;
        }
        return f;
    }

    static std::string join(const std::string& path, const std::string& key) { return path + "." + key; }

private:
    static std::string fmt(double x) {
        if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
        json j = x;
        return j.dump();
    }

    std::vector<std::string>& errors_;
    fs::path base_;
};

void read_mesh(Reader& r, const json& doc, MeshSource& mesh) {
    if (!doc.contains("mesh")) return r.error("$.mesh", "required field missing");
    const json& m = doc.at("mesh");
    if (m.is_string()) {
        if (auto f = r.file(doc, "mesh", "$")) mesh.path = *f;
        return;
    }
    if (!m.is_object()) return r.error("$.mesh", "expected a file path or a generator object");
    const std::string p = "$.mesh";
    r.known_keys(m, p, {"generator", "level", "slices", "stacks", "major_segments", "minor_segments", "radius", "edge",
                        "major_radius", "minor_radius", "center"});
    r.string(m, "generator", p, mesh.generator);
    static const std::set<std::string> generators = {"icosphere", "cube", "torus", "uv_sphere"};
    if (!generators.count(mesh.generator))
        r.error(p + ".generator", "expected one of icosphere, cube, torus, uv_sphere");
    r.number(m, "level", p, mesh.level, 0, 7);
    r.number(m, "slices", p, mesh.slices, 3, 4096);
    r.number(m, "stacks", p, mesh.stacks, 3, 4096);
    r.number(m, "major_segments", p, mesh.major_segments, 3, 4096);
    r.number(m, "minor_segments", p, mesh.minor_segments, 3, 4096);
    r.number(m, "radius", p, mesh.radius, 0.0, kInf, true);
    r.number(m, "edge", p, mesh.edge, 0.0, kInf, true);
    r.number(m, "major_radius", p, mesh.major_radius, 0.0, kInf, true);
    r.number(m, "minor_radius", p, mesh.minor_radius, 0.0, kInf, true);
    r.vec3(m, "center", p, mesh.center);
    if (mesh.generator == "torus" && mesh.minor_radius >= mesh.major_radius)
        r.error(p + ".minor_radius", "must be smaller than major_radius");
}

void read_camera(Reader& r, const json& c, const std::string& p, CameraSpec& spec) {
    r.known_keys(c, p, {"width", "height", "fx", "fy", "cx", "cy", "focal", "rotation", "translation", "look_at",
                        "image", "mask", "depth"});
    Camera& cam = spec.camera;
    cam.width = cam.height = 0;
    if (!c.contains("width")) r.error(p + ".width", "required field missing");
    if (!c.contains("height")) r.error(p + ".height", "required field missing");
    r.number(c, "width", p, cam.width, 1, 16384);
    r.number(c, "height", p, cam.height, 1, 16384);
    cam.cx = 0.5 * cam.width;
    cam.cy = 0.5 * cam.height;
    double focal = 0.0;
    r.number(c, "focal", p, focal, 0.0, kInf, true);
    cam.fx = cam.fy = focal > 0.0 ? focal : std::max(cam.width, cam.height);
    r.number(c, "fx", p, cam.fx, 0.0, kInf, true);
    r.number(c, "fy", p, cam.fy, 0.0, kInf, true);
    r.number(c, "cx", p, cam.cx, -kInf);
    r.number(c, "cy", p, cam.cy, -kInf);

    const bool explicit_pose = c.contains("rotation") || c.contains("translation");
    if (c.contains("look_at")) {
        if (explicit_pose) r.error(p + ".look_at", "give either look_at or rotation/translation, not both");
        const json& la = c.at("look_at");
        if (!la.is_object()) {
            r.error(p + ".look_at", "expected an object with eye, target, up");
        } else {
            const std::string q = p + ".look_at";
            r.known_keys(la, q, {"eye", "target", "up"});
            Vec3 eye = Vec3::Zero(), target = Vec3::Zero(), up = -Vec3::UnitY();
            if (!r.vec3(la, "eye", q, eye)) r.error(q + ".eye", "required field missing");
            r.vec3(la, "target", q, target);
            r.vec3(la, "up", q, up);
            const Vec3 fwd = target - eye;
            if (fwd.norm() == 0.0 || fwd.cross(up).norm() < 1e-12 * fwd.norm() * up.norm()) {
                r.error(q, "eye, target and up must define a camera frame");
            } else if (cam.width > 0 && cam.height > 0) {
                const Camera base = Camera::look_at(eye, target, up, cam.fx, cam.width, cam.height);
                cam.rotation = base.rotation;
                cam.translation = base.translation;
            }
        }
    } else {
        r.mat3(c, "rotation", p, cam.rotation);
        r.vec3(c, "translation", p, cam.translation);
    }
    if (cam.width > 0 && cam.height > 0) {
        try {
            cam.validate();
        } catch (const Error& e) {
            r.error(p, e.what());
        }
    }
    spec.image = r.file(c, "image", p);
    spec.mask = r.file(c, "mask", p);
    spec.depth = r.file(c, "depth", p);
}

void read_field(Reader& r, const json& doc, FieldSpec& field) {
    const json* f = r.object(doc, "field", "$.field", true);
    if (!f) return;
    const std::string p = "$.field";
    r.known_keys(*f, p, {"name", "center", "radius", "s", "width", "sigma", "color"});
    if (!f->contains("name")) r.error(p + ".name", "required field missing");
    r.string(*f, "name", p, field.name);
    static const std::set<std::string> names = {"uniform_ball", "gaussian_blob", "mesh_shell", "empty"};
    if (!names.count(field.name)) r.error(p + ".name", "expected one of uniform_ball, gaussian_blob, mesh_shell, empty");
    r.vec3(*f, "center", p, field.center);
    r.number(*f, "radius", p, field.radius, 0.0, kInf, true);
    r.number(*f, "s", p, field.s, 0.0, kInf, true);
    r.number(*f, "width", p, field.width, 0.0, kInf, true);
    r.number(*f, "sigma", p, field.sigma, 0.0);
    if (r.vec3(*f, "color", p, field.color) && ((field.color.array() < 0.0).any() || (field.color.array() > 1.0).any()))
        r.error(p + ".color", "components must lie in [0, 1]");
}

void read_sampler(Reader& r, const json& doc, SamplerSpec& s) {
    const json* o = r.object(doc, "sampler", "$.sampler", false);
    if (!o) return;
    const std::string p = "$.sampler";
    r.known_keys(*o, p, {"samples", "seed", "dilation_radius", "padding", "hull_probes", "use_hull"});
    r.number(*o, "samples", p, s.samples, 2, 1 << 20);
    if (o->contains("seed")) {
        const json& v = o->at("seed");
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))
            s.seed = v.get<std::uint64_t>();
        else
            r.error(p + ".seed", "expected a non-negative integer");
    }
    if (o->contains("dilation_radius")) {
        double d = 0.0;
        r.number(*o, "dilation_radius", p, d, 0.0);
        s.dilation_radius = d;
    }
    r.number(*o, "padding", p, s.padding, 0.0, 10.0);
    r.number(*o, "hull_probes", p, s.hull_probes, 2, 1 << 16);
    r.boolean(*o, "use_hull", p, s.use_hull);
}

void read_blend(Reader& r, const json& doc, BlendSpec& b) {
    const json* o = r.object(doc, "blend", "$.blend", false);
    if (!o) return;
    const std::string p = "$.blend";
    r.known_keys(*o, p, {"enabled", "sharpness", "key_width", "octaves", "logit_mode"});
    r.boolean(*o, "enabled", p, b.enabled);
    r.number(*o, "sharpness", p, b.sharpness, 0.0, kInf, true);
    r.number(*o, "key_width", p, b.key_width, 1, 4096);
    r.number(*o, "octaves", p, b.octaves, 0, 30);
    std::string mode = b.logit_mode == LogitMode::Log ? "log" : "multiplicative";
    r.string(*o, "logit_mode", p, mode);
    if (mode == "multiplicative")
        b.logit_mode = LogitMode::Multiplicative;
    else if (mode == "log")
        b.logit_mode = LogitMode::Log;
    else
        r.error(p + ".logit_mode", "expected multiplicative or log");
}

void read_output(Reader& r, const json& doc, OutputSpec& out) {
    const json* o = r.object(doc, "output", "$.output", false);
    if (!o) return;
    const std::string p = "$.output";
    r.known_keys(*o, p, {"render_camera", "width", "height", "grid_resolution", "sdf_resolution", "sdf_gradient",
                         "sdf_canonical", "isosurface_resolution", "write_dpth", "metric_samples", "chamfer_scale",
                         "fscore_threshold", "embed_points", "bench_queries"});
    r.number(*o, "render_camera", p, out.render_camera, 0, 1 << 20);
    if (o->contains("width")) {
        int w = 0;
        r.number(*o, "width", p, w, 1, 16384);
        if (w > 0) out.width = w;
    }
    if (o->contains("height")) {
        int h = 0;
        r.number(*o, "height", p, h, 1, 16384);
        if (h > 0) out.height = h;
    }
    r.number(*o, "grid_resolution", p, out.grid_resolution, 1, 1024);
    r.number(*o, "sdf_resolution", p, out.sdf_resolution, 2, 1024);
    r.boolean(*o, "sdf_gradient", p, out.sdf_gradient);
    r.boolean(*o, "sdf_canonical", p, out.sdf_canonical);
    r.number(*o, "isosurface_resolution", p, out.isosurface_resolution, 8, 2048);
    r.boolean(*o, "write_dpth", p, out.write_dpth);
    r.number(*o, "metric_samples", p, out.metric_samples, 1, 1e9);
    r.number(*o, "chamfer_scale", p, out.chamfer_scale, 0.0, kInf, true);
    r.number(*o, "fscore_threshold", p, out.fscore_threshold, 0.0, kInf, true);
    r.number(*o, "embed_points", p, out.embed_points, 1, 1 << 26);
    r.number(*o, "bench_queries", p, out.bench_queries, 1, 1 << 26);
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json mat_json(const Mat3& m) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
    return rows;
}

}  // namespace

ValidationResult validate(const json& doc, const fs::path& base_dir) {
    ValidationResult result;
    if (!doc.is_object()) {
        result.errors.push_back("$: expected a JSON object");
        return result;
    }
    SceneConfig c;
    Reader r(result.errors, base_dir);
    r.known_keys(doc, "$", {"mesh", "canonical_mesh", "cameras", "field", "sampler", "blend", "output"});
    read_mesh(r, doc, c.mesh);
    c.canonical_mesh = r.file(doc, "canonical_mesh", "$");
    if (c.canonical_mesh && !c.mesh.generator.empty())
        r.error("$.canonical_mesh", "a canonical mesh needs a mesh file, not a generator");

    if (!doc.contains("cameras")) {
        r.error("$.cameras", "required field missing");
    } else if (!doc.at("cameras").is_array() || doc.at("cameras").empty()) {
        r.error("$.cameras", "expected a non-empty array");
    } else {
        const json& cams = doc.at("cameras");
        for (std::size_t i = 0; i < cams.size(); ++i) {
            const std::string p = "$.cameras[" + std::to_string(i) + "]";
            if (!cams[i].is_object()) {
                r.error(p, "expected an object");
                continue;
            }
            CameraSpec spec;
            read_camera(r, cams[i], p, spec);
            c.cameras.push_back(std::move(spec));
        }
    }
    read_field(r, doc, c.field);
    read_sampler(r, doc, c.sampler);
    read_blend(r, doc, c.blend);
    read_output(r, doc, c.output);
    if (!c.cameras.empty() && c.output.render_camera >= static_cast<int>(c.cameras.size()))
        r.error("$.output.render_camera", "index " + std::to_string(c.output.render_camera) + " but only " +
                                              std::to_string(c.cameras.size()) + " cameras");
    if (c.blend.enabled)
        for (std::size_t i = 0; i < c.cameras.size(); ++i)
            if (!c.cameras[i].image)
                r.error("$.cameras[" + std::to_string(i) + "].image", "blending needs an image for every camera");
    if (result.errors.empty()) result.config = std::move(c);
    return result;
}

ValidationResult validate_file(const fs::path& path) {
    ValidationResult result;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        result.errors.push_back("cannot read config file " + path.string());
        return result;
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        result.errors.push_back(path.string() + ": invalid JSON: " + e.what());
        return result;
    }
    return validate(doc, fs::absolute(path).parent_path());
}

json emit(const SceneConfig& c) {
    json doc;
    if (c.mesh.generator.empty()) {
        doc["mesh"] = fs::absolute(c.mesh.path).string();
    } else {
        const MeshSource& m = c.mesh;
        json g = {{"generator", m.generator}, {"center", vec_json(m.center)}};
        if (m.generator == "icosphere") g.update({{"level", m.level}, {"radius", m.radius}});
        if (m.generator == "cube") g["edge"] = m.edge;
        if (m.generator == "uv_sphere") g.update({{"slices", m.slices}, {"stacks", m.stacks}, {"radius", m.radius}});
        if (m.generator == "torus")
            g.update({{"major_radius", m.major_radius}, {"minor_radius", m.minor_radius},
                      {"major_segments", m.major_segments}, {"minor_segments", m.minor_segments}});
        doc["mesh"] = g;
    }
    if (c.canonical_mesh) doc["canonical_mesh"] = fs::absolute(*c.canonical_mesh).string();
    json cams = json::array();
    for (const CameraSpec& s : c.cameras) {
        const Camera& k = s.camera;
        json j = {{"width", k.width}, {"height", k.height}, {"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
                  {"rotation", mat_json(k.rotation)}, {"translation", vec_json(k.translation)}};
        if (s.image) j["image"] = fs::absolute(*s.image).string();
        if (s.mask) j["mask"] = fs::absolute(*s.mask).string();
        if (s.depth) j["depth"] = fs::absolute(*s.depth).string();
        cams.push_back(j);
    }
    doc["cameras"] = cams;
    const FieldSpec& f = c.field;
    doc["field"] = {{"name", f.name}, {"center", vec_json(f.center)}, {"radius", f.radius}, {"s", f.s},
                    {"width", f.width}, {"sigma", f.sigma}, {"color", vec_json(f.color)}};
    const SamplerSpec& s = c.sampler;
    doc["sampler"] = {{"samples", s.samples}, {"seed", s.seed}, {"padding", s.padding},
                      {"hull_probes", s.hull_probes}, {"use_hull", s.use_hull}};
    if (s.dilation_radius) doc["sampler"]["dilation_radius"] = *s.dilation_radius;
    const BlendSpec& b = c.blend;
    doc["blend"] = {{"enabled", b.enabled}, {"sharpness", b.sharpness}, {"key_width", b.key_width},
                    {"octaves", b.octaves},
                    {"logit_mode", b.logit_mode == LogitMode::Log ? "log" : "multiplicative"}};
    const OutputSpec& o = c.output;
    doc["output"] = {{"render_camera", o.render_camera},
                     {"grid_resolution", o.grid_resolution},
                     {"sdf_resolution", o.sdf_resolution},
                     {"sdf_gradient", o.sdf_gradient},
                     {"sdf_canonical", o.sdf_canonical},
                     {"isosurface_resolution", o.isosurface_resolution},
                     {"write_dpth", o.write_dpth},
                     {"metric_samples", o.metric_samples},
                     {"chamfer_scale", o.chamfer_scale},
                     {"fscore_threshold", o.fscore_threshold},
                     {"embed_points", o.embed_points},
                     {"bench_queries", o.bench_queries}};
    if (o.width) doc["output"]["width"] = *o.width;
    if (o.height) doc["output"]["height"] = *o.height;
    return doc;
}

}  // namespace bodyfield::cli
