#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "commands.hpp"

#include "bodyfield/camera.hpp"
#include "bodyfield/image.hpp"
#include "bodyfield/mesh.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

using namespace bodyfield;
using namespace bodyfield::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "bodyfield_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json camera_json(const Vec3& eye) {
    return {{"width", 48},
            {"height", 48},
            {"focal", 60},
            {"look_at", {{"eye", {eye.x(), eye.y(), eye.z()}}, {"target", {0, 0, 0}}, {"up", {0, -1, 0}}}}};
}

json minimal_config() {
    return {{"mesh", {{"generator", "icosphere"}, {"level", 2}, {"radius", 0.5}}},
            {"cameras", json::array({camera_json(Vec3(0, 0, -3))})},
            {"field", {{"name", "uniform_ball"}, {"radius", 0.5}}}};
}

// Two views with silhouette masks so that the render goes through the hull.
fs::path masked_scene(const fs::path& dir) {
    json doc = minimal_config();
    doc["cameras"] = json::array();
    const TriMesh mesh = make_icosphere(2, Vec3::Zero(), 0.5);
    int i = 0;
    for (const Vec3& eye : {Vec3(0, 0, -3), Vec3(3, 0, 0)}) {
        json cam = camera_json(eye);
        const Camera c = Camera::look_at(eye, Vec3::Zero(), Vec3(0, -1, 0), 60, 48, 48);
        const DepthMap depth = rasterize_depth(mesh, c);
        Mask mask(48, 48);
        for (int y = 0; y < 48; ++y)
            for (int x = 0; x < 48; ++x) mask.set(x, y, std::isfinite(depth.at(x, y)));
        const fs::path mask_path = dir / ("mask_" + std::to_string(i++) + ".png");
        write_mask_png(mask_path, mask);
        cam["mask"] = mask_path.filename().string();
        doc["cameras"].push_back(cam);
    }
    doc["sampler"] = {{"samples", 48}, {"seed", 7}};
    const fs::path path = dir / "scene.json";
    write_text(path, doc.dump(2));
    return path;
}

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run_command(const std::string& command, RunOptions options) {
    std::ostringstream out, err;
    const int code = run(command, options, out, err);
    return {code, out.str(), err.str()};
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
    return std::any_of(errors.begin(), errors.end(),
                       [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
    const ValidationResult r = validate(minimal_config(), fs::current_path());
    REQUIRE(r.ok());
    const SceneConfig& c = *r.config;
    CHECK(c.sampler.samples == 256);
    CHECK(c.sampler.seed == 0);
    CHECK(c.blend.sharpness == 50.0);
    CHECK(c.blend.key_width == 16);
    CHECK(c.cameras.size() == 1);
    CHECK_FALSE(c.canonical_mesh);
}

TEST_CASE("a missing mesh file is a single error naming the path") {
    json doc = minimal_config();
    doc["mesh"] = "does_not_exist.obj";
    const ValidationResult r = validate(doc, scratch("missing"));
    CHECK_FALSE(r.ok());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].find("$.mesh") != std::string::npos);
    CHECK(r.errors[0].find("does_not_exist.obj") != std::string::npos);
}

TEST_CASE("all errors are collected") {
    json doc = minimal_config();
    doc["sampler"] = {{"samples", 1}};
    doc["field"]["name"] = "no_such_field";
    doc["cameras"][0]["bogus"] = 3;
    const ValidationResult r = validate(doc, fs::current_path());
    CHECK_FALSE(r.config);
    CHECK(r.errors.size() == 3);
    CHECK(mentions(r.errors, "$.sampler.samples"));
    CHECK(mentions(r.errors, "$.field.name"));
    CHECK(mentions(r.errors, "$.cameras[0].bogus"));

    json empty_cams = minimal_config();
    empty_cams["cameras"] = json::array();
    CHECK(mentions(validate(empty_cams, fs::current_path()).errors, "$.cameras"));
    CHECK_FALSE(validate(json::array(), fs::current_path()).ok());
}

TEST_CASE("emit is a fixed point of validate") {
    const fs::path dir = scratch("roundtrip");
    const fs::path scene = masked_scene(dir);
    const ValidationResult first = validate_file(scene);
    REQUIRE(first.ok());
    const json once = emit(*first.config);
    const ValidationResult second = validate(once, fs::path("/"));
    REQUIRE(second.ok());
    const json twice = emit(*second.config);
    CHECK(once == twice);
    CHECK(once.at("cameras").at(0).contains("rotation"));
    CHECK(once.at("sampler").at("samples") == 48);
    CHECK(fs::path(once.at("cameras").at(1).at("mask").get<std::string>()).is_absolute());
}

TEST_CASE("exit codes: 0 success, 1 validation, 2 runtime") {
    const fs::path dir = scratch("exit");
    write_text(dir / "bad.json", "{\"mesh\": \"nowhere.obj\"}");
    write_text(dir / "broken.json", "{ not json");
    write_text(dir / "open.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    json open = minimal_config();
    open["mesh"] = "open.obj";
    write_text(dir / "open.json", open.dump());
    write_text(dir / "good.json", minimal_config().dump());

    RunOptions o;
    o.out = dir / "out";
    o.config = dir / "bad.json";
    CHECK(run_command("render", o).code == kExitValidation);
    o.config = dir / "broken.json";
    CHECK(run_command("render", o).code == kExitValidation);
    o.config.reset();
    CHECK(run_command("render", o).code == kExitValidation);
    CHECK(run_command("no-such-command", o).code == kExitValidation);

    o.config = dir / "open.json";
    const Outcome runtime = run_command("sdf-grid", o);
    CHECK(runtime.code == kExitRuntime);
    CHECK(runtime.err.find("watertight") != std::string::npos);

    o.config = dir / "good.json";
    o.json = true;
    const Outcome ok = run_command("embed", o);
    CHECK(ok.code == kExitOk);
    const json summary = json::parse(ok.out);
    CHECK(summary.at("status") == "ok");
    CHECK(fs::exists(dir / "out" / "embedding.csv"));

    RunOptions img;
    img.out = dir / "out";
    img.image = dir / "missing.png";
    img.reference = dir / "missing.png";
    CHECK(run_command("img-metrics", img).code != kExitOk);
}

TEST_CASE("render writes images, alpha, depth and per-stage timings") {
    const fs::path dir = scratch("render");
    RunOptions o;
    o.config = masked_scene(dir);
    o.out = dir / "out";
    o.json = true;
    const Outcome r = run_command("render", o);
    REQUIRE(r.code == kExitOk);
    const json summary = json::parse(r.out);
    CHECK(summary.at("hull") == true);
    for (const char* stage : {"grid_build", "sampling", "field_eval", "integration", "blend", "export"})
        CHECK(summary.at("timings").contains(stage));
    for (const char* name : {"render.png", "render_rgba.png", "alpha.dpth", "depth.dpth"})
        CHECK(fs::exists(o.out / name));
    const DepthMap alpha = read_depth_map(o.out / "alpha.dpth");
    CHECK(alpha.width == 48);
    CHECK(summary.at("mean_alpha").get<double>() > 0.05);
}

TEST_CASE("render and bench-cp artifacts are byte-identical across runs and thread counts") {
    const fs::path dir = scratch("determinism");
    const fs::path scene = masked_scene(dir);
    auto artifacts = [&](const std::string& command, unsigned threads, const std::string& tag) {
        RunOptions o;
        o.config = scene;
        o.out = dir / (command + tag);
        o.threads = threads;
        o.queries = 3000;
        REQUIRE(run_command(command, o).code == kExitOk);
        std::map<std::string, std::string> files;
        for (const auto& entry : fs::directory_iterator(o.out))
            if (entry.path().filename() != "bench_cp.json")
                files[entry.path().filename().string()] = read_bytes(entry.path());
        return files;
    };
    for (const std::string command : {"render", "bench-cp"}) {
        const auto a = artifacts(command, 1, "_a");
        const auto b = artifacts(command, 1, "_b");
        const auto c = artifacts(command, 4, "_c");
        CHECK(!a.empty());
        CHECK(a == b);
        CHECK(a == c);
    }
}

TEST_CASE("bench-cp agrees exactly with the brute-force oracle") {
    const fs::path dir = scratch("bench");
    write_text(dir / "scene.json", minimal_config().dump());
    RunOptions o;
    o.config = dir / "scene.json";
    o.out = dir / "out";
    o.queries = 2000;
    o.json = true;
    const Outcome r = run_command("bench-cp", o);
    REQUIRE(r.code == kExitOk);
    const json report = json::parse(read_bytes(o.out / "bench_cp.json"));
    for (const char* key : {"faces", "queries", "grid_resolution", "accel_seconds", "brute_seconds", "speedup"})
        CHECK(report.contains(key));
    CHECK(report.at("max_abs_error").get<double>() == 0.0);
    CHECK(report.at("face_mismatches") == 0);
    CHECK(report.at("queries") == 2000);
}

TEST_CASE("seed override changes the render only through the sampler") {
    const fs::path dir = scratch("seed");
    const fs::path scene = masked_scene(dir);
    auto render = [&](std::uint64_t seed, const std::string& tag) {
        RunOptions o;
        o.config = scene;
        o.out = dir / tag;
        o.seed = seed;
        REQUIRE(run_command("render", o).code == kExitOk);
        return read_bytes(o.out / "alpha.dpth");
    };
    CHECK(render(3, "a") == render(3, "b"));
    CHECK(render(3, "c") != render(4, "d"));
}
