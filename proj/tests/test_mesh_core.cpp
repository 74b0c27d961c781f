#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bodyfield/camera.hpp"
#include "bodyfield/intersect.hpp"
#include "bodyfield/parallel.hpp"
#include "test_util.hpp"

#include <cstring>
#include <fstream>
#include <map>

using namespace bodyfield;
using namespace bodyfield::testing;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p) << s;
}

void write_ply(const TriMesh& m, const std::filesystem::path& p, bool binary) {
    std::ofstream out(p, std::ios::binary);
    out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
        << "comment test\nelement vertex " << m.vertex_count()
        << "\nproperty double x\nproperty double y\nproperty double z\nproperty uchar red\n"
        << "element face " << m.face_count() << "\nproperty list uchar int vertex_indices\nend_header\n";
    for (const Vec3& v : m.vertices()) {
        if (binary) {
            out.write(reinterpret_cast<const char*>(v.data()), 24);
            const unsigned char red = 7;
            out.write(reinterpret_cast<const char*>(&red), 1);
        } else {
            out.precision(17);
            out << v.x() << ' ' << v.y() << ' ' << v.z() << " 7\n";
        }
    }
    for (const Face& f : m.faces()) {
        if (binary) {
            const unsigned char n = 3;
            out.write(reinterpret_cast<const char*>(&n), 1);
            for (std::uint32_t i : f) {
                const std::int32_t k = static_cast<std::int32_t>(i);
                out.write(reinterpret_cast<const char*>(&k), 4);
            }
        } else {
            out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
        }
    }
}

// Independent edge tally: every undirected edge used exactly twice with
// opposite directions.
bool tally_watertight(const TriMesh& m) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> forward, backward;
    for (const Face& f : m.faces())
        for (int j = 0; j < 3; ++j) {
            const std::uint32_t a = f[j], b = f[(j + 1) % 3];
            if (a < b) ++forward[{a, b}];
            else ++backward[{b, a}];
        }
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> all;
    for (auto& [k, v] : forward) all[k] += 0;
    for (auto& [k, v] : backward) all[k] += 0;
    for (auto& [k, v] : all) {
        const int fw = forward.count(k) ? forward[k] : 0;
        const int bw = backward.count(k) ? backward[k] : 0;
        if (fw != 1 || bw != 1) return false;
    }
    return true;
}

TriMesh concat(const TriMesh& a, const TriMesh& b) {
    std::vector<Vec3> v(a.vertices().begin(), a.vertices().end());
    std::vector<Face> f(a.faces().begin(), a.faces().end());
    const auto off = static_cast<std::uint32_t>(v.size());
    v.insert(v.end(), b.vertices().begin(), b.vertices().end());
    for (Face g : b.faces()) f.push_back({g[0] + off, g[1] + off, g[2] + off});
    return TriMesh(std::move(v), std::move(f));
}

double signed_volume(const TriMesh& m) {
    double vol = 0.0;
    for (std::size_t f = 0; f < m.face_count(); ++f) {
        const auto [a, b, c] = m.triangle(f);
        vol += a.dot(b.cross(c)) / 6.0;
    }
    return vol;
}

}  // namespace

TEST_CASE("load_mesh reads a cube OBJ") {
    const auto dir = temp_dir("mesh_obj");
    save_obj(make_cube(), dir / "cube.obj");
    const TriMesh m = load_mesh(dir / "cube.obj");
    CHECK(m.vertex_count() == 8);
    CHECK(m.face_count() == 12);
    CHECK(m.vertices()[7].isApprox(Vec3(0.5, 0.5, 0.5)));
}

TEST_CASE("load_mesh handles OBJ slash records, quads and negative indices") {
    const auto dir = temp_dir("mesh_obj2");
    write_text(dir / "quad.obj",
               "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nf 1/1/1 2/1/1 3/1/1 4/1/1\nf -4 -2 -1\n");
    const TriMesh m = load_mesh(dir / "quad.obj");
    CHECK(m.face_count() == 3);
    CHECK(m.faces()[1] == Face{0, 2, 3});
    CHECK(m.faces()[2] == Face{0, 2, 3});
}

TEST_CASE("load_mesh rejects out-of-range face indices with the line number") {
    const auto dir = temp_dir("mesh_bad");
    std::string text;
    for (int i = 0; i < 8; ++i) text += "v " + std::to_string(i % 2) + " " + std::to_string(i / 2 % 2) + " " + std::to_string(i / 4) + "\n";
    text += "f 1 2 9\n";
    write_text(dir / "bad.obj", text);
    try {
        load_mesh(dir / "bad.obj");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":9:") != std::string::npos);
        CHECK(msg.find("out of range") != std::string::npos);
    }
}

TEST_CASE("degenerate faces are rejected with their indices") {
    std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {2, 0, 0}};
    std::vector<Face> f = {{0, 1, 2}, {0, 1, 3}};
    try {
        TriMesh m(v, f);
        FAIL("expected a degenerate-face error");
    } catch (const GeometryError& e) {
        CHECK(std::string(e.what()).find(": 1") != std::string::npos);
    }
}

TEST_CASE("icosphere counts follow 20 * 4^n and survive PLY round trips") {
    const TriMesh ico = make_icosphere(3);
    CHECK(ico.face_count() == 20u * 64u);
    CHECK(ico.vertex_count() == 642);
    CHECK(signed_volume(ico) > 0.0);

    const auto dir = temp_dir("mesh_ply");
    for (bool binary : {false, true}) {
        const auto path = dir / (binary ? "ico_bin.ply" : "ico_ascii.ply");
        write_ply(ico, path, binary);
        const TriMesh m = load_mesh(path);
        REQUIRE(m.vertex_count() == 642);
        REQUIRE(m.face_count() == 1280);
        CHECK(std::equal(m.faces().begin(), m.faces().end(), ico.faces().begin()));
        for (std::size_t i = 0; i < m.vertex_count(); ++i)
            CHECK((m.vertices()[i] - ico.vertices()[i]).norm() < 1e-15);
    }
}

TEST_CASE("truncated binary PLY reports the offset") {
    const auto dir = temp_dir("mesh_ply_trunc");
    write_ply(make_cube(), dir / "cube.ply", true);
    std::filesystem::resize_file(dir / "cube.ply", std::filesystem::file_size(dir / "cube.ply") - 5);
    CHECK_THROWS_WITH_AS(load_mesh(dir / "cube.ply"), doctest::Contains("offset"), ParseError);
}

TEST_CASE("generated primitives are outward-oriented and watertight") {
    for (const TriMesh& m : {make_cube(), make_icosphere(2), make_torus(1.0, 0.3, 24, 12),
                             make_uv_sphere(16, 9)}) {
        CHECK(is_watertight(m));
        CHECK(tally_watertight(m));
        CHECK(signed_volume(m) > 0.0);
    }
    CHECK(make_uv_sphere(250, 101).face_count() == 50000);
}

TEST_CASE("is_watertight matches an independent edge tally") {
    const TriMesh cube = make_cube();
    CHECK(is_watertight(cube));

    std::vector<Face> open(cube.faces().begin() + 1, cube.faces().end());
    CHECK_FALSE(is_watertight(open));
    CHECK_FALSE(tally_watertight(TriMesh(std::vector<Vec3>(cube.vertices().begin(), cube.vertices().end()), open)));

    const TriMesh two = concat(make_icosphere(1), make_icosphere(1, Vec3(5, 0, 0)));
    CHECK(tally_watertight(two));
    CHECK(is_watertight(two));

    // Flipping one face breaks the opposite-orientation requirement.
    std::vector<Face> flipped(cube.faces().begin(), cube.faces().end());
    std::swap(flipped[3][1], flipped[3][2]);
    CHECK_FALSE(is_watertight(flipped));
}

TEST_CASE("canonical buffers must share topology") {
    const TriMesh a = make_icosphere(1);
    const TriMesh b = make_icosphere(1, Vec3(1, 2, 3), 2.0);
    const TriMesh paired = a.with_canonical(b);
    CHECK(paired.has_canonical());
    CHECK(paired.canonical_vertices()[5].isApprox(b.vertices()[5]));
    CHECK_THROWS_AS(a.with_canonical(make_icosphere(2)), GeometryError);
    CHECK_THROWS_AS(a.canonical_vertices(), GeometryError);
}

TEST_CASE("intersect_ray through a unit cube") {
    const TriMesh cube = make_cube();
    const VoxelGrid grid = build_grid(cube, 8);
    const auto hits = intersect_ray(cube, grid, Vec3(-2, 0, 0), Vec3::UnitX());
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].t == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(hits[1].t == doctest::Approx(2.5).epsilon(1e-12));
    for (const RayHit& h : hits) {
        CHECK(h.barycentric.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(h.barycentric.minCoeff() >= -1e-9);
    }
    CHECK(intersect_ray(cube, grid, Vec3(-2, 3, 0), Vec3::UnitX()).empty());
    CHECK_THROWS_AS(intersect_ray(cube, grid, Vec3::Zero(), Vec3(2, 0, 0)), GeometryError);
}

TEST_CASE("grazing rays give deterministic results") {
    const TriMesh cube = make_cube();
    const VoxelGrid grid = build_grid(cube, 8);
    // Runs along the top-front edge of the cube.
    const Vec3 origin(-2, 0.5, 0.5);
    const auto first = intersect_ray(cube, grid, origin, Vec3::UnitX());
    const auto second = intersect_ray(cube, grid, origin, Vec3::UnitX());
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].face == second[i].face);
        CHECK(first[i].t == second[i].t);
    }
    const auto brute = intersect_ray_brute(cube, origin, Vec3::UnitX());
    CHECK(brute.size() == first.size());
}

TEST_CASE("grid ray casting equals the brute-force intersector") {
    const TriMesh ico = radially_perturbed(make_icosphere(3), Vec3::Zero(), 0.1, 3);
    const VoxelGrid grid = build_grid(ico, 16);
    std::mt19937_64 rng(11);
    const Aabb box = ico.bounds().padded(0.5);
    int total_hits = 0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 o = uniform_in(rng, box);
        const Vec3 target = uniform_in(rng, ico.bounds());
        const Vec3 d = (target - o).normalized();
        const auto a = intersect_ray(ico, grid, o, d);
        const auto b = intersect_ray_brute(ico, o, d);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].face == b[k].face);
            CHECK(a[k].t == b[k].t);
            const Face& f = ico.faces()[a[k].face];
            const Vec3 p = a[k].barycentric[0] * ico.vertices()[f[0]] + a[k].barycentric[1] * ico.vertices()[f[1]] +
                           a[k].barycentric[2] * ico.vertices()[f[2]];
            CHECK((p - (o + a[k].t * d)).norm() < 1e-7 * box.diagonal());
        }
        total_hits += static_cast<int>(a.size());
    }
    CHECK(total_hits > 10000);
}

TEST_CASE("camera validation and projection") {
    Camera cam = Camera::look_at(Vec3(0, 0, -5), Vec3::Zero(), Vec3(0, -1, 0), 100, 64, 48);
    CHECK_NOTHROW(cam.validate());
    CHECK(cam.center().isApprox(Vec3(0, 0, -5)));
    const auto uv = cam.project(Vec3::Zero());
    REQUIRE(uv);
    CHECK(uv->x() == doctest::Approx(32));
    CHECK(uv->y() == doctest::Approx(24));
    CHECK_FALSE(cam.project(Vec3(0, 0, -6)));
    const Ray r = cam.ray_through(10.0, 7.0);
    const auto back = cam.project(r.at(3.0));
    CHECK(back->x() == doctest::Approx(10.0));
    CHECK(back->y() == doctest::Approx(7.0));

    Camera bad = cam;
    bad.cx = 64;
    CHECK_THROWS_AS(bad.validate(), GeometryError);
    bad = cam;
    bad.rotation(0, 0) = 2.0;
    CHECK_THROWS_AS(bad.validate(), GeometryError);
    bad = cam;
    bad.fx = 0;
    CHECK_THROWS_AS(bad.validate(), GeometryError);
}

TEST_CASE("rasterized sphere depth matches the analytic sphere") {
    const TriMesh sphere = make_icosphere(3, Vec3(0, 0, 3), 1.0);
    Camera cam;
    cam.width = cam.height = 101;
    cam.fx = cam.fy = 120;
    cam.cx = cam.cy = 50.5;
    const DepthMap depth = rasterize_depth(sphere, cam);
    REQUIRE(depth.covered(50, 50));
    CHECK(std::abs(depth.at(50, 50) - 2.0) <= 2e-2);
    CHECK_FALSE(depth.covered(0, 0));
}

TEST_CASE("mesh behind the camera leaves the depth map empty") {
    const TriMesh sphere = make_icosphere(2, Vec3(0, 0, -3), 1.0);
    Camera cam;
    cam.width = cam.height = 64;
    cam.fx = cam.fy = 80;
    cam.cx = cam.cy = 32;
    const DepthMap depth = rasterize_depth(sphere, cam);
    for (double d : depth.depth) CHECK(std::isinf(d));
}

TEST_CASE("rasterized depth equals ray-cast depth at pixel centers") {
    const TriMesh mesh = radially_perturbed(make_icosphere(3, Vec3(0.1, -0.2, 0.0)), Vec3(0.1, -0.2, 0), 0.15, 5);
    const VoxelGrid grid = build_grid(mesh, 24);
    const Camera cam = Camera::look_at(Vec3(0.4, -0.3, -4), Vec3(0.1, -0.2, 0), Vec3(0, -1, 0), 90, 80, 70);
    const DepthMap depth = rasterize_depth(mesh, cam);
    int compared = 0;
    for (int j = 0; j < cam.height; ++j)
        for (int i = 0; i < cam.width; ++i) {
            const Ray ray = cam.pixel_ray(i, j);
            const auto hits = intersect_ray(mesh, grid, ray.origin, ray.direction);
            if (!depth.covered(i, j) || hits.empty()) continue;
            const double z = hits.front().t * (cam.rotation * ray.direction).z();
            CHECK(std::abs(depth.at(i, j) - z) <= 1e-6 * z);
            ++compared;
        }
    CHECK(compared > 1000);
}

TEST_CASE("rasterization is independent of the worker count") {
    const TriMesh mesh = make_torus(1.0, 0.4, 48, 24);
    const Camera cam = Camera::look_at(Vec3(0.3, 2.5, -3), Vec3::Zero(), Vec3(0, 0, 1), 120, 150, 110);
    set_thread_count(1);
    const DepthMap a = rasterize_depth(mesh, cam);
    set_thread_count(4);
    const DepthMap b = rasterize_depth(mesh, cam);
    set_thread_count(0);
    CHECK(a.depth == b.depth);
}

TEST_CASE("DPTH files store sentinel as zero") {
    const auto dir = temp_dir("dpth");
    DepthMap m(3, 2);
    m.at(0, 0) = 1.5;
    m.at(2, 1) = 0.25;
    write_depth_map(dir / "d.dpth", m);
    CHECK(std::filesystem::file_size(dir / "d.dpth") == 16 + 6 * 4);
    std::ifstream in(dir / "d.dpth", std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "DPTH");
    const DepthMap back = read_depth_map(dir / "d.dpth");
    CHECK(back.width == 3);
    CHECK(back.at(0, 0) == 1.5);
    CHECK(back.at(2, 1) == 0.25);
    CHECK(std::isinf(back.at(1, 0)));
}
