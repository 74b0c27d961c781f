#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bodyfield/eval_metrics.hpp"
#include "test_util.hpp"

using namespace bodyfield;
using namespace bodyfield::testing;

namespace {

Image random_image(std::mt19937_64& rng, int w, int h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Image img(w, h);
    for (Vec3& p : img.pixels) p = Vec3(u(rng), u(rng), u(rng));
    return img;
}

double mse_oracle(const Image& a, const Image& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i)
        for (int c = 0; c < 3; ++c) s += std::pow(a.pixels[i][c] - b.pixels[i][c], 2);
    return s / (3.0 * a.pixels.size());
}

}  // namespace

TEST_CASE("psnr reference values") {
    std::mt19937_64 rng(1);
    const Image a = random_image(rng, 20, 15);
    CHECK(psnr(a, a) == kPsnrCap);

    const Image gray(8, 8, Vec3::Constant(0.5));
    const Image off(8, 8, Vec3::Constant(0.6));
    CHECK(std::abs(psnr(off, gray) - 20.0) <= 1e-6);

    const Image b = random_image(rng, 20, 15);
    CHECK(std::abs(psnr(a, b) - 10.0 * std::log10(1.0 / mse_oracle(a, b))) <= 1e-9);
    CHECK(psnr(a, b) == psnr(b, a));

    // Tiny differences still saturate at the cap.
    Image near = gray;
    near.pixels[0].x() += 1e-12;
    CHECK(psnr(near, gray) == kPsnrCap);
}

TEST_CASE("psnr with a mask ignores background pixels") {
    std::mt19937_64 rng(2);
    const Image a = random_image(rng, 16, 16);
    Image b = a;
    Mask m(16, 16);
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 8; ++i) m.set(i, j, true);
    for (int j = 0; j < 16; ++j)
        for (int i = 8; i < 16; ++i) b.at(i, j) = Vec3::Zero();
    CHECK(psnr(b, a, &m) == kPsnrCap);
    CHECK(psnr(b, a) < 20.0);
    b.at(0, 0) += Vec3::Constant(0.1);
    CHECK(std::abs(psnr(b, a, &m) - 10.0 * std::log10(128.0 * 3.0 / 0.03)) <= 1e-9);

    CHECK_THROWS_AS(psnr(a, b, &static_cast<const Mask&>(Mask(16, 16))), GeometryError);
    const Mask wrong(4, 4, true);
    CHECK_THROWS_AS(psnr(a, b, &wrong), GeometryError);
    CHECK_THROWS_AS(psnr(a, Image(3, 3)), GeometryError);
}

TEST_CASE("psnr falls as noise grows") {
    std::mt19937_64 rng(3);
    const Image clean = random_image(rng, 32, 32);
    double prev = kPsnrCap;
    for (double level : {0.001, 0.01, 0.05, 0.1, 0.3}) {
        std::normal_distribution<double> g(0.0, level);
        std::mt19937_64 noise_rng(9);
        Image noisy = clean;
        for (Vec3& p : noisy.pixels) p += Vec3(g(noise_rng), g(noise_rng), g(noise_rng));
        const double v = psnr(noisy, clean);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("ssim reference values") {
    std::mt19937_64 rng(4);
    const Image a = random_image(rng, 32, 24);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    Image inv = a;
    for (Vec3& p : inv.pixels) p = Vec3::Ones() - p;
    CHECK(ssim(a, inv) < 0.0);

    const double c1 = 1e-4;
    for (auto [x, y] : {std::pair{0.2, 0.7}, std::pair{0.5, 0.5}, std::pair{0.0, 1.0}}) {
        const Image ca(16, 16, Vec3::Constant(x)), cb(16, 16, Vec3::Constant(y));
        const double expected = (2 * x * y + c1) / (x * x + y * y + c1);
        CHECK(std::abs(ssim(ca, cb) - expected) <= 1e-9);
    }
    CHECK(ssim(a, random_image(rng, 32, 24)) < 0.5);
    CHECK_THROWS_AS(ssim(Image(10, 40), Image(10, 40)), GeometryError);
    CHECK_THROWS_AS(ssim(a, Image(32, 25)), GeometryError);
}

TEST_CASE("ssim degrades with blur") {
    std::mt19937_64 rng(5);
    const Image a = random_image(rng, 40, 40);
    Image blurred = a;
    for (int j = 1; j < 39; ++j)
        for (int i = 1; i < 39; ++i) {
            Vec3 s = Vec3::Zero();
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) s += a.at(i + di, j + dj);
            blurred.at(i, j) = s / 9.0;
        }
    const double v = ssim(blurred, a);
    CHECK(v < 0.9);
    CHECK(v > 0.0);
}

TEST_CASE("surface samples are area weighted and on the surface") {
    // Two triangles, the second with three times the area.
    TriMesh m({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 5), Vec3(3, 0, 5), Vec3(0, 1, 5)},
              {{0, 1, 2}, {3, 4, 5}});
    const auto s = sample_surface(m, 40000, 3);
    const double share = std::count(s.faces.begin(), s.faces.end(), 1u) / 40000.0;
    CHECK(std::abs(share - 0.75) <= 4.0 * std::sqrt(0.75 * 0.25 / 40000.0));
    Vec3 centroid = Vec3::Zero();
    std::size_t n0 = 0;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const Vec3& p = s.points[i];
        CHECK(std::abs(p.z() - (s.faces[i] ? 5.0 : 0.0)) <= 1e-14);
        CHECK(p.x() >= -1e-15);
        CHECK(p.y() >= -1e-15);
        if (s.faces[i] == 0) {
            CHECK(p.x() + p.y() <= 1.0 + 1e-12);
            centroid += p;
            ++n0;
        }
    }
    centroid /= double(n0);
    // Uniform density on a triangle has its centroid at the vertex mean.
    CHECK(std::abs(centroid.x() - 1.0 / 3.0) <= 0.01);
    CHECK(std::abs(centroid.y() - 1.0 / 3.0) <= 0.01);
    CHECK(sample_surface(m, 100, 3).points == sample_surface(m, 100, 3).points);
    CHECK_THROWS_AS(sample_surface(TriMesh(), 10, 0), GeometryError);
}

TEST_CASE("chamfer distance") {
    const TriMesh unit = make_icosphere(4, Vec3::Zero(), 1.0);
    const TriMesh big = make_icosphere(4, Vec3::Zero(), 1.1);
    const auto self = chamfer(unit, unit, 20000, 1);
    CHECK(self.chamfer <= 1e-12);
    CHECK(self.normal_distance <= 1e-12);

    const auto d = chamfer(unit, big, 20000, 1);
    CHECK(std::abs(d.chamfer - 0.1) <= 2e-2);
    CHECK(d.normal_distance < 1e-2);
    const auto r = chamfer(big, unit, 20000, 1);
    CHECK(r.chamfer == d.chamfer);
    CHECK(r.normal_distance == d.normal_distance);

    // A translated copy: chamfer is at most the offset.
    const Vec3 t(0.03, -0.02, 0.01);
    const TriMesh moved = unit.transformed(Mat3::Identity(), t);
    CHECK(chamfer(unit, moved, 20000, 2).chamfer <= t.norm());
    CHECK_THROWS_AS(chamfer(unit, TriMesh(), 10, 0), GeometryError);
    CHECK_THROWS_AS(chamfer(unit, unit, 0, 0), GeometryError);
}

TEST_CASE("hausdorff distance") {
    const TriMesh cube = make_cube();
    CHECK(uhd(cube, cube, 20000, 1) <= 1e-12);
    const Vec3 t(0.05, 0.02, -0.04);
    const TriMesh moved = cube.transformed(Mat3::Identity(), t);
    const MeshComparison cmp(cube, moved, 20000, 3);
    CHECK(cmp.uhd() <= t.norm() + 1e-12);
    CHECK(cmp.uhd() >= cmp.chamfer());
    CHECK(cmp.uhd() >= t.cwiseAbs().maxCoeff() - 1e-3);

    const TriMesh unit = make_icosphere(4, Vec3::Zero(), 1.0);
    const TriMesh big = make_icosphere(4, Vec3::Zero(), 1.2);
    const double h = uhd(unit, big, 20000, 4);
    CHECK(h >= 0.2 - 1e-2);
    CHECK(h <= 0.2 + 1e-2);
}

TEST_CASE("f-score") {
    const TriMesh unit = make_icosphere(4, Vec3::Zero(), 1.0);
    CHECK(fscore(unit, unit, 1e-3, 20000, 1) == 1.0);
    const TriMesh far = make_icosphere(3, Vec3(10, 0, 0), 1.0);
    CHECK(fscore(unit, far, 0.5, 5000, 1) == 0.0);
    const TriMesh shell = make_icosphere(4, Vec3::Zero(), 1.05);
    CHECK(fscore(unit, shell, 0.1, 20000, 1) == 1.0);
    CHECK(fscore(unit, shell, 0.01, 20000, 1) == 0.0);

    const MeshComparison cmp(unit, make_cube(Vec3::Zero(), 1.6), 20000, 2);
    double prev = 0.0;
    for (double tau : {0.01, 0.05, 0.1, 0.2, 0.4, 1.0}) {
        const double f = cmp.fscore(tau);
        CHECK(f >= prev);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        prev = f;
    }
    CHECK(prev == 1.0);
    CHECK_THROWS_AS(cmp.fscore(0.0), GeometryError);
    CHECK_THROWS_AS(fscore(unit, shell, -1.0, 10, 0), GeometryError);
}

TEST_CASE("mesh metrics are invariant under a shared rigid motion") {
    std::mt19937_64 rng(11);
    const TriMesh a = make_icosphere(3, Vec3::Zero(), 1.0);
    const TriMesh b = make_torus(0.7, 0.3, 32, 16);
    const MeshComparison ref(a, b, 5000, 6);
    for (int trial = 0; trial < 3; ++trial) {
        const Mat3 rot = random_rotation(rng);
        const Vec3 t = uniform_in(rng, Aabb{Vec3::Constant(-5), Vec3::Constant(5)});
        const MeshComparison moved(a.transformed(rot, t), b.transformed(rot, t), 5000, 6);
        CHECK(std::abs(moved.chamfer() - ref.chamfer()) <= 1e-9);
        CHECK(std::abs(moved.normal_distance() - ref.normal_distance()) <= 1e-9);
        CHECK(std::abs(moved.uhd() - ref.uhd()) <= 1e-9);
        for (double tau : {0.05, 0.2})
            CHECK(std::abs(moved.fscore(tau) - ref.fscore(tau)) <= 1e-3);
    }
}

TEST_CASE("training losses against direct sums") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec3> c(50), c0(50), ref(50);
    double oracle = 0.0;
    for (int i = 0; i < 50; ++i) {
        c[i] = Vec3(u(rng), u(rng), u(rng));
        c0[i] = Vec3(u(rng), u(rng), u(rng));
        ref[i] = Vec3(u(rng), u(rng), u(rng));
        for (int k = 0; k < 3; ++k) oracle += std::pow(c0[i][k] - ref[i][k], 2) + std::pow(c[i][k] - ref[i][k], 2);
    }
    CHECK(photometric_loss(c, c0, ref) == doctest::Approx(oracle / 50.0).epsilon(1e-12));
    CHECK(photometric_loss(ref, ref, ref) == 0.0);
    CHECK(photometric_loss({}, {}, {}) == 0.0);
    CHECK_THROWS_AS(photometric_loss(c, std::span<const Vec3>(c0).first(3), ref), GeometryError);

    const std::vector<double> sigma = {0.0, 1.0, 50.0, 0.3}, labels = {0.0, 1.0, 1.0, 0.0};
    const std::vector<double> vis = {0.2, 0.9}, target = {0.0, 1.0};
    double occ = 0.0;
    for (int i = 0; i < 4; ++i) occ += std::pow(std::tanh(sigma[i]) - labels[i], 2);
    const double expected = occ / 4.0 + (0.04 + 0.01) / 2.0;
    CHECK(geometry_loss(sigma, labels, vis, target) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(geometry_loss(labels, labels, target, target) == doctest::Approx(std::pow(std::tanh(1.0) - 1.0, 2) / 2.0));
    CHECK_THROWS_AS(geometry_loss(sigma, vis, vis, target), GeometryError);
}

TEST_CASE("occupancy labels from a closed scan") {
    const TriMesh scan = make_icosphere(3, Vec3::Zero(), 1.0);
    const VoxelGrid grid = build_grid(scan, 32);
    std::mt19937_64 rng(13);
    std::vector<Vec3> pts;
    std::vector<double> expected;
    while (pts.size() < 4000) {
        const Vec3 x = uniform_in(rng, Aabb{Vec3::Constant(-1.5), Vec3::Constant(1.5)});
        const double r = x.norm();
        if (std::abs(r - 1.0) < 0.05) continue;
        pts.push_back(x);
        expected.push_back(r < 1.0 ? 1.0 : 0.0);
    }
    CHECK(occupancy_labels(pts, scan, grid) == expected);
}
