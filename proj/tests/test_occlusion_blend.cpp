#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bodyfield/occlusion_blend.hpp"
#include "test_util.hpp"

#include <numeric>

using namespace bodyfield;
using namespace bodyfield::testing;

namespace {

Camera forward_camera(int size = 96, double focal = 96.0) {
    Camera cam;
    cam.width = cam.height = size;
    cam.fx = cam.fy = focal;
    cam.cx = cam.cy = 0.5 * size;
    return cam;
}

ViewObservation view(const Vec3& color, double o, Eigen::VectorXd key) {
    ViewObservation v;
    v.color = color;
    v.visibility = o;
    v.key = std::move(key);
    return v;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

}  // namespace

TEST_CASE("occlusion prior on a flat depth map") {
    const Camera cam = forward_camera(32, 32);
    DepthMap depth(32, 32);
    std::fill(depth.depth.begin(), depth.depth.end(), 2.0);
    CHECK(occlusion_prior(Vec3(0.1, 0.1, 2.0), cam, depth) == 0.5);
    CHECK(occlusion_prior(Vec3(0.1, 0.1, 1.0), cam, depth, 50.0) == doctest::Approx(sigmoid(50.0)));
    CHECK(occlusion_prior(Vec3(0.1, 0.1, 1.0), cam, depth, 50.0) > 0.999);
    CHECK(occlusion_prior(Vec3(0.1, 0.1, 3.0), cam, depth, 50.0) < 1e-6);
    // Outside the image and behind the camera.
    CHECK(occlusion_prior(Vec3(5.0, 0.0, 1.0), cam, depth) == 0.0);
    CHECK(occlusion_prior(Vec3(0.0, 0.0, -1.0), cam, depth) == 0.0);

    const DepthMap empty(32, 32);
    CHECK(occlusion_prior(Vec3(0.1, 0.1, 3.0), cam, empty) == 1.0);
    CHECK(gt_occlusion_target(Vec3(0.1, 0.1, 3.0), cam, empty) == 1.0);
    CHECK_THROWS_AS(occlusion_prior(Vec3::Zero(), cam, DepthMap(8, 8)), GeometryError);
}

TEST_CASE("reference depth interpolates only covered pixels") {
    DepthMap d(4, 4);
    d.at(1, 1) = 2.0;
    d.at(2, 1) = 4.0;
    CHECK(reference_depth(d, 2.0, 1.5) == doctest::Approx(3.0));
    CHECK(reference_depth(d, 1.5, 1.5) == 2.0);
    // The uncovered row below does not pull the value toward infinity or zero.
    CHECK(reference_depth(d, 2.0, 2.0) == doctest::Approx(3.0));
    CHECK(std::isinf(reference_depth(d, 3.5, 3.5)));
}

TEST_CASE("sphere occlusion straddles 0.5 between hemispheres") {
    const Vec3 center(0, 0, 3);
    const double r = 1.0;
    const TriMesh sphere = make_icosphere(4, center, r);
    const Camera cam = forward_camera(128, 160);
    const DepthMap depth = rasterize_depth(sphere, cam);
    const double silhouette = cam.fx * std::tan(std::asin(r / center.norm()));
    std::mt19937_64 rng(6);
    int probes = 0, correct = 0;
    for (int i = 0; i < 20000; ++i) {
        const Vec3 x = center + r * unit_vector(rng);
        // Skip a two-pixel band around the silhouette, where the depth map is undersampled.
        const Vec2 uv = *cam.project(x);
        const double rho = (uv - Vec2(cam.cx, cam.cy)).norm();
        if (std::abs(rho - silhouette) < 2.0) continue;
        const bool near = (x - center).dot(x) < 0.0;
        const double e = occlusion_prior(x, cam, depth, 50.0);
        correct += near ? e > 0.5 : e < 0.5;
        ++probes;
    }
    CHECK(probes > 15000);
    CHECK(correct >= 0.99 * probes);
}

TEST_CASE("ground-truth targets with the body mesh equal the priors") {
    const TriMesh body = make_icosphere(3, Vec3(0, 0, 3), 0.8);
    const Camera cam = forward_camera(64, 64);
    const DepthMap body_depth = rasterize_depth(body, cam);
    const DepthMap gt_same = rasterize_depth(body, cam);
    const TriMesh inflated = make_icosphere(3, Vec3(0, 0, 3), 0.85);
    const DepthMap gt_big = rasterize_depth(inflated, cam);
    std::mt19937_64 rng(3);
    int interior = 0;
    for (int i = 0; i < 5000; ++i) {
        const Vec3 x = Vec3(0, 0, 3) + 0.79 * std::cbrt(std::uniform_real_distribution<double>(0, 1)(rng)) * unit_vector(rng);
        CHECK(gt_occlusion_target(x, cam, gt_same) == occlusion_prior(x, cam, body_depth));
        CHECK(gt_occlusion_target(x, cam, gt_big) <= occlusion_prior(x, cam, body_depth));
        ++interior;
    }
    CHECK(interior == 5000);
}

TEST_CASE("equal logits give the uniform average") {
    std::mt19937_64 rng(1);
    const int dk = 16;
    const Eigen::VectorXd key = random_vector(rng, dk);
    BlendQuery q{random_vector(rng, dk), Vec3::UnitZ()};
    std::vector<ViewObservation> views;
    Vec3 mean = Vec3::Zero();
    for (int i = 0; i < 6; ++i) {
        const Vec3 c(0.1 * i, 0.5, 1.0 - 0.15 * i);
        views.push_back(view(c, 1.0, key));
        mean += c / 6.0;
    }
    CHECK((attention_blend(q, views) - mean).cwiseAbs().maxCoeff() <= 1e-9);
    const auto w = attention_weights(q, views);
    for (double x : w) CHECK(x == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("hand-computed softmax with visibility gating") {
    const int dk = 4;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(dk);
    q[0] = 20.0 * std::sqrt(double(dk));
    Eigen::VectorXd k1 = Eigen::VectorXd::Zero(dk);
    k1[0] = 1.0;
    std::mt19937_64 rng(2);
    std::vector<ViewObservation> views = {view(Vec3(1, 0, 0), 1.0, k1),
                                          view(Vec3(0, 1, 0), 0.0, random_vector(rng, dk, 5.0)),
                                          view(Vec3(0, 0, 1), 0.0, random_vector(rng, dk, 5.0))};
    const double e20 = std::exp(20.0);
    const Vec3 expected = (e20 * Vec3(1, 0, 0) + Vec3(0, 1, 0) + Vec3(0, 0, 1)) / (e20 + 2.0);
    CHECK((attention_blend({q, Vec3::UnitZ()}, views) - expected).cwiseAbs().maxCoeff() <= 1e-6);

    // One real view plus the virtual camera, both at logit 0: exact mean.
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dk);
    const std::vector<ViewObservation> pair = {view(Vec3(0.2, 0.4, 0.6), 1.0, zero),
                                               view(Vec3(0.6, 0.2, 0.0), 1.0, zero)};
    CHECK((attention_blend({q, Vec3::UnitZ()}, pair) - Vec3(0.4, 0.3, 0.3)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("virtual camera alone returns c0 exactly") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const Vec3 c0(std::uniform_real_distribution<double>(0, 1)(rng), 0.3, 0.7);
        const std::vector<ViewObservation> only = {view(c0, 1.0, random_vector(rng, 16))};
        CHECK(attention_blend({random_vector(rng, 16), Vec3::UnitZ()}, only) == c0);
    }
}

TEST_CASE("blend output stays in the convex hull of the view colors") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        std::vector<ViewObservation> views;
        Vec3 lo = Vec3::Constant(kInf), hi = Vec3::Constant(-kInf);
        for (int i = 0; i < n; ++i) {
            const Vec3 c(u(rng), u(rng), u(rng));
            lo = lo.cwiseMin(c);
            hi = hi.cwiseMax(c);
            views.push_back(view(c, u(rng), random_vector(rng, 16, 3.0)));
        }
        for (LogitMode mode : {LogitMode::Multiplicative, LogitMode::Log}) {
            const Vec3 out = attention_blend({random_vector(rng, 16, 3.0), Vec3::UnitZ()}, views, mode);
            for (int k = 0; k < 3; ++k) {
                CHECK(out[k] >= lo[k] - 1e-12);
                CHECK(out[k] <= hi[k] + 1e-12);
            }
        }
    }
}

TEST_CASE("permuting views leaves the blend bit-identical") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<ViewObservation> views;
        for (int i = 0; i < 6; ++i) views.push_back(view(Vec3(u(rng), u(rng), u(rng)), u(rng), random_vector(rng, 16)));
        // Ties in the logits too.
        views[4].key = views[1].key;
        views[4].visibility = views[1].visibility;
        const BlendQuery q{random_vector(rng, 16), Vec3::UnitZ()};
        const Vec3 ref = attention_blend(q, views);
        const auto w = attention_weights(q, views);
        std::vector<std::size_t> perm(views.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<ViewObservation> shuffled;
        for (std::size_t p : perm) shuffled.push_back(views[p]);
        CHECK(attention_blend(q, shuffled) == ref);
        const auto ws = attention_weights(q, shuffled);
        for (std::size_t i = 0; i < perm.size(); ++i) CHECK(ws[i] == w[perm[i]]);
    }
}

TEST_CASE("visibility toward zero drives the weight to the zero-logit share") {
    const int dk = 4;
    Eigen::VectorXd q = Eigen::VectorXd::Ones(dk);
    const Eigen::VectorXd k_hi = 2.0 * Eigen::VectorXd::Ones(dk);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dk);
    std::vector<ViewObservation> views = {view(Vec3(1, 0, 0), 1.0, k_hi), view(Vec3(0, 1, 0), 1.0, zero),
                                          view(Vec3(0, 0, 1), 1.0, zero)};
    double prev = attention_weights({q, Vec3::UnitZ()}, views)[0];
    for (double o : {0.5, 0.1, 0.01, 0.0}) {
        views[0].visibility = o;
        const double w = attention_weights({q, Vec3::UnitZ()}, views)[0];
        CHECK(w <= prev);
        prev = w;
    }
    CHECK(prev == doctest::Approx(1.0 / 3.0));
    // The log-domain reading removes the view entirely.
    CHECK(attention_weights({q, Vec3::UnitZ()}, views, LogitMode::Log)[0] == 0.0);
}

TEST_CASE("virtual camera dominates when every real view is hidden") {
    std::mt19937_64 rng(8);
    const int dk = 16;
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::VectorXd q = random_vector(rng, dk);
        std::vector<ViewObservation> views;
        for (int i = 0; i < 4; ++i) views.push_back(view(Vec3::Constant(0.1 * i), 0.0, random_vector(rng, dk)));
        Eigen::VectorXd kv = random_vector(rng, dk);
        if (q.dot(kv) <= 0.0) kv = -kv;
        views.push_back(view(Vec3(1, 0, 1), 1.0, kv));
        const auto w = attention_weights({q, Vec3::UnitZ()}, views);
        for (int i = 0; i < 4; ++i) CHECK(w[4] > w[i]);
    }
}

TEST_CASE("attention blend input validation") {
    const BlendQuery q{Eigen::VectorXd::Ones(4), Vec3::UnitZ()};
    CHECK_THROWS_AS(attention_blend(q, std::vector<ViewObservation>{}), GeometryError);
    const std::vector<ViewObservation> bad = {view(Vec3::Zero(), 1.0, Eigen::VectorXd::Ones(3))};
    CHECK_THROWS_AS(attention_blend(q, bad), GeometryError);
}

TEST_CASE("assemble_views builds N + 1 observations") {
    const TriMesh body = make_icosphere(3, Vec3::Zero(), 0.3);
    std::vector<SourceView> sources;
    const Vec3 dirs[4] = {Vec3::UnitX(), -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitX()};
    for (const Vec3& d : dirs) {
        const Vec3 up = std::abs(d.z()) > 0.9 ? Vec3::UnitY() : Vec3::UnitZ();
        SourceView s;
        s.camera = Camera::look_at(3.0 * d, Vec3::Zero(), up, 64, 64, 64);
        s.image = Image(64, 64, Vec3::Constant(0.5));
        s.body_depth = rasterize_depth(body, s.camera);
        sources.push_back(std::move(s));
    }
    const AnalyticFeatureProvider provider(16, 10, 7);
    FieldSample sample;
    sample.color = Vec3::Constant(0.5);
    sample.sigma = 1.0;
    sample.feature = {0.5, 0.5, 0.5, std::tanh(1.0)};

    // Off to the side of the body in every view.
    const Vec3 clear(0.0, 0.0, 0.45);
    const Vec3 d = Vec3(1, 1, -1).normalized();
    const AssembledViews av = assemble_views(clear, d, sources, sample, provider);
    REQUIRE(av.views.size() == 5);
    for (std::size_t i = 0; i < 2; ++i) CHECK(av.views[i].visibility > 0.5);
    CHECK(av.views[3].visibility > 0.5);
    CHECK(av.views.back().visibility == 1.0);
    CHECK(av.views.back().direction == d);
    CHECK(av.query.feature.size() == 16);
    for (const auto& v : av.views) CHECK(v.key.size() == 16);

    // Behind the body as seen from the +x camera.
    const Vec3 hidden(-0.5, 0.0, 0.0);
    const AssembledViews occluded = assemble_views(hidden, d, sources, sample, provider);
    CHECK(occluded.views[0].visibility < 0.5);
    CHECK(occluded.views[3].visibility > 0.5);

    // Constant gray sources and gray radiance: any weights give gray.
    const Vec3 out = attention_blend(av.query, av.views);
    CHECK((out - Vec3::Constant(0.5)).cwiseAbs().maxCoeff() <= 1e-15);

    // Points that leave an image get visibility 0 and black.
    const AssembledViews far = assemble_views(Vec3(0, 0, 2.9), d, sources, sample, provider);
    CHECK(far.views[0].visibility == 0.0);
    CHECK(far.views[0].color == Vec3::Zero());
}

TEST_CASE("analytic feature provider is deterministic per seed") {
    const AnalyticFeatureProvider a(16, 10, 1), b(16, 10, 1), c(16, 10, 2);
    const ViewFeature f{0.1, 0.2, 0.3, 0.9};
    const Vec3 x(0.1, 0.2, -0.3), d = Vec3(0, 1, 1).normalized();
    CHECK(a.key(x, d, f) == b.key(x, d, f));
    CHECK(a.key(x, d, f) != c.key(x, d, f));
    CHECK(a.query(x, d, f) == a.key(x, d, f));
    CHECK(a.width() == 16);
}
