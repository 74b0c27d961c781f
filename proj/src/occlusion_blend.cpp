#include "bodyfield/occlusion_blend.hpp"

#include "bodyfield/encoding.hpp"
#include "bodyfield/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace bodyfield {

namespace {

// Lexicographic total order on (logit, color, visibility, direction, key).
bool view_before(double la, const ViewObservation& a, double lb, const ViewObservation& b) {
    if (la != lb) return la < lb;
    for (int c = 0; c < 3; ++c)
        if (a.color[c] != b.color[c]) return a.color[c] < b.color[c];
    if (a.visibility != b.visibility) return a.visibility < b.visibility;
    for (int c = 0; c < 3; ++c)
        if (a.direction[c] != b.direction[c]) return a.direction[c] < b.direction[c];
    for (Eigen::Index c = 0; c < a.key.size(); ++c)
        if (a.key[c] != b.key[c]) return a.key[c] < b.key[c];
    return false;
}

struct Softmax {
    std::vector<std::size_t> order;  // canonical order
    std::vector<double> weights;     // input order
};

Softmax softmax(const BlendQuery& query, std::span<const ViewObservation> views, LogitMode mode) {
    if (views.empty()) throw GeometryError("attention blend needs at least one view");
    const Eigen::Index dk = query.feature.size();
    if (dk == 0) throw GeometryError("query feature is empty");
    std::vector<double> logits(views.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
        if (views[i].key.size() != dk)
            throw GeometryError("key width " + std::to_string(views[i].key.size()) + " does not match query width " +
                                std::to_string(dk));
        const double o = std::clamp(views[i].visibility, 0.0, 1.0);
        const double l = query.feature.dot(views[i].key) / std::sqrt(static_cast<double>(dk));
        logits[i] = mode == LogitMode::Multiplicative ? l * o : l + std::log(o);
    }
    Softmax s;
    s.order.resize(views.size());
    std::iota(s.order.begin(), s.order.end(), 0);
    std::sort(s.order.begin(), s.order.end(), [&](std::size_t a, std::size_t b) {
        return view_before(logits[a], views[a], logits[b], views[b]);
    });
    const double top = logits[s.order.back()];
    if (!std::isfinite(top)) throw GeometryError("every view is masked out");
    s.weights.assign(views.size(), 0.0);
    double z = 0.0;
    for (std::size_t i : s.order) {
        s.weights[i] = std::exp(logits[i] - top);
        z += s.weights[i];
    }
    for (double& w : s.weights) w /= z;
    return s;
}

}  // namespace

double reference_depth(const DepthMap& depth, double u, double v) {
    const double x = u - 0.5, y = v - 0.5;
    const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0, fy = y - y0;
    double wsum = 0.0, zsum = 0.0;
    for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
            const int i = x0 + dx, j = y0 + dy;
            if (i < 0 || j < 0 || i >= depth.width || j >= depth.height || !depth.covered(i, j)) continue;
            const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
            wsum += w;
            zsum += w * depth.at(i, j);
        }
    return wsum > 0.0 ? zsum / wsum : kInf;
}

double occlusion_prior(const Vec3& x, const Camera& camera, const DepthMap& body_depth, double sharpness) {
    if (body_depth.width != camera.width || body_depth.height != camera.height)
        throw GeometryError("depth map size does not match the camera");
    const auto uv = camera.project(x);
    if (!uv || uv->x() < 0.0 || uv->y() < 0.0 || uv->x() >= camera.width || uv->y() >= camera.height) return 0.0;
    const double z_ref = reference_depth(body_depth, uv->x(), uv->y());
    if (std::isinf(z_ref)) return 1.0;
    return sigmoid(sharpness * (z_ref - camera.to_camera(x).z()));
}

std::vector<double> attention_weights(const BlendQuery& query, std::span<const ViewObservation> views,
                                      LogitMode mode) {
    return softmax(query, views, mode).weights;
}

Vec3 attention_blend(const BlendQuery& query, std::span<const ViewObservation> views, LogitMode mode) {
    const Softmax s = softmax(query, views, mode);
    Vec3 out = Vec3::Zero();
    for (std::size_t i : s.order) out += s.weights[i] * views[i].color;
    return out;
}

AnalyticFeatureProvider::AnalyticFeatureProvider(int width, int octaves, std::uint64_t seed)
    : octaves_(octaves) {
    if (width < 1) throw GeometryError("key width must be >= 1");
    const int in = 3 + 6 * octaves + 9 + kViewFeatureWidth;
    projection_.resize(width, in);
    const CounterRng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (int r = 0; r < width; ++r)
        for (int c = 0; c < in; ++c) {
            // Box-Muller on two counter-indexed uniforms.
            const std::uint64_t idx = static_cast<std::uint64_t>(r) * in + c;
            const double u1 = 1.0 - rng.uniform(idx, 0), u2 = rng.uniform(idx, 1);
            projection_(r, c) = scale * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        }
}

Eigen::VectorXd AnalyticFeatureProvider::embed(const Vec3& x, const Vec3& d, const ViewFeature& f) const {
    const Eigen::VectorXd pe = positional_encoding(x, octaves_);
    Eigen::VectorXd in(projection_.cols());
    in << pe, spherical_harmonics(d), Eigen::Map<const Eigen::Vector4d>(f.data());
    return projection_ * in;
}

Eigen::VectorXd AnalyticFeatureProvider::key(const Vec3& x, const Vec3& view_direction,
                                             const ViewFeature& feature) const {
    return embed(x, view_direction, feature);
}

Eigen::VectorXd AnalyticFeatureProvider::query(const Vec3& x, const Vec3& direction,
                                               const ViewFeature& pooled) const {
    return embed(x, direction, pooled);
}

AssembledViews assemble_views(const Vec3& x, const Vec3& d, std::span<const SourceView> sources,
                              const FieldSample& sample, const FeatureProvider& provider, double sharpness) {
    AssembledViews out;
    out.views.reserve(sources.size() + 1);
    ViewFeature pooled{};
    double vis_sum = 0.0;
    for (const SourceView& src : sources) {
        if (src.image.width != src.camera.width || src.image.height != src.camera.height)
            throw GeometryError("source image size does not match its camera");
        ViewObservation v;
        v.direction = (x - src.camera.center()).normalized();
        const auto uv = src.camera.project(x);
        if (uv && uv->x() >= 0.0 && uv->y() >= 0.0 && uv->x() < src.camera.width && uv->y() < src.camera.height) {
            v.color = src.image.bilinear(uv->x(), uv->y());
            v.visibility = occlusion_prior(x, src.camera, src.body_depth, sharpness);
        }
        const ViewFeature f{v.color.x(), v.color.y(), v.color.z(), v.visibility};
        for (int k = 0; k < kViewFeatureWidth; ++k) pooled[k] += v.visibility * f[k];
        vis_sum += v.visibility;
        v.key = provider.key(x, v.direction, f);
        out.views.push_back(std::move(v));
    }
    if (vis_sum > 0.0)
        for (double& p : pooled) p /= vis_sum;
    else
        pooled = sample.feature;

    ViewObservation virt;
    virt.color = sample.color;
    virt.visibility = 1.0;
    virt.direction = d;
    virt.key = provider.key(x, d, sample.feature);
    out.views.push_back(std::move(virt));
    out.query = {provider.query(x, d, pooled), d};
    return out;
}

Vec3 BlendShader::shade(const Vec3& x, const Vec3& d, const FieldSample& sample) const {
    const AssembledViews av = assemble_views(x, d, sources_, sample, *provider_, config_.sharpness);
    return attention_blend(av.query, av.views, config_.logit_mode);
}

}  // namespace bodyfield
