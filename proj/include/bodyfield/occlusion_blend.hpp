#pragma once

#include "bodyfield/camera.hpp"
#include "bodyfield/image.hpp"
#include "bodyfield/encoding.hpp"
#include "bodyfield/volume_render.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace bodyfield {

inline constexpr double kDefaultSharpness = 50.0;
inline constexpr int kDefaultKeyWidth = 16;

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

/// Depth at continuous image coordinates, bilinear over the covered pixels
/// among the four nearest centers (weights renormalized). +inf when none of
/// them is covered.
double reference_depth(const DepthMap& depth, double u, double v);

/// e = sigmoid(k (z_ref - z)) with z the camera-space depth of x. Points that
/// do not project into the image get 0; uncovered pixels give 1.
double occlusion_prior(const Vec3& x, const Camera& camera, const DepthMap& body_depth,
                       double sharpness = kDefaultSharpness);
/// Same mechanics against a ground-truth scan depth map.
inline double gt_occlusion_target(const Vec3& x, const Camera& camera, const DepthMap& gt_depth,
                                  double sharpness = kDefaultSharpness) {
    return occlusion_prior(x, camera, gt_depth, sharpness);
}

struct ViewObservation {
    Vec3 color = Vec3::Zero();
    double visibility = 0.0;
    Eigen::VectorXd key;
    Vec3 direction = Vec3::UnitZ();
};

struct BlendQuery {
    Eigen::VectorXd feature;
    Vec3 direction = Vec3::UnitZ();
};

/// How visibilities enter the logits: multiplied (default) or added as log o.
enum class LogitMode { Multiplicative, Log };

/// Softmax weights in input order. Logits are (Q . K_i) / sqrt(d_k), gated by
/// the visibilities per `mode`. Accumulation runs in a canonical order of the
/// views, so permuting the views permutes the weights exactly.
std::vector<double> attention_weights(const BlendQuery& query, std::span<const ViewObservation> views,
                                      LogitMode mode = LogitMode::Multiplicative);

/// Weighted sum of view colors under attention_weights, accumulated in the
/// same canonical order (bit-identical under any permutation of the views).
Vec3 attention_blend(const BlendQuery& query, std::span<const ViewObservation> views,
                     LogitMode mode = LogitMode::Multiplicative);

inline constexpr int kViewFeatureWidth = 4;  // [r, g, b, visibility]
using ViewFeature = std::array<double, kViewFeatureWidth>;

/// Produces query and key features of a fixed width.
class FeatureProvider {
public:
    virtual ~FeatureProvider() = default;
    virtual int width() const = 0;
    virtual Eigen::VectorXd key(const Vec3& x, const Vec3& view_direction, const ViewFeature& feature) const = 0;
    virtual Eigen::VectorXd query(const Vec3& x, const Vec3& direction, const ViewFeature& pooled) const = 0;
};

/// [PE(x), SH(d), feature] projected to `width` by a fixed Gaussian random
/// matrix drawn from the seed. Queries and keys share the projection.
class AnalyticFeatureProvider final : public FeatureProvider {
public:
    explicit AnalyticFeatureProvider(int width = kDefaultKeyWidth, int octaves = kDefaultOctaves,
                                     std::uint64_t seed = 0);
    int width() const override { return static_cast<int>(projection_.rows()); }
    Eigen::VectorXd key(const Vec3& x, const Vec3& view_direction, const ViewFeature& feature) const override;
    Eigen::VectorXd query(const Vec3& x, const Vec3& direction, const ViewFeature& pooled) const override;

private:
    Eigen::VectorXd embed(const Vec3& x, const Vec3& d, const ViewFeature& f) const;
    int octaves_;
    Eigen::MatrixXd projection_;
};

struct SourceView {
    Camera camera;
    Image image;
    DepthMap body_depth;  // body mesh rasterized from `camera`
};

struct AssembledViews {
    BlendQuery query;
    std::vector<ViewObservation> views;  // real views in input order, then the virtual view
};

/// Builds the N + 1 observations for a sample at x seen along d. Real views
/// take the bilinear source color and the occlusion prior (visibility 0 and
/// black when x does not project into the image); the virtual view carries
/// the field radiance with visibility 1 and direction d. The query pools the
/// per-view features weighted by visibility.
AssembledViews assemble_views(const Vec3& x, const Vec3& d, std::span<const SourceView> sources,
                              const FieldSample& sample, const FeatureProvider& provider,
                              double sharpness = kDefaultSharpness);

struct BlendConfig {
    double sharpness = kDefaultSharpness;
    int key_width = kDefaultKeyWidth;
    LogitMode logit_mode = LogitMode::Multiplicative;
};

/// Render-time camera blending stage.
class BlendShader final : public SampleShader {
public:
    BlendShader(std::span<const SourceView> sources, const FeatureProvider& provider, BlendConfig config)
        : sources_(sources), provider_(&provider), config_(config) {}
    Vec3 shade(const Vec3& x, const Vec3& d, const FieldSample& sample) const override;

private:
    std::span<const SourceView> sources_;
    const FeatureProvider* provider_;
    BlendConfig config_;
};

}  // namespace bodyfield
