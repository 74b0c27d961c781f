#include "bodyfield/triangle_qp.hpp"

#include "bodyfield/mesh.hpp"

#include <array>
#include <bit>
#include <cmath>

namespace bodyfield {

namespace {

constexpr int kMaxIterations = 8;

}  // namespace

TriangleClosestPoint closest_point_on_triangle_unchecked(const Vec3& x, const Vec3& v1,
                                                         const Vec3& v2, const Vec3& v3) {
    const std::array<Vec3, 3> w = {v1 - x, v2 - x, v3 - x};
    const Vec3 e1 = v2 - v1;
    const Vec3 e2 = v3 - v1;
    const double d11 = e1.dot(e1), d12 = e1.dot(e2), d22 = e2.dot(e2);
    // Scale for the multiplier test: gradients are dot products of w's.
    const double tol = 1e-13 * (d11 + d22 + w[0].squaredNorm());

    std::array<double, 3> c = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    unsigned active = 0;  // bit i set <=> c_i >= 0 is in the working set

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // Minimizer of the equality-constrained subproblem over the free vertices.
        std::array<double, 3> target = {0.0, 0.0, 0.0};
        const int free_count = 3 - std::popcount(active);
        if (free_count == 3) {
            const double b1 = -e1.dot(w[0]), b2 = -e2.dot(w[0]);
            const double det = d11 * d22 - d12 * d12;
            const double s = (b1 * d22 - b2 * d12) / det;
            const double t = (d11 * b2 - d12 * b1) / det;
            target = {1.0 - s - t, s, t};
        } else if (free_count == 2) {
            int i = -1, j = -1;
            for (int k = 0; k < 3; ++k)
                if (!(active & (1u << k))) (i < 0 ? i : j) = k;
            const Vec3 edge = w[j] - w[i];
            const double t = -w[i].dot(edge) / edge.squaredNorm();
            target[i] = 1.0 - t;
            target[j] = t;
        } else {
            for (int k = 0; k < 3; ++k)
                if (!(active & (1u << k))) target[k] = 1.0;
        }

        int blocking = -1;
        double step = 1.0;
        for (int k = 0; k < 3; ++k) {
            if (active & (1u << k)) continue;
            const double p = target[k] - c[k];
            if (target[k] < 0.0 && p < 0.0) {
                const double alpha = c[k] / -p;
                if (alpha < step) {
                    step = alpha;
                    blocking = k;
                }
            }
        }

        if (blocking >= 0) {
            for (int k = 0; k < 3; ++k) c[k] += step * (target[k] - c[k]);
            c[blocking] = 0.0;
            active |= 1u << blocking;
            continue;
        }

        c = target;
        if (active == 0) break;
        // Lagrange multipliers of the working-set constraints: g_i - mu, with mu
        // the (common) gradient value over the free set.
        const Vec3 y = c[0] * w[0] + c[1] * w[1] + c[2] * w[2];
        double mu = 0.0;
        for (int k = 0; k < 3; ++k)
            if (!(active & (1u << k))) mu += w[k].dot(y);
        mu /= free_count;
        int release = -1;
        double most_negative = -tol;
        for (int k = 0; k < 3; ++k) {
            if (!(active & (1u << k))) continue;
            const double lambda = w[k].dot(y) - mu;
            if (lambda < most_negative) {
                most_negative = lambda;
                release = k;
            }
        }
        if (release < 0) break;
        active &= ~(1u << release);
    }

    TriangleClosestPoint out;
    out.barycentric = Vec3(c[0], c[1], c[2]);
    out.point = c[0] * v1 + c[1] * v2 + c[2] * v3;
    out.squared_distance = (out.point - x).squaredNorm();
    out.active_set_size = std::min(2, static_cast<int>((c[0] == 0.0) + (c[1] == 0.0) + (c[2] == 0.0)));
    return out;
}

TriangleClosestPoint closest_point_on_triangle(const Vec3& x, const Vec3& v1, const Vec3& v2,
                                               const Vec3& v3) {
    const double area = 0.5 * (v2 - v1).cross(v3 - v1).norm();
    if (!(area >= kDegenerateArea))
        throw GeometryError("degenerate triangle (area " + std::to_string(area) + ")");
    return closest_point_on_triangle_unchecked(x, v1, v2, v3);
}

}  // namespace bodyfield
