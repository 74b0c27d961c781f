#pragma once

#include "bodyfield/types.hpp"

namespace bodyfield {

struct TriangleClosestPoint {
    Vec3 barycentric = Vec3::Zero();
    Vec3 point = Vec3::Zero();
    double squared_distance = 0.0;
    /// Number of active inequality constraints c_i >= 0 at the optimum:
    /// 0 = face interior, 1 = edge, 2 = vertex.
    int active_set_size = 0;
};

/// Least-distance QP  min ||sum c_i v_i - x||  s.t.  c_i >= 0, sum c_i = 1,
/// solved with a primal active-set method. Each working-set subproblem is an
/// equality-constrained QP over the free vertices (plane, line or single
/// vertex) solved in closed form. Throws GeometryError for triangles with area
/// below kDegenerateArea.
TriangleClosestPoint closest_point_on_triangle(const Vec3& x, const Vec3& v1, const Vec3& v2,
                                               const Vec3& v3);

/// Same solver without the degeneracy check, for meshes validated at load.
TriangleClosestPoint closest_point_on_triangle_unchecked(const Vec3& x, const Vec3& v1,
                                                         const Vec3& v2, const Vec3& v3);

}  // namespace bodyfield
