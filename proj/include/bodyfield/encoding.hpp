#pragma once

#include "bodyfield/types.hpp"

#include <Eigen/Core>

namespace bodyfield {

inline constexpr int kDefaultOctaves = 10;

/// [x, sin(2^k pi x), cos(2^k pi x)] for k = 0..octaves-1: 3 + 6 * octaves values.
Eigen::VectorXd positional_encoding(const Vec3& x, int octaves = kDefaultOctaves);

/// Real spherical harmonics of a unit direction for bands l = 0, 1, 2
/// (9 values, orthonormal on the sphere).
Eigen::Matrix<double, 9, 1> spherical_harmonics(const Vec3& d);

}  // namespace bodyfield
