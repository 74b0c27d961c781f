#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace bodyfield {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

struct Aabb {
    Vec3 lo = Vec3::Constant(kInf);
    Vec3 hi = Vec3::Constant(-kInf);

    bool empty() const { return (lo.array() > hi.array()).any(); }
    void extend(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    Vec3 extent() const { return hi - lo; }
    Vec3 center() const { return 0.5 * (lo + hi); }
    double diagonal() const { return empty() ? 0.0 : extent().norm(); }
    Aabb padded(double amount) const {
        return {lo - Vec3::Constant(amount), hi + Vec3::Constant(amount)};
    }
    bool contains(const Vec3& p) const {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
    /// Euclidean distance from p to the closed box (0 inside).
    double distance(const Vec3& p) const {
        const Vec3 gap = (lo - p).cwiseMax(p - hi).cwiseMax(Vec3::Zero());
        return gap.norm();
    }
};

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();

    Vec3 at(double t) const { return origin + t * direction; }
};

}  // namespace bodyfield
