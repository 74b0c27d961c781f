#include "bodyfield/encoding.hpp"

#include <cmath>
#include <numbers>

namespace bodyfield {

Eigen::VectorXd positional_encoding(const Vec3& x, int octaves) {
    if (octaves < 0) throw Error("octave count must be >= 0");
    Eigen::VectorXd out(3 + 6 * octaves);
    out.head<3>() = x;
    double freq = std::numbers::pi;
    for (int k = 0; k < octaves; ++k, freq *= 2.0)
        for (int c = 0; c < 3; ++c) {
            out[3 + 6 * k + c] = std::sin(freq * x[c]);
            out[3 + 6 * k + 3 + c] = std::cos(freq * x[c]);
        }
    return out;
}

Eigen::Matrix<double, 9, 1> spherical_harmonics(const Vec3& d) {
    const double x = d.x(), y = d.y(), z = d.z();
    Eigen::Matrix<double, 9, 1> sh;
    sh[0] = 0.28209479177387814;
    sh[1] = 0.4886025119029199 * y;
    sh[2] = 0.4886025119029199 * z;
    sh[3] = 0.4886025119029199 * x;
    sh[4] = 1.0925484305920792 * x * y;
    sh[5] = 1.0925484305920792 * y * z;
    sh[6] = 0.31539156525252005 * (3.0 * z * z - 1.0);
    sh[7] = 1.0925484305920792 * x * z;
    sh[8] = 0.5462742152960396 * (x * x - y * y);
    return sh;
}

}  // namespace bodyfield
