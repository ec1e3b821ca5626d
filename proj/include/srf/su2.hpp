#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <vector>

namespace srf {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Half-integer angular momentum stored as the integer 2j.
struct Spin {
    int twice = 0;

    constexpr double value() const { return 0.5 * twice; }
    constexpr int dim() const { return twice + 1; }
    /// Physical m for ladder index t in [0, 2j], m = t - j.
    constexpr double m_of(int t) const { return t - 0.5 * twice; }
    friend constexpr bool operator==(Spin, Spin) = default;
    friend constexpr auto operator<=>(Spin, Spin) = default;
};

/// Unit quaternion standing for an SU(2) element.
///
/// The 2x2 matrix is w*1 - i(x sx + y sy + z sz), so from_axis_angle(n, w)
/// is exp(-i w n.J) and q and -q are distinct SU(2) elements sharing one
/// SO(3) rotation.
struct Rotation {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static Rotation identity() { return {}; }
    static Rotation from_axis_angle(const Vec3& axis, double omega);
    /// exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz)
    static Rotation from_euler_zyz(double alpha, double beta, double gamma);

    double norm() const;
    Rotation normalized() const;
    Rotation inverse() const { return {w, -x, -y, -z}; }
    Rotation negated() const { return {-w, -x, -y, -z}; }

    /// SO(3) action on a 3-vector.
    Vec3 rotate(const Vec3& v) const;
    Eigen::Matrix3d matrix() const;

    /// Cayley-Klein parameters: the SU(2) matrix is [[a, -conj(b)], [b, conj(a)]]
    /// in the (up, down) basis.
    Complex cayley_a() const { return {w, -z}; }
    Complex cayley_b() const { return {y, -x}; }
};

struct AxisAngle {
    Vec3 axis = Vec3::UnitZ();
    double omega = 0.0;  // [0, 2pi)
};

Rotation compose(const Rotation& a, const Rotation& b);
AxisAngle to_axis_angle(const Rotation& r);

/// Haar-uniform SU(2) element: four standard normals, normalized.
template <typename Rng>
Rotation haar_sample(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Rotation r;
    double n2 = 0.0;
    do {
        r = {normal(rng), normal(rng), normal(rng), normal(rng)};
        n2 = r.w * r.w + r.x * r.x + r.y * r.y + r.z * r.z;
    } while (n2 < 1e-24);
    return r.normalized();
}

/// Uniform point on the unit sphere.
template <typename Rng>
Vec3 uniform_direction(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec3 v;
    do {
        v = Vec3(normal(rng), normal(rng), normal(rng));
    } while (v.squaredNorm() < 1e-24);
    return v.normalized();
}

/// SU(2) class angle in [0, 2pi].
double class_angle(const Rotation& r);

/// SO(3) geodesic angle in [0, pi]; the frame-error metric.
double so3_error_angle(const Rotation& r);

/// so3_error_angle(estimate * inverse(truth))
double frame_error(const Rotation& estimate, const Rotation& truth);

/// Spin-j irrep matrix, rows and columns indexed by ladder t = m + j.
CMatrix wigner_D(Spin j, const Rotation& r);

/// Element D^j_{m'm} by physical labels (m' and m given as 2m).
Complex wigner_element(const CMatrix& D, Spin j, int twice_m_row, int twice_m_col);

/// Small-d matrix exp(-i beta Jy), real.
Eigen::MatrixXd wigner_small_d(Spin j, double beta);

/// sin((2j+1) w/2) / sin(w/2), with the limits at w = 0 and 2pi.
double character(Spin j, double omega);

/// Haar class-angle density sin^2(w/2)/pi on [0, 2pi].
double class_measure(double omega);

/// Angular momentum matrices in the ladder basis.
CMatrix spin_jz(Spin j);
CMatrix spin_jy(Spin j);
CMatrix spin_jx(Spin j);

/// Quaternion mean via the dominant eigenvector of sum q q^T; sign-agnostic.
Rotation average_rotation(const std::vector<Rotation>& rotations);

}  // namespace srf
