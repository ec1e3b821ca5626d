#include "srf/su2.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace srf {

Rotation Rotation::from_axis_angle(const Vec3& axis, double omega) {
    const Vec3 n = axis.normalized();
    const double s = std::sin(0.5 * omega);
    return Rotation{std::cos(0.5 * omega), s * n.x(), s * n.y(), s * n.z()}.normalized();
}

Rotation Rotation::from_euler_zyz(double alpha, double beta, double gamma) {
    const Rotation rz1 = from_axis_angle(Vec3::UnitZ(), alpha);
    const Rotation ry = from_axis_angle(Vec3::UnitY(), beta);
    const Rotation rz2 = from_axis_angle(Vec3::UnitZ(), gamma);
    return compose(compose(rz1, ry), rz2);
}

double Rotation::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Rotation Rotation::normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
}

Eigen::Matrix3d Rotation::matrix() const {
    Eigen::Matrix3d m;
    m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return m;
}

Vec3 Rotation::rotate(const Vec3& v) const { return matrix() * v; }

Rotation compose(const Rotation& a, const Rotation& b) {
    // Hamilton product; matches the SU(2) matrix product for w - i(v.sigma).
    Rotation r{
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    };
    return r.normalized();
}

AxisAngle to_axis_angle(const Rotation& r) {
    AxisAngle out;
    out.omega = class_angle(r);
    const Vec3 v(r.x, r.y, r.z);
    const double n = v.norm();
    out.axis = n > 1e-300 ? Vec3(v / n) : Vec3(Vec3::UnitZ());
    return out;
}

double class_angle(const Rotation& r) { return 2.0 * std::acos(std::clamp(r.w, -1.0, 1.0)); }

double so3_error_angle(const Rotation& r) {
    // atan2 form stays accurate for small angles where acos loses digits.
    const double v = std::sqrt(r.x * r.x + r.y * r.y + r.z * r.z);
    return 2.0 * std::atan2(v, std::abs(r.w));
}

double frame_error(const Rotation& estimate, const Rotation& truth) {
    return so3_error_angle(compose(estimate, truth.inverse()));
}

CMatrix spin_jz(Spin j) {
    const int d = j.dim();
    CMatrix m = CMatrix::Zero(d, d);
    for (int t = 0; t < d; ++t) m(t, t) = j.m_of(t);
    return m;
}

namespace {

CMatrix raising(Spin j) {
    const int d = j.dim();
    const double jj = j.value();
    CMatrix m = CMatrix::Zero(d, d);
    for (int t = 0; t + 1 < d; ++t) {
        const double mm = j.m_of(t);
        m(t + 1, t) = std::sqrt(jj * (jj + 1) - mm * (mm + 1));
    }
    return m;
}

struct JyBasis {
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd values;
};

const JyBasis& jy_basis(Spin j) {
    static std::mutex mutex;
    static std::map<int, JyBasis> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(j.twice);
    if (it == cache.end()) {
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(spin_jy(j));
        JyBasis basis{solver.eigenvectors(), solver.eigenvalues()};
        // Eigenvalues of Jy are exactly -j..j in ascending order.
        for (int t = 0; t < j.dim(); ++t) basis.values(t) = j.m_of(t);
        it = cache.emplace(j.twice, std::move(basis)).first;
    }
    return it->second;
}

}  // namespace

CMatrix spin_jx(Spin j) {
    const CMatrix up = raising(j);
    return 0.5 * (up + up.adjoint());
}

CMatrix spin_jy(Spin j) {
    const CMatrix up = raising(j);
    return Complex(0.0, -0.5) * (up - up.adjoint());
}

Eigen::MatrixXd wigner_small_d(Spin j, double beta) {
    const JyBasis& basis = jy_basis(j);
    const int d = j.dim();
    Eigen::VectorXcd phases(d);
    for (int t = 0; t < d; ++t) phases(t) = std::polar(1.0, -beta * basis.values(t));
    const CMatrix full = basis.vectors * phases.asDiagonal() * basis.vectors.adjoint();
    return full.real();
}

CMatrix wigner_D(Spin j, const Rotation& r) {
    const int d = j.dim();
    if (d == 1) return CMatrix::Ones(1, 1);
    const Complex a = r.cayley_a();
    const Complex b = r.cayley_b();
    const double beta = 2.0 * std::atan2(std::abs(b), std::abs(a));
    const double arg_a = std::abs(a) > 0 ? std::arg(a) : 0.0;
    const double arg_b = std::abs(b) > 0 ? std::arg(b) : 0.0;
    const Eigen::MatrixXd small = wigner_small_d(j, beta);
    CMatrix out(d, d);
    for (int row = 0; row < d; ++row) {
        const double mp = j.m_of(row);
        for (int col = 0; col < d; ++col) {
            const double m = j.m_of(col);
            // m'+m and m'-m are integers, so the branch of arg is irrelevant.
            const double phase = (mp + m) * arg_a - (mp - m) * arg_b;
            out(row, col) = std::polar(small(row, col), phase);
        }
    }
    return out;
}

Complex wigner_element(const CMatrix& D, Spin j, int twice_m_row, int twice_m_col) {
    return D((twice_m_row + j.twice) / 2, (twice_m_col + j.twice) / 2);
}

double character(Spin j, double omega) {
    const double s = std::sin(0.5 * omega);
    if (std::abs(s) > 1e-4) return std::sin(0.5 * j.dim() * omega) / s;
    double sum = 0.0;
    for (int t = 0; t < j.dim(); ++t) sum += std::cos(j.m_of(t) * omega);
    return sum;
}

double class_measure(double omega) {
    const double s = std::sin(0.5 * omega);
    return s * s / kPi;
}

Rotation average_rotation(const std::vector<Rotation>& rotations) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    for (const Rotation& r : rotations) {
        const Eigen::Vector4d q(r.w, r.x, r.y, r.z);
        m += q * q.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(m);
    const Eigen::Vector4d q = solver.eigenvectors().col(3);
    return Rotation{q(0), q(1), q(2), q(3)}.normalized();
}

}  // namespace srf
