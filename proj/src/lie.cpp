#include "slamn/lie.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slamn {

Twist Twist::from_vector(const Vec6& u) { return {u.head<3>(), u.tail<3>()}; }

Vec6 Twist::vector() const {
    Vec6 u;
    u << omega, v;
    return u;
}

Rotation Rotation::from_matrix(const Mat3& m) {
    if (!m.allFinite()) throw std::invalid_argument("rotation has non-finite entries");
    const double drift = (m.transpose() * m - Mat3::Identity()).norm();
    if (drift > kOrthoDriftTol || std::abs(m.determinant() - 1.0) > kOrthoDriftTol)
        throw std::invalid_argument("matrix is not in SO(3)");
    return Rotation(m);
}

Rotation Rotation::nearest(const Mat3& m) {
    if (!m.allFinite()) throw std::invalid_argument("rotation has non-finite entries");
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = svd.matrixU();
    const Eigen::Matrix3d& v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0) u.col(2) = -u.col(2);
    if (svd.singularValues().minCoeff() < 1e-6)
        throw std::invalid_argument("rotation matrix is degenerate");
    return Rotation(u * v.transpose());
}

Rotation Rotation::from_integrated(const Mat3& m) {
    if ((m.transpose() * m - Mat3::Identity()).norm() > kOrthoDriftTol) return Rotation(gram_schmidt(m));
    return Rotation(m);
}

Rotation Rotation::transpose() const { return Rotation(m_.transpose()); }

Rotation Rotation::operator*(const Rotation& o) const { return from_integrated(m_ * o.m_); }

Mat4 Pose::matrix() const {
    Mat4 t = Mat4::Identity();
    t.topLeftCorner<3, 3>() = rotation.matrix();
    t.topRightCorner<3, 1>() = position;
    return t;
}

Pose Pose::operator*(const Pose& o) const {
    return {rotation * o.rotation, rotation * o.position + position};
}

Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return m;
}

Vec3 vex(const Mat3& m) {
    if ((0.5 * (m + m.transpose())).norm() > 1e-6)
        throw std::invalid_argument("vex: matrix is not antisymmetric");
    return {m(2, 1), m(0, 2), m(1, 0)};
}

Mat3 antisym_project(const Mat3& a) { return 0.5 * (a - a.transpose()); }

Vec3 upsilon(const Mat3& a) {
    // vex of the antisymmetric part, read off directly.
    return {0.5 * (a(2, 1) - a(1, 2)), 0.5 * (a(0, 2) - a(2, 0)), 0.5 * (a(1, 0) - a(0, 1))};
}

double so3_distance(const Mat3& r) { return std::clamp(0.25 * (3.0 - r.trace()), 0.0, 1.0); }

double so3_distance(const Rotation& r) { return so3_distance(r.matrix()); }

Rotation so3_exp(const Vec3& omega, double dt) {
    const Vec3 phi = omega * dt;
    const double theta = phi.norm();
    const Mat3 k = skew(phi);
    Mat3 r;
    if (theta < kSmallAngle) {
        r = Mat3::Identity() + k + 0.5 * k * k;
    } else {
        r = Mat3::Identity() + (std::sin(theta) / theta) * k +
            ((1.0 - std::cos(theta)) / (theta * theta)) * k * k;
    }
    return Rotation::from_integrated(r);
}

Mat3 so3_left_jacobian(const Vec3& phi) {
    const double theta = phi.norm();
    const Mat3 k = skew(phi);
    if (theta < kSmallAngle) return Mat3::Identity() + 0.5 * k + (1.0 / 6.0) * k * k;
    const double t2 = theta * theta;
    return Mat3::Identity() + ((1.0 - std::cos(theta)) / t2) * k +
           ((theta - std::sin(theta)) / (t2 * theta)) * k * k;
}

Mat4 wedge(const Twist& u) {
    Mat4 w = Mat4::Zero();
    w.topLeftCorner<3, 3>() = skew(u.omega);
    w.topRightCorner<3, 1>() = u.v;
    return w;
}

Pose se3_exp(const Twist& u, double dt) {
    const Vec3 phi = u.omega * dt;
    return {so3_exp(u.omega, dt), so3_left_jacobian(phi) * (u.v * dt)};
}

Mat6 adjoint_aug(const Pose& t) {
    const Mat3& r = t.rotation.matrix();
    Mat6 ad = Mat6::Zero();
    ad.topLeftCorner<3, 3>() = r;
    ad.bottomLeftCorner<3, 3>() = skew(t.position) * r;
    ad.bottomRightCorner<3, 3>() = r;
    return ad;
}

Pose pose_inverse(const Pose& t) {
    const Rotation rt = t.rotation.transpose();
    return {rt, -(rt * t.position)};
}

Mat3 gram_schmidt(const Mat3& m) {
    Vec3 c0 = m.col(0);
    c0.normalize();
    Vec3 c1 = m.col(1);
    c1 -= c0.dot(c1) * c0;
    c1.normalize();
    Vec3 c2 = m.col(2);
    c2 -= c0.dot(c2) * c0;
    c2 -= c1.dot(c2) * c1;
    c2.normalize();
    Mat3 out;
    out.col(0) = c0;
    out.col(1) = c1;
    out.col(2) = c2;
    if (out.determinant() < 0) out.col(2) = -out.col(2);
    return out;
}

}  // namespace slamn
