#include "slamn/quat.hpp"

#include <cmath>
#include <stdexcept>

namespace slamn {

UnitQuaternion UnitQuaternion::normalized(double q0, const Vec3& q) {
    const double n = std::sqrt(q0 * q0 + q.squaredNorm());
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("quaternion has zero or non-finite norm");
    return {q0 / n, q / n};
}

double UnitQuaternion::norm() const { return std::sqrt(q0 * q0 + q.squaredNorm()); }

UnitQuaternion UnitQuaternion::from_rotation(const Rotation& rot) {
    const Mat3& r = rot.matrix();
    const double tr = r.trace();
    double q0 = 0.0;
    Vec3 q;
    // Pick the largest of (q0, qx, qy, qz) as the pivot to avoid cancellation.
    if (tr >= r(0, 0) && tr >= r(1, 1) && tr >= r(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + tr);
        q0 = 0.25 * s;
        q << (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + 2.0 * r(0, 0) - tr);
        q0 = (r(2, 1) - r(1, 2)) / s;
        q << 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) >= r(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + 2.0 * r(1, 1) - tr);
        q0 = (r(0, 2) - r(2, 0)) / s;
        q << (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s;
    } else {
        const double s = 2.0 * std::sqrt(1.0 + 2.0 * r(2, 2) - tr);
        q0 = (r(1, 0) - r(0, 1)) / s;
        q << (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s;
    }
    if (q0 < 0.0) {
        q0 = -q0;
        q = -q;
    }
    return normalized(q0, q);
}

UnitQuaternion quat_product(const UnitQuaternion& a, const UnitQuaternion& b) {
    return UnitQuaternion::normalized(a.q0 * b.q0 - a.q.dot(b.q),
                                      a.q0 * b.q + b.q0 * a.q + a.q.cross(b.q));
}

Rotation quat_to_rot(const UnitQuaternion& u) {
    const Mat3 r = (u.q0 * u.q0 - u.q.squaredNorm()) * Mat3::Identity() +
                   2.0 * u.q * u.q.transpose() + 2.0 * u.q0 * skew(u.q);
    return Rotation::from_integrated(r);
}

Vec3 rotate_by_quat(const UnitQuaternion& u, const Vec3& x, bool inverse) {
    // Vector part of Q (.) [0; x] (.) Q^-1 expanded without forming products.
    const Vec3 q = inverse ? Vec3(-u.q) : u.q;
    const Vec3 t = 2.0 * q.cross(x);
    return x + u.q0 * t + q.cross(t);
}

UnitQuaternion quat_kinematics_step(const UnitQuaternion& u, const Vec3& chi, double dt) {
    // 1/2 [[0, -chi^T], [chi, -[chi]_x]] [q0; q]
    const double dq0 = -0.5 * chi.dot(u.q);
    const Vec3 dq = 0.5 * (u.q0 * chi - chi.cross(u.q));
    return UnitQuaternion::normalized(u.q0 + dt * dq0, u.q + dt * dq);
}

}  // namespace slamn
