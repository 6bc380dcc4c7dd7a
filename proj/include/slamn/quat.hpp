#pragma once

#include "slamn/lie.hpp"

namespace slamn {

/// Unit quaternion Q = [q0, q] with scalar part first (Hamilton convention,
/// rotation matrix (q0^2 - |q|^2) I + 2 q q^T + 2 q0 [q]_x).
struct UnitQuaternion {
    double q0 = 1.0;
    Vec3 q = Vec3::Zero();

    static UnitQuaternion identity() { return {}; }

    /// Divides by the norm. Throws std::invalid_argument on a zero quaternion.
    static UnitQuaternion normalized(double q0, const Vec3& q);

    /// Shepperd extraction (largest-pivot branch), sign fixed so q0 >= 0.
    static UnitQuaternion from_rotation(const Rotation& r);

    double norm() const;
    UnitQuaternion inverse() const { return {q0, -q}; }
};

UnitQuaternion quat_product(const UnitQuaternion& a, const UnitQuaternion& b);

Rotation quat_to_rot(const UnitQuaternion& q);

/// Q (.) [0; x] (.) Q^-1, or Q^-1 (.) [0; x] (.) Q when `inverse` is set.
Vec3 rotate_by_quat(const UnitQuaternion& q, const Vec3& x, bool inverse = false);

/// One forward-Euler step of dQ/dt = 1/2 [[0, -chi^T], [chi, -[chi]_x]] Q
/// followed by renormalization.
UnitQuaternion quat_kinematics_step(const UnitQuaternion& q, const Vec3& chi, double dt);

}  // namespace slamn
