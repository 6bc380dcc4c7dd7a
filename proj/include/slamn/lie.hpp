#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

namespace slamn {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix<double, 3, 3, Eigen::RowMajor>;
using Mat4 = Eigen::Matrix<double, 4, 4, Eigen::RowMajor>;
using Mat6 = Eigen::Matrix<double, 6, 6, Eigen::RowMajor>;

/// Below this rotation angle the exponential switches to its Taylor expansion.
inline constexpr double kSmallAngle = 1e-6;

/// Orthonormality drift (Frobenius norm of R^T R - I) that triggers a
/// re-orthonormalization pass.
inline constexpr double kOrthoDriftTol = 1e-9;

/// Stacked body-frame velocity U = [omega; v].
struct Twist {
    Vec3 omega = Vec3::Zero();  // rad/s
    Vec3 v = Vec3::Zero();      // m/s

    static Twist zero() { return {}; }
    static Twist from_vector(const Vec6& u);
    Vec6 vector() const;

    Twist operator+(const Twist& o) const { return {omega + o.omega, v + o.v}; }
    Twist operator-(const Twist& o) const { return {omega - o.omega, v - o.v}; }
    Twist operator*(double s) const { return {omega * s, v * s}; }
    Twist& operator+=(const Twist& o) {
        omega += o.omega;
        v += o.v;
        return *this;
    }
    bool all_finite() const { return omega.allFinite() && v.allFinite(); }
};

/// Element of SO(3). Construction either validates (from_matrix) or projects
/// (nearest) so that every live instance satisfies the group invariants.
class Rotation {
public:
    Rotation() : m_(Mat3::Identity()) {}

    static Rotation identity() { return {}; }

    /// Throws std::invalid_argument unless `m` is orthonormal with det +1
    /// to within 1e-9.
    static Rotation from_matrix(const Mat3& m);

    /// Nearest rotation in the Frobenius sense (SVD projection). Accepts any
    /// non-degenerate matrix, e.g. a rounded 4-decimal attitude from a config.
    static Rotation nearest(const Mat3& m);

    /// Wraps a matrix already known to be in SO(3) up to integration drift,
    /// re-orthonormalizing once if the drift exceeds kOrthoDriftTol.
    static Rotation from_integrated(const Mat3& m);

    const Mat3& matrix() const { return m_; }
    Rotation transpose() const;
    Rotation operator*(const Rotation& o) const;
    Vec3 operator*(const Vec3& x) const { return m_ * x; }

private:
    explicit Rotation(const Mat3& m) : m_(m) {}
    Mat3 m_;
};

/// Homogeneous transform T = [R P; 0 1].
struct Pose {
    Rotation rotation;
    Vec3 position = Vec3::Zero();

    static Pose identity() { return {}; }
    Mat4 matrix() const;
    Pose operator*(const Pose& o) const;
    /// T * [x; 1]
    Vec3 transform_point(const Vec3& x) const { return rotation * x + position; }
};

/// Pose plus n landmark positions: an element of SLAM_n(3).
struct SlamState {
    Pose pose;
    std::vector<Vec3> landmarks;
};

Mat3 skew(const Vec3& v);

/// Inverse of skew(). Throws std::invalid_argument when the symmetric part
/// of `m` has Frobenius norm above 1e-6.
Vec3 vex(const Mat3& m);

/// (A - A^T) / 2
Mat3 antisym_project(const Mat3& a);

/// vex(antisym_project(A))
Vec3 upsilon(const Mat3& a);

/// 1/4 Tr(I - R), in [0, 1].
double so3_distance(const Rotation& r);
double so3_distance(const Mat3& r);

/// exp([omega * dt]_x), Rodrigues form.
Rotation so3_exp(const Vec3& omega, double dt);

/// Left Jacobian of SO(3) evaluated at phi.
Mat3 so3_left_jacobian(const Vec3& phi);

Mat4 wedge(const Twist& u);

/// exp([u]_^ dt) in closed form.
Pose se3_exp(const Twist& u, double dt);

/// Augmented adjoint [[R, 0], [[P]_x R, R]]; wedge(Ad * u) = T wedge(u) T^-1.
Mat6 adjoint_aug(const Pose& t);

Pose pose_inverse(const Pose& t);

/// Modified Gram-Schmidt over the columns, returning an orthonormal matrix
/// with positive determinant.
Mat3 gram_schmidt(const Mat3& m);

}  // namespace slamn
