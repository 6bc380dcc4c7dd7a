#include "slamn/filter_quat.hpp"

#include "slamn/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace slamn {

QuatFilterState QuatFilterState::from_matrix_state(const FilterState& fs) {
    return {UnitQuaternion::from_rotation(fs.pose_hat.rotation), fs.pose_hat.position, fs.landmarks_hat,
            fs.bias_hat};
}

FilterState QuatFilterState::to_matrix_state() const {
    return {Pose{quat_to_rot(q_hat), p_hat}, landmarks_hat, bias_hat};
}

namespace {

Vec3 body(const UnitQuaternion& q, const Vec3& x) { return rotate_by_quat(q, x, true); }
Vec3 inertial(const UnitQuaternion& q, const Vec3& x) { return rotate_by_quat(q, x, false); }

void check_finite(const QuatFilterState& fs, std::size_t step) {
    bool ok = std::isfinite(fs.q_hat.q0) && fs.q_hat.q.allFinite() && fs.p_hat.allFinite() &&
              fs.bias_hat.all_finite();
    for (const auto& p : fs.landmarks_hat) ok = ok && p.allFinite();
    if (!ok) throw NumericalError("non-finite filter state", step);
}

}  // namespace

QuatFilterState quat_imu_step(const QuatFilterState& fs, const MeasurementBundle& m, const AttitudeKernel& kernel,
                              const ImuGains& gains, double dt, const ImuOptions& options, std::size_t step,
                              ImuStepInfo* info) {
    const std::size_t n = fs.landmarks_hat.size();
    if (m.y.size() != n || m.imu_pairs.size() != kernel.weights.size())
        throw std::invalid_argument("quat_imu_step: measurement counts do not match the filter");
    const UnitQuaternion& q = fs.q_hat;

    std::vector<Vec3> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = fs.landmarks_hat[i] - inertial(q, m.y[i]) - fs.p_hat;

    Vec3 cross_sum = Vec3::Zero();
    Eigen::Matrix3d measured = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d predicted = Eigen::Matrix3d::Zero();
    for (std::size_t j = 0; j < m.imu_pairs.size(); ++j) {
        const auto& [ref, obs] = m.imu_pairs[j];
        const double s = kernel.weights[j];
        const Vec3 v_hat = body(q, ref);
        cross_sum += 0.5 * s * v_hat.cross(obs);
        measured += s * obs * ref.transpose();
        predicted += s * v_hat * ref.transpose();
    }
    const Vec3 ups = inertial(q, cross_sum);

    PiEstimate pi;
    const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3d>(predicted).singularValues();
    pi.condition = sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
    pi.well_conditioned = pi.condition < options.pi_cond_limit;
    if (pi.well_conditioned) pi.value = (measured * predicted.inverse()).trace();
    const double tau = attitude_gain_normalizer(kernel, pi, options.tau_floor);

    const double multiplicity = options.simplified_form ? 1.0 : static_cast<double>(n);
    const Vec3 ups_body = body(q, ups);
    Twist w;
    w.omega = multiplicity * (gains.k_w / tau) * ups_body;
    Twist bias_rate;
    bias_rate.omega = multiplicity * 0.5 * gains.gamma1.cwiseProduct(ups_body);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 body_e = body(q, e[i]);
        w.v -= (gains.k_2 / gains.alpha[i]) * body_e;
        bias_rate.omega -= (gains.gamma1 / gains.alpha[i]).cwiseProduct(skew(m.y[i]) * body_e);
        bias_rate.v -= (gains.gamma2 / gains.alpha[i]).cwiseProduct(body_e);
    }

    QuatFilterState next;
    next.bias_hat = fs.bias_hat + bias_rate * dt;
    const Twist& b_used = options.order == UpdateOrder::bias_first ? next.bias_hat : fs.bias_hat;
    const Twist u = m.u_m - b_used - w;
    next.q_hat = quat_kinematics_step(q, u.omega, dt);
    next.p_hat = fs.p_hat + inertial(q, so3_left_jacobian(u.omega * dt) * u.v * dt);
    next.landmarks_hat.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        next.landmarks_hat.push_back(fs.landmarks_hat[i] +
                                     dt * (-gains.k_1 * e[i] + inertial(q, skew(m.y[i]) * w.omega)));

    if (info) *info = {ups, pi.value, tau, tau == options.tau_floor};
    check_finite(next, step);
    return next;
}

}  // namespace slamn
