#pragma once

#include "slamn/filter_imu.hpp"
#include "slamn/quat.hpp"

namespace slamn {

/// IMU-aided filter state with the attitude carried as a unit quaternion.
struct QuatFilterState {
    UnitQuaternion q_hat;
    Vec3 p_hat = Vec3::Zero();
    std::vector<Vec3> landmarks_hat;
    Twist bias_hat;

    static QuatFilterState from_matrix_state(const FilterState& fs);
    FilterState to_matrix_state() const;
};

/// One step of the quaternion form of the IMU-aided filter. Every rotation
/// by R_hat or R_hat^T is done with Y(Q_hat, .) or Y(Q_hat^-1, .). Gains,
/// options and update order mean the same as in imu_step.
///   Q_hat <- normalize(Q_hat + dt/2 [[0, -chi^T], [chi, -[chi]_x]] Q_hat), chi = Omega_m - b_Omega - W_Omega
///   P_hat <- P_hat + Y(Q_hat, J_l(chi dt) (V_m - b_V - W_V) dt)
/// The position step is the exact solution of dP/dt = Y(Q_hat, v) while
/// chi and v are held over the interval.
QuatFilterState quat_imu_step(const QuatFilterState& fs, const MeasurementBundle& m, const AttitudeKernel& kernel,
                              const ImuGains& gains, double dt, const ImuOptions& options = {},
                              std::size_t step = 0, ImuStepInfo* info = nullptr);

}  // namespace slamn
