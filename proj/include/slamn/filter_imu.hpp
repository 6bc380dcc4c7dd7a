#pragma once

#include "slamn/filter_state.hpp"
#include "slamn/world.hpp"

namespace slamn {

struct ImuGains {
    double k_w = 5.0;
    double k_1 = 5.0;
    double k_2 = 20.0;
    Vec3 gamma1 = Vec3::Constant(3.0);    // diagonal of Gamma_1
    Vec3 gamma2 = Vec3::Constant(100.0);  // diagonal of Gamma_2
    std::vector<double> alpha;            // one per landmark

    void validate(std::size_t n) const;
};

/// M = sum_j s_j v_j v_j^T over the inertial reference directions, its trace
/// complement M_breve = Tr(M) I - M, and the smallest eigenvalue of M_breve.
/// Constant for a run since the references are.
struct AttitudeKernel {
    Mat3 m = Mat3::Identity();
    Mat3 m_breve = 2.0 * Mat3::Identity();
    double lambda_min = 2.0;
    std::vector<double> weights;
};

/// Throws ConfigError if the weights do not sum to 3 (within 1e-9), a weight
/// is negative, or M is rank deficient (smallest eigenvalue <= 1e-6).
AttitudeKernel build_kernel(std::span<const Vec3> refs, std::span<const double> weights);

/// Convenience overload taking the output of reference_directions().
AttitudeKernel build_kernel(std::span<const ReferenceDirection> dirs);

/// R_hat sum_j (s_j / 2) v_hat_j x v_j with v_hat_j = R_hat^T v_ref_j; equals
/// vex(P_a(R_tilde M)) for exact measurements.
Vec3 upsilon_meas(const Rotation& r_hat, std::span<const VectorPair> pairs, std::span<const double> weights);

/// 1/4 sum_j (1 - s_j v_hat_j . v_j); equals 1/4 Tr((I - R_tilde) M) for
/// exact measurements.
double attitude_distance_meas(const Rotation& r_hat, std::span<const VectorPair> pairs,
                              std::span<const double> weights);

struct PiEstimate {
    double value = 3.0;
    double condition = 1.0;  // 2-norm condition number of the inverted matrix
    bool well_conditioned = true;
};

/// Tr{(sum s_j v_j v_ref_j^T)(sum s_j v_hat_j v_ref_j^T)^-1}; equals Tr(R_tilde)
/// for exact measurements. `well_conditioned` is false when the condition
/// number of the inverted matrix reaches `cond_limit`; `value` is then
/// meaningless.
PiEstimate pi_meas(const Rotation& r_hat, std::span<const VectorPair> pairs, std::span<const double> weights,
                   double cond_limit = 1e8);

struct ImuOptions {
    /// false: the attitude terms of W_U and the bias law are summed over all
    /// n landmarks (block form). true: they appear once.
    bool simplified_form = false;
    UpdateOrder order = UpdateOrder::sequential;
    double tau_floor = 1e-6;
    double pi_cond_limit = 1e8;
};

/// lambda_min (1 + pi), floored at `floor`; returns `floor` when pi could not
/// be computed.
double attitude_gain_normalizer(const AttitudeKernel& kernel, const PiEstimate& pi, double floor);

/// [W_Omega; W_V] with W_Omega = c (k_w / tau) R_hat^T Upsilon (c = n in the
/// block form, 1 in the simplified form) and W_V = -sum_i (k_2 / alpha_i) R_hat^T e_i.
Twist imu_correction(const FilterState& fs, std::span<const Vec3> e, const Vec3& upsilon, double tau,
                     const ImuGains& gains, bool simplified_form = false);

struct ImuStepInfo {
    Vec3 upsilon = Vec3::Zero();
    double pi = 3.0;
    double tau = 0.0;
    bool tau_clamped = false;
};

/// One discrete step of the IMU-aided filter. Updates, all from the incoming
/// state and sample-k measurements:
///   T_hat <- T_hat exp([u_m - b_hat - W_U]^ dt)
///   b_Omega <- b_Omega + dt sum_i (Gamma_1 / alpha_i) (alpha_i/2 R^T Upsilon - [y_i]_x R^T e_i)
///   b_V <- b_V - dt sum_i (Gamma_2 / alpha_i) R^T e_i
///   p_hat_i <- p_hat_i + dt (-k_1 e_i + R_hat [y_i]_x W_Omega)
FilterState imu_step(const FilterState& fs, const MeasurementBundle& m, const AttitudeKernel& kernel,
                     const ImuGains& gains, double dt, const ImuOptions& options = {}, std::size_t step = 0,
                     ImuStepInfo* info = nullptr);

}  // namespace slamn
