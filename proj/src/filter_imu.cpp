#include "slamn/filter_imu.hpp"

#include "slamn/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace slamn {

void ImuGains::validate(std::size_t n) const {
    if (!(k_w > 0.0) || !(k_1 > 0.0) || !(k_2 > 0.0)) throw ConfigError("gains.imu: k_w, k_1 and k_2 must be > 0");
    if (!((gamma1.array() > 0.0).all()) || !((gamma2.array() > 0.0).all()))
        throw ConfigError("gains.imu: gamma1 and gamma2 entries must be > 0");
    if (alpha.size() != n)
        throw ConfigError("gains.imu: alpha needs " + std::to_string(n) + " entries, got " +
                          std::to_string(alpha.size()));
    for (double a : alpha)
        if (!(a > 0.0)) throw ConfigError("gains.imu: alpha entries must be > 0");
}

AttitudeKernel build_kernel(std::span<const Vec3> refs, std::span<const double> weights) {
    if (refs.size() != weights.size()) throw ConfigError("attitude kernel: one weight per reference direction");
    double sum = 0.0;
    AttitudeKernel k;
    k.m.setZero();
    for (std::size_t j = 0; j < refs.size(); ++j) {
        if (!(weights[j] >= 0.0)) throw ConfigError("attitude kernel: negative weight");
        const Vec3 u = refs[j].normalized();
        k.m += weights[j] * u * u.transpose();
        sum += weights[j];
    }
    if (std::abs(sum - 3.0) > 1e-9) throw ConfigError("attitude kernel: weights must sum to 3");
    k.m = 0.5 * (k.m + k.m.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig_m(Eigen::Matrix3d(k.m), Eigen::EigenvaluesOnly);
    if (eig_m.eigenvalues().minCoeff() <= 1e-6)
        throw ConfigError("attitude kernel: reference directions do not span 3D (rank(M) < 3)");

    k.m_breve = k.m.trace() * Mat3::Identity() - k.m;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig_b(Eigen::Matrix3d(k.m_breve), Eigen::EigenvaluesOnly);
    k.lambda_min = eig_b.eigenvalues().minCoeff();
    k.weights.assign(weights.begin(), weights.end());
    return k;
}

AttitudeKernel build_kernel(std::span<const ReferenceDirection> dirs) {
    std::vector<Vec3> refs;
    std::vector<double> w;
    for (const auto& d : dirs) {
        refs.push_back(d.inertial);
        w.push_back(d.weight);
    }
    return build_kernel(refs, w);
}

namespace {

void check_pairs(std::span<const VectorPair> pairs, std::span<const double> weights) {
    if (pairs.size() != weights.size())
        throw std::invalid_argument("vector measurements: " + std::to_string(pairs.size()) + " pairs for " +
                                    std::to_string(weights.size()) + " weights");
}

}  // namespace

Vec3 upsilon_meas(const Rotation& r_hat, std::span<const VectorPair> pairs, std::span<const double> weights) {
    check_pairs(pairs, weights);
    const Mat3 rt = r_hat.matrix().transpose();
    Vec3 acc = Vec3::Zero();
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const Vec3 v_hat = rt * pairs[j].reference;
        acc += 0.5 * weights[j] * v_hat.cross(pairs[j].body);
    }
    return r_hat * acc;
}

double attitude_distance_meas(const Rotation& r_hat, std::span<const VectorPair> pairs,
                              std::span<const double> weights) {
    check_pairs(pairs, weights);
    const Mat3 rt = r_hat.matrix().transpose();
    double acc = 0.0;
    for (std::size_t j = 0; j < pairs.size(); ++j)
        acc += 1.0 - weights[j] * (rt * pairs[j].reference).dot(pairs[j].body);
    return 0.25 * acc;
}

PiEstimate pi_meas(const Rotation& r_hat, std::span<const VectorPair> pairs, std::span<const double> weights,
                   double cond_limit) {
    check_pairs(pairs, weights);
    const Mat3 rt = r_hat.matrix().transpose();
    Eigen::Matrix3d measured = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d predicted = Eigen::Matrix3d::Zero();
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        measured += weights[j] * pairs[j].body * pairs[j].reference.transpose();
        predicted += weights[j] * (rt * pairs[j].reference) * pairs[j].reference.transpose();
    }
    PiEstimate out;
    const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3d>(predicted).singularValues();
    out.condition = sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
    out.well_conditioned = out.condition < cond_limit;
    if (out.well_conditioned) out.value = (measured * predicted.inverse()).trace();
    return out;
}

double attitude_gain_normalizer(const AttitudeKernel& kernel, const PiEstimate& pi, double floor) {
    if (!pi.well_conditioned) return floor;
    return std::max(kernel.lambda_min * (1.0 + pi.value), floor);
}

Twist imu_correction(const FilterState& fs, std::span<const Vec3> e, const Vec3& upsilon, double tau,
                     const ImuGains& gains, bool simplified_form) {
    const Mat3 rt = fs.pose_hat.rotation.matrix().transpose();
    const double multiplicity = simplified_form ? 1.0 : static_cast<double>(e.size());
    Twist w;
    w.omega = multiplicity * (gains.k_w / tau) * (rt * upsilon);
    for (std::size_t i = 0; i < e.size(); ++i) w.v -= (gains.k_2 / gains.alpha[i]) * (rt * e[i]);
    return w;
}

FilterState imu_step(const FilterState& fs, const MeasurementBundle& m, const AttitudeKernel& kernel,
                     const ImuGains& gains, double dt, const ImuOptions& options, std::size_t step,
                     ImuStepInfo* info) {
    const auto e = innovation_errors(fs, m.y);
    const Rotation& r_hat = fs.pose_hat.rotation;
    const Mat3 rt = r_hat.matrix().transpose();

    const Vec3 ups = upsilon_meas(r_hat, m.imu_pairs, kernel.weights);
    const PiEstimate pi = pi_meas(r_hat, m.imu_pairs, kernel.weights, options.pi_cond_limit);
    const double tau = attitude_gain_normalizer(kernel, pi, options.tau_floor);
    const Twist w = imu_correction(fs, e, ups, tau, gains, options.simplified_form);

    const double multiplicity = options.simplified_form ? 1.0 : static_cast<double>(e.size());
    Twist bias_rate;
    bias_rate.omega = multiplicity * 0.5 * gains.gamma1.cwiseProduct(rt * ups);
    for (std::size_t i = 0; i < e.size(); ++i) {
        const Vec3 body_e = rt * e[i];
        bias_rate.omega -= (gains.gamma1 / gains.alpha[i]).cwiseProduct(skew(m.y[i]) * body_e);
        bias_rate.v -= (gains.gamma2 / gains.alpha[i]).cwiseProduct(body_e);
    }

    FilterState next;
    next.bias_hat = fs.bias_hat + bias_rate * dt;
    const Twist& b_used = options.order == UpdateOrder::bias_first ? next.bias_hat : fs.bias_hat;
    next.pose_hat = fs.pose_hat * se3_exp(m.u_m - b_used - w, dt);
    next.landmarks_hat.reserve(e.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        next.landmarks_hat.push_back(fs.landmarks_hat[i] -
                                     dt * (gains.k_1 * e[i] - r_hat * (skew(m.y[i]) * w.omega)));

    if (info) *info = {ups, pi.value, tau, tau == options.tau_floor};
    check_finite(next, step);
    return next;
}

}  // namespace slamn
