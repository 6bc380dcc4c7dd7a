#pragma once

#include "slamn/lie.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace slamn {

/// Per-axis affine function of time: value(t) = offset + slope * t.
struct LinearTimeFunction {
    Vec3 offset = Vec3::Zero();
    Vec3 slope = Vec3::Zero();

    static LinearTimeFunction constant(const Vec3& c) { return {c, Vec3::Zero()}; }
    Vec3 operator()(double t) const { return offset + slope * t; }
};

struct WorldConfig {
    std::vector<Vec3> landmarks;
    /// Inertial-frame reference vectors r_j (not necessarily unit length).
    std::vector<Vec3> imu_refs;
    /// Confidence weights s_j, one per reference direction including the
    /// synthesized cross-product direction. Empty means equal weights.
    std::vector<double> sensor_weights;
    LinearTimeFunction omega_true;
    LinearTimeFunction v_true;
    Vec3 bias_omega = Vec3::Zero();
    Vec3 bias_v = Vec3::Zero();
    double noise_std_omega = 0.0;
    double noise_std_v = 0.0;
    double feature_noise_std = 0.0;
    double dt = 0.001;
    double duration = 40.0;
    std::uint64_t rng_seed = 0;
    /// True pose at t = 0.
    Pose initial_pose;

    Twist bias() const { return {bias_omega, bias_v}; }
    Twist true_twist(double t) const { return {omega_true(t), v_true(t)}; }
    std::size_t step_count() const;
};

/// Minimum angle (rad) between the first two reference directions.
inline constexpr double kMinReferenceAngle = 1e-3;

/// Throws ConfigError when the world violates a structural requirement
/// (fewer than three landmarks, collinear references, bad weights, ...).
void validate(const WorldConfig& cfg);

struct ReferenceDirection {
    Vec3 inertial;  // unit
    double weight = 1.0;
};

/// Normalized reference directions plus the synthesized third direction
/// (normalized cross product of the first two), with weights rescaled so
/// that they sum to 3.
std::vector<ReferenceDirection> reference_directions(const WorldConfig& cfg);

struct TrueState {
    Pose pose;
    std::vector<Vec3> landmarks;
    double t = 0.0;
};

/// Paired unit vectors: inertial reference and its body-frame observation.
struct VectorPair {
    Vec3 reference;
    Vec3 body;
};

struct MeasurementBundle {
    Twist u_m;
    std::vector<Vec3> y;
    std::vector<VectorPair> imu_pairs;
    double t = 0.0;
};

using Rng = std::mt19937_64;

/// Engine seeded from (seed, run index) through std::seed_seq.
Rng make_rng(std::uint64_t seed, std::uint64_t run_index);

TrueState initial_true_state(const WorldConfig& cfg);

/// pose <- pose * se3_exp(u, dt); landmarks untouched; t <- t + dt.
TrueState propagate_true(const TrueState& state, const Twist& u, double dt);

/// u_true + bias + N(0, sigma) per axis. No draws are made for an axis group
/// whose sigma is zero.
Twist sample_velocity(const Twist& u_true, const WorldConfig& cfg, Rng& rng);

/// y_i = R^T (p_i - P) + N(0, feature_noise_std).
std::vector<Vec3> sample_features(const TrueState& state, const WorldConfig& cfg, Rng& rng);

/// Normalizes each (reference, observation) pair and appends the pair built
/// from the normalized cross products of the first two.
std::vector<VectorPair> make_vector_pairs(std::span<const Vec3> refs, std::span<const Vec3> observations);

/// Normalized (reference, body) pairs for each configured reference followed
/// by the synthesized cross-product pair.
std::vector<VectorPair> sample_imu(const TrueState& state, const WorldConfig& cfg, Rng& rng);

/// Drives the true trajectory and produces one measurement bundle per step.
/// The bundle at step k carries the velocity averaged over [t_k, t_k + dt]
/// (the interval midpoint, exact for affine velocity profiles), together
/// with feature and vector observations taken at t_k.
class WorldSimulator {
public:
    WorldSimulator(WorldConfig cfg, std::uint64_t run_index = 0);

    const WorldConfig& config() const { return cfg_; }
    const TrueState& state() const { return state_; }
    std::size_t step_index() const { return step_; }

    MeasurementBundle measure();
    /// Advances the truth by one dt using the interval-mean twist.
    void advance();

private:
    WorldConfig cfg_;
    Rng rng_;
    TrueState state_;
    std::size_t step_ = 0;
};

}  // namespace slamn
