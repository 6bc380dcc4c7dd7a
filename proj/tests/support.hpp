#pragma once

#include "slamn/config.hpp"
#include "slamn/lie.hpp"
#include "slamn/quat.hpp"

#include <cmath>
#include <random>
#include <string>

namespace slamn::test {

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

inline Mat3 random_mat(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = u(rng);
    return m;
}

// Uniform on SO(3): normalized Gaussian quaternion.
inline Rotation random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double w = n(rng);
    return quat_to_rot(UnitQuaternion::normalized(w, Vec3(n(rng), n(rng), n(rng))));
}

inline Pose random_pose(std::mt19937_64& rng) { return {random_rotation(rng), random_vec(rng, 5.0)}; }

inline Twist random_twist(std::mt19937_64& rng) { return {random_vec(rng, 2.0), random_vec(rng, 3.0)}; }

inline Mat3 rot_z(double a) {
    Mat3 r;
    r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return r;
}

inline std::string config_path(const std::string& name) { return std::string(SLAMN_CONFIG_DIR) + "/" + name; }

inline RunConfig paper_config(const std::string& name) { return load_run_config(config_path(name)); }

inline void disable_noise(RunConfig& cfg) {
    cfg.world.noise_std_omega = 0.0;
    cfg.world.noise_std_v = 0.0;
    cfg.world.feature_noise_std = 0.0;
}

}  // namespace slamn::test
