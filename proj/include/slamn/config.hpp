#pragma once

#include "slamn/filter_basic.hpp"
#include "slamn/filter_imu.hpp"
#include "slamn/world.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace slamn {

enum class FilterKind { basic, imu, imu_quat, both };

/// Parses "basic", "imu", "imu_quat" or "both"; throws ConfigError otherwise.
FilterKind parse_filter_kind(std::string_view name);
std::string_view to_string(FilterKind kind);

/// Filter names run for a kind, in output order. `both` runs basic and imu.
std::vector<std::string> filter_names(FilterKind kind);

struct InitConfig {
    /// Initial attitude estimate, row-major. Need only be close to SO(3);
    /// it is projected onto the nearest rotation.
    Mat3 r_hat = Mat3::Identity();
    Vec3 p_hat = Vec3::Zero();
    /// Empty means all landmark estimates start at the origin.
    std::vector<Vec3> landmarks_hat;
    Twist bias_hat;
};

struct RunConfig {
    WorldConfig world;
    FilterKind filter = FilterKind::both;
    BasicGains basic;
    ImuGains imu;
    InitConfig init;
    std::string output_dir = "out";
    std::size_t sample_stride = 1;
    bool simplified_form = false;
    UpdateOrder update_order = UpdateOrder::sequential;
};

/// Largest accepted Frobenius deviation of init.R_hat from orthonormality.
inline constexpr double kInitRotationTolerance = 1e-2;

/// Parses and validates a JSON document. Errors are ConfigError with a
/// message starting "line N:" pointing at the offending key or token.
RunConfig parse_run_config(std::string_view json_text);

/// Reads a file and parses it; the message is prefixed with the path.
RunConfig load_run_config(const std::filesystem::path& path);

/// Structural checks across sections (counts, signs, stride). Called by the
/// parsers; exposed for configs built in code.
void validate(const RunConfig& cfg);

/// Initial filter estimate described by cfg.init.
FilterState initial_filter_state(const RunConfig& cfg);

}  // namespace slamn
