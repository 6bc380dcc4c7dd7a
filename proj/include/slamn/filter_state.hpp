#pragma once

#include "slamn/lie.hpp"

#include <span>
#include <vector>

namespace slamn {

/// Estimated pose, landmark positions and velocity-bias estimate.
struct FilterState {
    Pose pose_hat;
    std::vector<Vec3> landmarks_hat;
    Twist bias_hat;
};

/// How the discrete step orders its bias update relative to the pose update.
///  - sequential: every update uses sample-k quantities; the pose is
///    propagated with the bias estimate from before the step.
///  - bias_first: the bias is updated first and the pose is propagated with
///    the updated estimate (semi-implicit in the bias/feature loop).
enum class UpdateOrder { sequential, bias_first };

/// e_i = p_hat_i - R_hat y_i - P_hat. Throws std::invalid_argument on a
/// count mismatch.
std::vector<Vec3> innovation_errors(const FilterState& fs, std::span<const Vec3> y);

/// Verifies that every element of the state is finite; throws NumericalError
/// carrying `step` otherwise.
void check_finite(const FilterState& fs, std::size_t step);

}  // namespace slamn
