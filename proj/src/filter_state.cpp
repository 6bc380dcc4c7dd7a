#include "slamn/filter_state.hpp"

#include "slamn/errors.hpp"

#include <stdexcept>
#include <string>

namespace slamn {

std::vector<Vec3> innovation_errors(const FilterState& fs, std::span<const Vec3> y) {
    if (y.size() != fs.landmarks_hat.size())
        throw std::invalid_argument("innovation_errors: " + std::to_string(y.size()) + " measurements for " +
                                    std::to_string(fs.landmarks_hat.size()) + " landmarks");
    std::vector<Vec3> e;
    e.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        e.push_back(fs.landmarks_hat[i] - fs.pose_hat.transform_point(y[i]));
    return e;
}

void check_finite(const FilterState& fs, std::size_t step) {
    bool ok = fs.pose_hat.rotation.matrix().allFinite() && fs.pose_hat.position.allFinite() &&
              fs.bias_hat.all_finite();
    for (const auto& p : fs.landmarks_hat) ok = ok && p.allFinite();
    if (!ok) throw NumericalError("non-finite filter state", step);
}

}  // namespace slamn
