#include "slamn/filter_basic.hpp"

#include "slamn/errors.hpp"

#include <cmath>
#include <string>

namespace slamn {

void BasicGains::validate(std::size_t n) const {
    if (!(k_w > 0.0) || !(k_1 > 0.0)) throw ConfigError("gains.basic: k_w and k_1 must be > 0");
    if (!((gamma.array() > 0.0).all())) throw ConfigError("gains.basic: gamma entries must be > 0");
    if (alpha.size() != n)
        throw ConfigError("gains.basic: alpha needs " + std::to_string(n) + " entries, got " +
                          std::to_string(alpha.size()));
    for (double a : alpha)
        if (!(a > 0.0)) throw ConfigError("gains.basic: alpha entries must be > 0");
}

namespace {

// [[R_hat y_i + P_hat]_x; I] e_i, the 6-vector shared by the correction and
// bias laws.
Vec6 feature_lever(const FilterState& fs, const Vec3& y, const Vec3& e) {
    Vec6 h;
    h << skew(fs.pose_hat.transform_point(y)) * e, e;
    return h;
}

}  // namespace

Twist basic_correction(const FilterState& fs, std::span<const Vec3> e, std::span<const Vec3> y,
                       const BasicGains& gains) {
    const Mat6 ad_inv = adjoint_aug(pose_inverse(fs.pose_hat));
    Vec6 w = Vec6::Zero();
    for (std::size_t i = 0; i < e.size(); ++i) w -= gains.k_w * (ad_inv * feature_lever(fs, y[i], e[i]));
    return Twist::from_vector(w);
}

FilterState basic_step(const FilterState& fs, const MeasurementBundle& m, const BasicGains& gains, double dt,
                       UpdateOrder order, std::size_t step) {
    const auto e = innovation_errors(fs, m.y);
    const Twist w = basic_correction(fs, e, m.y, gains);

    const Mat6 ad_t = adjoint_aug(fs.pose_hat).transpose();
    Vec6 bias_rate = Vec6::Zero();
    for (std::size_t i = 0; i < e.size(); ++i)
        bias_rate -= (gains.gamma / gains.alpha[i]).cwiseProduct(ad_t * feature_lever(fs, m.y[i], e[i]));

    FilterState next;
    next.bias_hat = fs.bias_hat + Twist::from_vector(bias_rate * dt);
    const Twist& b_used = order == UpdateOrder::bias_first ? next.bias_hat : fs.bias_hat;
    next.pose_hat = fs.pose_hat * se3_exp(m.u_m - b_used - w, dt);
    next.landmarks_hat.reserve(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) next.landmarks_hat.push_back(fs.landmarks_hat[i] - dt * gains.k_1 * e[i]);

    check_finite(next, step);
    return next;
}

}  // namespace slamn
