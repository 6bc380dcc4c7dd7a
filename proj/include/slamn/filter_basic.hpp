#pragma once

#include "slamn/filter_state.hpp"
#include "slamn/world.hpp"

namespace slamn {

/// Gains of the feature-only filter. All entries must be strictly positive.
struct BasicGains {
    double k_w = 5.0;
    double k_1 = 5.0;
    Vec6 gamma = Vec6::Ones();  // diagonal of Gamma
    std::vector<double> alpha;  // one per landmark

    /// Throws ConfigError on a non-positive gain or an alpha count != n.
    void validate(std::size_t n) const;
};

/// W_U = -sum_i k_w Ad_{T_hat^-1} [[R_hat y_i + P_hat]_x; I] e_i
Twist basic_correction(const FilterState& fs, std::span<const Vec3> e, std::span<const Vec3> y,
                       const BasicGains& gains);

/// One discrete step of the feature-only filter:
///   T_hat <- T_hat exp([u_m - b_hat - W_U]^ dt)
///   b_hat <- b_hat - dt sum_i (Gamma / alpha_i) Ad_{T_hat}^T [[R_hat y_i + P_hat]_x; I] e_i
///   p_hat_i <- p_hat_i - dt k_1 e_i
/// with e_i and W_U evaluated on the incoming state. Throws NumericalError
/// (tagged with `step`) if the result is not finite.
FilterState basic_step(const FilterState& fs, const MeasurementBundle& m, const BasicGains& gains, double dt,
                       UpdateOrder order = UpdateOrder::sequential, std::size_t step = 0);

}  // namespace slamn
