#pragma once

#include "slamn/filter_basic.hpp"
#include "slamn/filter_imu.hpp"

#include <string>
#include <vector>

namespace slamn {

struct ErrorReport {
    double t = 0.0;
    double att_dist = 0.0;  // ||R_hat R^T||_I
    double pos_err = 0.0;   // ||P - P_hat||
    std::vector<double> feat_err;
    std::vector<double> e_norms;
    double bias_err = 0.0;  // ||b_U - b_hat_U||
    double lyap = 0.0;
};

enum class LyapunovKind { basic, imu };

/// Weights of the candidate function
///   L = sum_i |e_i|^2 / (2 alpha_i) + c/4 Tr((I - R_tilde) M) + 1/2 b_tilde^T Gamma^-1 b_tilde
/// where the attitude term (c = attitude_weight) only enters for the IMU kind.
struct LyapunovWeights {
    LyapunovKind kind = LyapunovKind::basic;
    std::vector<double> alpha;
    Vec6 gamma = Vec6::Ones();
    Mat3 m = Mat3::Identity();
    double attitude_weight = 1.0;
};

LyapunovWeights lyapunov_weights(const BasicGains& gains);

/// The attitude weight is n in the block form (the Upsilon terms of the bias
/// law are summed n times) and 1 in the simplified form.
LyapunovWeights lyapunov_weights(const ImuGains& gains, const AttitudeKernel& kernel, bool simplified_form);

/// Errors of `fs` against the truth. R_tilde = R_hat R^T.
ErrorReport evaluate(const TrueState& truth, const FilterState& fs, const Twist& bias_true,
                     const LyapunovWeights& lyap);

/// Candidate function value alone, from the same inputs.
double lyapunov_value(const TrueState& truth, const FilterState& fs, const Twist& bias_true,
                      const LyapunovWeights& lyap);

/// `t,att_dist,pos_err,feat_err_1..n,e_norm_1..n,bias_err,lyap`
std::string csv_header(std::size_t n);
std::string csv_row(const ErrorReport& r);

/// Shortest decimal text that parses back to the same double.
void append_number(std::string& out, double v);

}  // namespace slamn
