#include "slamn/metrics.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace slamn {

LyapunovWeights lyapunov_weights(const BasicGains& gains) {
    LyapunovWeights w;
    w.kind = LyapunovKind::basic;
    w.alpha = gains.alpha;
    w.gamma = gains.gamma;
    return w;
}

LyapunovWeights lyapunov_weights(const ImuGains& gains, const AttitudeKernel& kernel, bool simplified_form) {
    LyapunovWeights w;
    w.kind = LyapunovKind::imu;
    w.alpha = gains.alpha;
    w.gamma << gains.gamma1, gains.gamma2;
    w.m = kernel.m;
    w.attitude_weight = simplified_form ? 1.0 : static_cast<double>(gains.alpha.size());
    return w;
}

namespace {

struct GeometricErrors {
    Mat3 r_tilde;
    std::vector<Vec3> e;  // p_tilde_i - P_tilde
    Twist b_tilde;
};

GeometricErrors geometric_errors(const TrueState& truth, const FilterState& fs, const Twist& bias_true) {
    const std::size_t n = truth.landmarks.size();
    if (fs.landmarks_hat.size() != n)
        throw std::invalid_argument("evaluate: " + std::to_string(fs.landmarks_hat.size()) +
                                    " estimated landmarks for " + std::to_string(n));
    GeometricErrors g;
    g.r_tilde = fs.pose_hat.rotation.matrix() * truth.pose.rotation.matrix().transpose();
    const Vec3 p_tilde = fs.pose_hat.position - g.r_tilde * truth.pose.position;
    g.e.reserve(n);
    for (std::size_t i = 0; i < n; ++i) g.e.push_back(fs.landmarks_hat[i] - g.r_tilde * truth.landmarks[i] - p_tilde);
    g.b_tilde = bias_true - fs.bias_hat;
    return g;
}

double lyapunov_from(const GeometricErrors& g, const LyapunovWeights& w) {
    double l = 0.0;
    for (std::size_t i = 0; i < g.e.size(); ++i) l += g.e[i].squaredNorm() / (2.0 * w.alpha[i]);
    if (w.kind == LyapunovKind::imu)
        l += w.attitude_weight * 0.25 * ((Mat3::Identity() - g.r_tilde) * w.m).trace();
    const Vec6 b = g.b_tilde.vector();
    l += 0.5 * b.dot(b.cwiseQuotient(w.gamma));
    return l;
}

}  // namespace

ErrorReport evaluate(const TrueState& truth, const FilterState& fs, const Twist& bias_true,
                     const LyapunovWeights& lyap) {
    const GeometricErrors g = geometric_errors(truth, fs, bias_true);
    ErrorReport r;
    r.t = truth.t;
    r.att_dist = so3_distance(g.r_tilde);
    r.pos_err = (truth.pose.position - fs.pose_hat.position).norm();
    for (std::size_t i = 0; i < g.e.size(); ++i) {
        r.feat_err.push_back((truth.landmarks[i] - fs.landmarks_hat[i]).norm());
        r.e_norms.push_back(g.e[i].norm());
    }
    r.bias_err = g.b_tilde.vector().norm();
    r.lyap = lyapunov_from(g, lyap);
    return r;
}

double lyapunov_value(const TrueState& truth, const FilterState& fs, const Twist& bias_true,
                      const LyapunovWeights& lyap) {
    return lyapunov_from(geometric_errors(truth, fs, bias_true), lyap);
}

std::string csv_header(std::size_t n) {
    std::string h = "t,att_dist,pos_err";
    for (std::size_t i = 1; i <= n; ++i) h += ",feat_err_" + std::to_string(i);
    for (std::size_t i = 1; i <= n; ++i) h += ",e_norm_" + std::to_string(i);
    h += ",bias_err,lyap";
    return h;
}

void append_number(std::string& out, double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
}

std::string csv_row(const ErrorReport& r) {
    std::string s;
    s.reserve(256);
    append_number(s, r.t);
    for (double v : {r.att_dist, r.pos_err}) {
        s += ',';
        append_number(s, v);
    }
    for (const auto* list : {&r.feat_err, &r.e_norms})
        for (double v : *list) {
            s += ',';
            append_number(s, v);
        }
    for (double v : {r.bias_err, r.lyap}) {
        s += ',';
        append_number(s, v);
    }
    return s;
}

}  // namespace slamn
