#include "slamn/world.hpp"

#include "slamn/errors.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace slamn {

std::size_t WorldConfig::step_count() const {
    return static_cast<std::size_t>(std::llround(duration / dt));
}

void validate(const WorldConfig& cfg) {
    if (cfg.landmarks.size() < 3)
        throw ConfigError("landmarks: at least 3 landmarks are required, got " +
                          std::to_string(cfg.landmarks.size()));
    for (const auto& p : cfg.landmarks)
        if (!p.allFinite()) throw ConfigError("landmarks: non-finite coordinate");
    if (cfg.imu_refs.size() < 2)
        throw ConfigError("imu_refs: at least 2 reference vectors are required");
    for (const auto& r : cfg.imu_refs)
        if (!r.allFinite() || r.norm() == 0.0) throw ConfigError("imu_refs: zero or non-finite reference");
    const Vec3 u1 = cfg.imu_refs[0].normalized();
    const Vec3 u2 = cfg.imu_refs[1].normalized();
    if (std::atan2(u1.cross(u2).norm(), std::abs(u1.dot(u2))) < kMinReferenceAngle)
        throw ConfigError("imu_refs: first two references are collinear");
    if (!cfg.sensor_weights.empty()) {
        if (cfg.sensor_weights.size() != cfg.imu_refs.size() + 1)
            throw ConfigError("sensor_weights: expected " + std::to_string(cfg.imu_refs.size() + 1) +
                              " weights (one per reference plus the cross-product direction)");
        double sum = 0.0;
        for (double s : cfg.sensor_weights) {
            if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("sensor_weights: weights must be finite and >= 0");
            sum += s;
        }
        if (!(sum > 0.0)) throw ConfigError("sensor_weights: weights sum to zero");
    }
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt: must be positive");
    if (!(cfg.duration >= 0.0) || !std::isfinite(cfg.duration)) throw ConfigError("duration: must be >= 0");
    const std::pair<const char*, double> stds[] = {{"noise_std_omega", cfg.noise_std_omega},
                                                   {"noise_std_v", cfg.noise_std_v},
                                                   {"feature_noise_std", cfg.feature_noise_std}};
    for (const auto& [key, v] : stds)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + ": must be finite and >= 0");
}

std::vector<ReferenceDirection> reference_directions(const WorldConfig& cfg) {
    std::vector<ReferenceDirection> dirs;
    dirs.reserve(cfg.imu_refs.size() + 1);
    for (const auto& r : cfg.imu_refs) dirs.push_back({r.normalized(), 1.0});
    dirs.push_back({dirs[0].inertial.cross(dirs[1].inertial).normalized(), 1.0});

    if (!cfg.sensor_weights.empty())
        for (std::size_t j = 0; j < dirs.size(); ++j) dirs[j].weight = cfg.sensor_weights[j];
    const double sum = std::accumulate(dirs.begin(), dirs.end(), 0.0,
                                       [](double acc, const ReferenceDirection& d) { return acc + d.weight; });
    for (auto& d : dirs) d.weight *= 3.0 / sum;
    return dirs;
}

Rng make_rng(std::uint64_t seed, std::uint64_t run_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(run_index), static_cast<std::uint32_t>(run_index >> 32)};
    return Rng(seq);
}

TrueState initial_true_state(const WorldConfig& cfg) { return {cfg.initial_pose, cfg.landmarks, 0.0}; }

TrueState propagate_true(const TrueState& state, const Twist& u, double dt) {
    return {state.pose * se3_exp(u, dt), state.landmarks, state.t + dt};
}

namespace {

Vec3 gaussian3(double sigma, Rng& rng) {
    if (sigma == 0.0) return Vec3::Zero();
    std::normal_distribution<double> n(0.0, sigma);
    // Sequenced explicitly; brace-init evaluation order is not relied upon.
    const double x = n(rng);
    const double y = n(rng);
    const double z = n(rng);
    return {x, y, z};
}

}  // namespace

Twist sample_velocity(const Twist& u_true, const WorldConfig& cfg, Rng& rng) {
    Twist out = u_true + cfg.bias();
    out.omega += gaussian3(cfg.noise_std_omega, rng);
    out.v += gaussian3(cfg.noise_std_v, rng);
    return out;
}

std::vector<Vec3> sample_features(const TrueState& state, const WorldConfig& cfg, Rng& rng) {
    const Mat3 rt = state.pose.rotation.matrix().transpose();
    std::vector<Vec3> y;
    y.reserve(state.landmarks.size());
    for (const auto& p : state.landmarks) y.push_back(rt * (p - state.pose.position) + gaussian3(cfg.feature_noise_std, rng));
    return y;
}

std::vector<VectorPair> make_vector_pairs(std::span<const Vec3> refs, std::span<const Vec3> observations) {
    if (refs.size() < 2) throw ConfigError("imu_refs: at least 2 reference vectors are required");
    if (observations.size() != refs.size())
        throw std::invalid_argument("vector observations: expected " + std::to_string(refs.size()) + ", got " +
                                    std::to_string(observations.size()));
    std::vector<VectorPair> pairs;
    pairs.reserve(refs.size() + 1);
    for (std::size_t j = 0; j < refs.size(); ++j) {
        if (!(observations[j].norm() > 0.0) || !observations[j].allFinite())
            throw std::invalid_argument("vector observations: zero or non-finite observation");
        pairs.push_back({refs[j].normalized(), observations[j].normalized()});
    }
    const Vec3 ref3 = pairs[0].reference.cross(pairs[1].reference);
    const Vec3 body3 = pairs[0].body.cross(pairs[1].body);
    if (ref3.norm() < std::sin(kMinReferenceAngle))
        throw ConfigError("imu_refs: first two references are collinear");
    if (!(body3.norm() > 0.0)) throw std::invalid_argument("vector observations: first two are parallel");
    pairs.push_back({ref3.normalized(), body3.normalized()});
    return pairs;
}

std::vector<VectorPair> sample_imu(const TrueState& state, const WorldConfig& cfg, Rng& /*rng*/) {
    const Mat3 rt = state.pose.rotation.matrix().transpose();
    std::vector<Vec3> obs;
    obs.reserve(cfg.imu_refs.size());
    for (const auto& r : cfg.imu_refs) obs.push_back(rt * r);
    return make_vector_pairs(cfg.imu_refs, obs);
}

WorldSimulator::WorldSimulator(WorldConfig cfg, std::uint64_t run_index)
    : cfg_(std::move(cfg)), rng_(make_rng(cfg_.rng_seed, run_index)), state_(initial_true_state(cfg_)) {
    validate(cfg_);
}

MeasurementBundle WorldSimulator::measure() {
    MeasurementBundle m;
    m.t = state_.t;
    m.u_m = sample_velocity(cfg_.true_twist(state_.t + 0.5 * cfg_.dt), cfg_, rng_);
    m.y = sample_features(state_, cfg_, rng_);
    m.imu_pairs = sample_imu(state_, cfg_, rng_);
    return m;
}

void WorldSimulator::advance() {
    const double t0 = static_cast<double>(step_) * cfg_.dt;
    state_ = propagate_true(state_, cfg_.true_twist(t0 + 0.5 * cfg_.dt), cfg_.dt);
    ++step_;
    // Recompute t from the index so long runs do not accumulate round-off.
    state_.t = static_cast<double>(step_) * cfg_.dt;
}

}  // namespace slamn
