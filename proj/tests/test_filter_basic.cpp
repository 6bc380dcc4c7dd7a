#include "slamn/errors.hpp"
#include "slamn/filter_basic.hpp"
#include "slamn/world.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

using namespace slamn;
using slamn::test::random_pose;
using slamn::test::random_twist;
using slamn::test::random_vec;

namespace {

BasicGains gains_for(std::size_t n, double k_w = 5.0) {
    BasicGains g;
    g.k_w = k_w;
    g.gamma << 3, 3, 3, 100, 100, 100;
    g.alpha.assign(n, 0.1);
    return g;
}

// [[R, 0], [[P]_x R, R]] assembled block by block.
Mat6 adjoint_oracle(const Mat3& r, const Vec3& p) {
    Mat6 a = Mat6::Zero();
    a.topLeftCorner<3, 3>() = r;
    a.bottomLeftCorner<3, 3>() = skew(p) * r;
    a.bottomRightCorner<3, 3>() = r;
    return a;
}

Eigen::Matrix<double, 6, 3> stacked(const Mat3& r, const Vec3& p, const Vec3& y) {
    Eigen::Matrix<double, 6, 3> s;
    s.topRows<3>() = skew(r * y + p);
    s.bottomRows<3>() = Mat3::Identity();
    return s;
}

struct Scene {
    FilterState fs;
    MeasurementBundle m;
};

Scene random_scene(std::mt19937_64& rng, std::size_t n) {
    Scene s;
    s.fs.pose_hat = random_pose(rng);
    s.fs.bias_hat = random_twist(rng);
    for (std::size_t i = 0; i < n; ++i) {
        s.fs.landmarks_hat.push_back(random_vec(rng, 10.0));
        s.m.y.push_back(random_vec(rng, 10.0));
    }
    s.m.u_m = random_twist(rng);
    return s;
}

}  // namespace

TEST(InnovationErrors, ReadOff) {
    FilterState fs;
    fs.landmarks_hat = {{1, 1, 1}};
    const std::vector<Vec3> y{{1, 0, 0}};
    EXPECT_EQ(innovation_errors(fs, y)[0], Vec3(0, 1, 1));
}

TEST(InnovationErrors, ZeroForConsistentEstimate) {
    std::mt19937_64 rng(1);
    FilterState fs;
    fs.pose_hat = random_pose(rng);
    std::vector<Vec3> y;
    for (int i = 0; i < 4; ++i) {
        y.push_back(random_vec(rng, 10.0));
        fs.landmarks_hat.push_back(fs.pose_hat.transform_point(y.back()));
    }
    for (const Vec3& e : innovation_errors(fs, y)) EXPECT_LT(e.norm(), 1e-12);
}

TEST(InnovationErrors, CountMismatch) {
    FilterState fs;
    fs.landmarks_hat.resize(3, Vec3::Zero());
    EXPECT_THROW(innovation_errors(fs, std::vector<Vec3>(2, Vec3::Zero())), std::invalid_argument);
}

TEST(BasicCorrection, ZeroErrorsGiveZero) {
    std::mt19937_64 rng(2);
    const Scene s = random_scene(rng, 4);
    const std::vector<Vec3> e(4, Vec3::Zero());
    EXPECT_EQ(basic_correction(s.fs, e, s.m.y, gains_for(4)).vector(), Vec6::Zero());
}

TEST(BasicCorrection, SingleFeatureHandValue) {
    FilterState fs;
    fs.landmarks_hat = {Vec3::Zero()};
    const std::vector<Vec3> y{{1, 0, 0}}, e{{0, 1, 0}};
    const Vec6 w = basic_correction(fs, e, y, gains_for(1, 1.0)).vector();
    Vec6 expected;
    expected << 0, 0, -1, 0, -1, 0;
    EXPECT_LT((w - expected).norm(), 1e-15);
}

TEST(BasicCorrection, LinearInGain) {
    std::mt19937_64 rng(3);
    const Scene s = random_scene(rng, 4);
    const auto e = innovation_errors(s.fs, s.m.y);
    const Vec6 w1 = basic_correction(s.fs, e, s.m.y, gains_for(4, 1.5)).vector();
    const Vec6 w2 = basic_correction(s.fs, e, s.m.y, gains_for(4, 3.0)).vector();
    EXPECT_LT((w2 - 2.0 * w1).norm(), 1e-12 * w1.norm());
}

TEST(BasicCorrection, MatchesBlockOracle) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const Scene s = random_scene(rng, 5);
        const auto e = innovation_errors(s.fs, s.m.y);
        const Mat3 r = s.fs.pose_hat.rotation.matrix();
        const Vec3 p = s.fs.pose_hat.position;
        const Mat6 ad_inv = adjoint_oracle(r.transpose(), -r.transpose() * p);
        Vec6 oracle = Vec6::Zero();
        for (std::size_t i = 0; i < e.size(); ++i) oracle -= 5.0 * ad_inv * stacked(r, p, s.m.y[i]) * e[i];
        const Vec6 w = basic_correction(s.fs, e, s.m.y, gains_for(5)).vector();
        EXPECT_LT((w - oracle).norm(), 1e-10 * (1.0 + oracle.norm()));
    }
}

TEST(BasicStep, ExactStatePropagatesWithTrueTwist) {
    std::mt19937_64 rng(5);
    FilterState fs;
    fs.pose_hat = random_pose(rng);
    MeasurementBundle m;
    m.u_m = random_twist(rng);
    for (int i = 0; i < 4; ++i) {
        m.y.push_back(random_vec(rng, 10.0));
        fs.landmarks_hat.push_back(fs.pose_hat.transform_point(m.y.back()));
    }
    const FilterState next = basic_step(fs, m, gains_for(4), 0.01);
    const Pose expected = fs.pose_hat * se3_exp(m.u_m, 0.01);
    EXPECT_LT((next.pose_hat.matrix() - expected.matrix()).norm(), 1e-12);
    EXPECT_LT(next.bias_hat.vector().norm(), 1e-10);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LT((next.landmarks_hat[i] - fs.landmarks_hat[i]).norm(), 1e-12);
}

TEST(BasicStep, MatchesDiscreteLaws) {
    std::mt19937_64 rng(6);
    const double dt = 1e-3;
    for (int trial = 0; trial < 20; ++trial) {
        const Scene s = random_scene(rng, 4);
        const BasicGains g = gains_for(4);
        const Mat3 r = s.fs.pose_hat.rotation.matrix();
        const Vec3 p = s.fs.pose_hat.position;
        std::vector<Vec3> e;
        for (std::size_t i = 0; i < 4; ++i) e.push_back(s.fs.landmarks_hat[i] - r * s.m.y[i] - p);

        const Mat6 ad_inv = adjoint_oracle(r.transpose(), -r.transpose() * p);
        const Mat6 ad = adjoint_oracle(r, p);
        Vec6 w = Vec6::Zero(), db = Vec6::Zero();
        for (std::size_t i = 0; i < 4; ++i) {
            w -= g.k_w * ad_inv * stacked(r, p, s.m.y[i]) * e[i];
            db -= (g.gamma / g.alpha[i]).asDiagonal() * (ad.transpose() * stacked(r, p, s.m.y[i]) * e[i]);
        }
        const Twist chi = Twist::from_vector(s.m.u_m.vector() - s.fs.bias_hat.vector() - w);
        const Mat4 t_expected = s.fs.pose_hat.matrix() * se3_exp(chi, dt).matrix();

        const FilterState next = basic_step(s.fs, s.m, g, dt);
        EXPECT_LT((next.pose_hat.matrix() - t_expected).norm(), 1e-9);
        EXPECT_LT((next.bias_hat.vector() - (s.fs.bias_hat.vector() + dt * db)).norm(), 1e-9 * (1 + db.norm()));
        for (std::size_t i = 0; i < 4; ++i)
            EXPECT_LT((next.landmarks_hat[i] - (s.fs.landmarks_hat[i] - dt * g.k_1 * e[i])).norm(), 1e-12);
    }
}

TEST(BasicStep, BiasFirstPropagatesWithUpdatedBias) {
    std::mt19937_64 rng(7);
    const Scene s = random_scene(rng, 4);
    const BasicGains g = gains_for(4);
    const double dt = 1e-3;
    const FilterState seq = basic_step(s.fs, s.m, g, dt, UpdateOrder::sequential);
    const FilterState bf = basic_step(s.fs, s.m, g, dt, UpdateOrder::bias_first);
    EXPECT_LT((bf.bias_hat.vector() - seq.bias_hat.vector()).norm(), 1e-12);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(bf.landmarks_hat[i], seq.landmarks_hat[i]);

    const auto e = innovation_errors(s.fs, s.m.y);
    const Twist w = basic_correction(s.fs, e, s.m.y, g);
    const Twist chi = s.m.u_m - bf.bias_hat - w;
    EXPECT_LT((bf.pose_hat.matrix() - (s.fs.pose_hat * se3_exp(chi, dt)).matrix()).norm(), 1e-9);
}

TEST(BasicStep, NonFiniteAborts) {
    std::mt19937_64 rng(8);
    Scene s = random_scene(rng, 3);
    s.m.y[1](0) = std::numeric_limits<double>::quiet_NaN();
    try {
        basic_step(s.fs, s.m, gains_for(3), 1e-3, UpdateOrder::sequential, 41);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_EQ(e.step(), 41u);
        EXPECT_NE(std::string(e.what()).find("step 41"), std::string::npos);
    }
}

TEST(BasicGains, Validation) {
    EXPECT_NO_THROW(gains_for(4).validate(4));
    EXPECT_THROW(gains_for(4).validate(3), ConfigError);
    BasicGains g = gains_for(4);
    g.k_1 = 0.0;
    EXPECT_THROW(g.validate(4), ConfigError);
    g = gains_for(4);
    g.gamma(4) = -1.0;
    EXPECT_THROW(g.validate(4), ConfigError);
    g = gains_for(4);
    g.alpha[2] = 0.0;
    EXPECT_THROW(g.validate(4), ConfigError);
}
