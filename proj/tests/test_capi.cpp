// Exercises the shared library through its C header only, plus the CLI
// binary built on top of it.
#include "slamn/slamn.h"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kConfig = R"({
  "world": {
    "landmarks": [[10, 10, 0], [-10, 10, 0], [10, -10, 0], [-10, -10, 0]],
    "imu_refs": [[1, -1, 1], [0, 0, 1]],
    "omega_true": [0, 0, 0.3],
    "v_true": [2.5, 0, 0],
    "bias_omega": [0.2, -0.2, 0.2],
    "bias_v": [0.04, 0.1, -0.02],
    "dt": 0.001,
    "duration": 0.5,
    "rng_seed": 3,
    "initial_position": [0, 0, 6]
  },
  "filter": "imu",
  "init": {"R_hat": [0.8112, -0.5660, 0.1468, 0.5749, 0.8179, -0.0234, -0.1068, 0.1034, 0.9889]},
  "sample_stride": 50
})";

std::string config_path(const std::string& name) { return std::string(SLAMN_CONFIG_DIR) + "/" + name; }

class CApiTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("slamn_capi_" + std::string(info->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const {
        const fs::path p = dir_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p.string();
    }

    fs::path dir_;
};

int cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(SLAMN_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_F(CApiTest, StatusStrings) {
    EXPECT_STREQ(slamn_status_string(SLAMN_OK), "ok");
    EXPECT_STREQ(slamn_status_string(SLAMN_ERR_CONFIG), "configuration error");
    EXPECT_NE(std::string(slamn_version()), "");
}

TEST_F(CApiTest, NullArgumentsAreRejected) {
    slamn_config* cfg = nullptr;
    EXPECT_EQ(slamn_config_load_string(nullptr, &cfg), SLAMN_ERR_ARGUMENT);
    EXPECT_EQ(slamn_config_load_string(kConfig.c_str(), nullptr), SLAMN_ERR_ARGUMENT);
    EXPECT_EQ(slamn_run(nullptr, 1), SLAMN_ERR_ARGUMENT);
    EXPECT_NE(std::string(slamn_last_error()), "");
    size_t n = 0;
    EXPECT_EQ(slamn_config_landmark_count(nullptr, &n), SLAMN_ERR_ARGUMENT);
    slamn_config_free(nullptr);
    slamn_filter_free(nullptr);
    slamn_string_free(nullptr);
}

TEST_F(CApiTest, ConfigErrorCarriesLine) {
    slamn_config* cfg = nullptr;
    const std::string bad = "{\n  \"world\": 3\n}";
    EXPECT_EQ(slamn_config_load_string(bad.c_str(), &cfg), SLAMN_ERR_CONFIG);
    EXPECT_EQ(cfg, nullptr);
    EXPECT_EQ(std::string(slamn_last_error()).rfind("line 2:", 0), 0u) << slamn_last_error();
}

TEST_F(CApiTest, ConfigAccessorsAndOverrides) {
    slamn_config* cfg = nullptr;
    ASSERT_EQ(slamn_config_load_string(kConfig.c_str(), &cfg), SLAMN_OK);
    EXPECT_STREQ(slamn_last_error(), "");
    size_t n = 0, steps = 0;
    EXPECT_EQ(slamn_config_landmark_count(cfg, &n), SLAMN_OK);
    EXPECT_EQ(slamn_config_step_count(cfg, &steps), SLAMN_OK);
    EXPECT_EQ(n, 4u);
    EXPECT_EQ(steps, 500u);
    EXPECT_EQ(slamn_config_set_filter(cfg, "ekf"), SLAMN_ERR_CONFIG);
    EXPECT_EQ(slamn_config_set_filter(cfg, "both"), SLAMN_OK);
    EXPECT_EQ(slamn_config_set_output_dir(cfg, ""), SLAMN_ERR_ARGUMENT);
    EXPECT_EQ(slamn_config_set_seed(cfg, 99), SLAMN_OK);
    slamn_config_free(cfg);
}

TEST_F(CApiTest, RunWritesCsvAndCompareSummarizes) {
    slamn_config* cfg = nullptr;
    ASSERT_EQ(slamn_config_load_string(kConfig.c_str(), &cfg), SLAMN_OK);
    ASSERT_EQ(slamn_config_set_output_dir(cfg, dir_.c_str()), SLAMN_OK);
    ASSERT_EQ(slamn_run(cfg, 1), SLAMN_OK);
    const fs::path f = dir_ / "filter_imu.csv";
    ASSERT_TRUE(fs::exists(f));

    char* summary = nullptr;
    ASSERT_EQ(slamn_compare(f.c_str(), f.c_str(), &summary), SLAMN_OK);
    ASSERT_NE(summary, nullptr);
    EXPECT_EQ(std::string(summary).rfind("column,final_delta,max_abs_delta\nt,0,0\n", 0), 0u);
    slamn_string_free(summary);

    const std::string other = write("other.csv", "t,x\n0,1\n");
    EXPECT_EQ(slamn_compare(f.c_str(), other.c_str(), &summary), SLAMN_ERR_SCHEMA);
    EXPECT_EQ(summary, nullptr);
    EXPECT_EQ(slamn_run(cfg, 0), SLAMN_ERR_ARGUMENT);
    slamn_config_free(cfg);
}

TEST_F(CApiTest, BatchRunSuffixesOutputs) {
    slamn_config* cfg = nullptr;
    ASSERT_EQ(slamn_config_load_string(kConfig.c_str(), &cfg), SLAMN_OK);
    ASSERT_EQ(slamn_config_set_output_dir(cfg, dir_.c_str()), SLAMN_OK);
    ASSERT_EQ(slamn_run(cfg, 3), SLAMN_OK);
    for (int k = 0; k < 3; ++k) EXPECT_TRUE(fs::exists(dir_ / ("filter_imu_run" + std::to_string(k) + ".csv")));
    slamn_config_free(cfg);
}

TEST_F(CApiTest, NumericalErrorReportsStep) {
    slamn_config* cfg = nullptr;
    ASSERT_EQ(slamn_config_load_file(config_path("paper_fig5.json").c_str(), &cfg), SLAMN_OK);
    ASSERT_EQ(slamn_config_set_output_dir(cfg, dir_.c_str()), SLAMN_OK);
    ASSERT_EQ(slamn_config_set_filter(cfg, "basic"), SLAMN_OK);
    EXPECT_EQ(slamn_run(cfg, 1), SLAMN_ERR_NUMERICAL);
    EXPECT_GT(slamn_last_error_step(), 0);
    EXPECT_NE(std::string(slamn_last_error()).find("at step"), std::string::npos);
    slamn_config_free(cfg);
}

// Drives a filter step by step from synthetic exact measurements of a static
// vehicle at the origin with identity attitude. The paper gains need a step
// well below 1 ms to stay stable.
TEST_F(CApiTest, SteppedFilterConvergesOnStaticScene) {
    slamn_config* cfg = nullptr;
    ASSERT_EQ(slamn_config_load_string(kConfig.c_str(), &cfg), SLAMN_OK);
    for (const char* kind : {"imu", "imu_quat"}) {
        slamn_filter* f = nullptr;
        ASSERT_EQ(slamn_filter_create(cfg, kind, &f), SLAMN_OK) << slamn_last_error();
        const double landmarks[12] = {10, 10, 0, -10, 10, 0, 10, -10, 0, -10, -10, 0};
        const double u[6] = {0, 0, 0, 0, 0, 0};
        const double a[6] = {1, -1, 1, 0, 0, 1};
        for (int k = 0; k < 50000; ++k) ASSERT_EQ(slamn_filter_step(f, u, landmarks, 12, a, 6, 1e-4), SLAMN_OK);
        double r[9], p[3], lm[12], b[6];
        uint64_t idx = 0;
        ASSERT_EQ(slamn_filter_get_pose(f, r, p), SLAMN_OK);
        ASSERT_EQ(slamn_filter_get_landmarks(f, lm, 12), SLAMN_OK);
        ASSERT_EQ(slamn_filter_get_bias(f, b), SLAMN_OK);
        ASSERT_EQ(slamn_filter_step_index(f, &idx), SLAMN_OK);
        EXPECT_EQ(idx, 50000u);
        EXPECT_LT(0.25 * (3.0 - r[0] - r[4] - r[8]), 1e-4) << kind;
        EXPECT_EQ(slamn_filter_get_landmarks(f, lm, 11), SLAMN_ERR_ARGUMENT);
        EXPECT_EQ(slamn_filter_step(f, u, landmarks, 9, a, 6, 1e-3), SLAMN_ERR_ARGUMENT);
        EXPECT_EQ(slamn_filter_step(f, u, landmarks, 12, nullptr, 0, 1e-3), SLAMN_ERR_ARGUMENT);
        EXPECT_EQ(slamn_filter_step(f, u, landmarks, 12, a, 6, 0.0), SLAMN_ERR_ARGUMENT);
        slamn_filter_free(f);
    }
    slamn_filter* basic = nullptr;
    ASSERT_EQ(slamn_filter_create(cfg, "basic", &basic), SLAMN_OK);
    const double y[12] = {10, 10, 0, -10, 10, 0, 10, -10, 0, -10, -10, 0};
    const double u[6] = {0, 0, 0, 0, 0, 0};
    EXPECT_EQ(slamn_filter_step(basic, u, y, 12, nullptr, 0, 1e-3), SLAMN_OK);
    slamn_filter_free(basic);
    slamn_filter* none = nullptr;
    EXPECT_EQ(slamn_filter_create(cfg, "ekf", &none), SLAMN_ERR_ARGUMENT);
    EXPECT_EQ(none, nullptr);
    slamn_config_free(cfg);
}

TEST_F(CApiTest, CliRunAndCompare) {
    const std::string cfg = write("cfg.json", kConfig);
    const fs::path log = dir_ / "log.txt";
    const fs::path out_a = dir_ / "a", out_b = dir_ / "b";
    ASSERT_EQ(cli("run --config " + cfg + " --out " + out_a.string(), log), 0) << slurp(log);
    ASSERT_EQ(cli("run --config " + cfg + " --out " + out_b.string() + " --seed 3", log), 0) << slurp(log);
    EXPECT_EQ(slurp(out_a / "filter_imu.csv"), slurp(out_b / "filter_imu.csv"));
    EXPECT_EQ(slurp(out_a / "truth.csv"), slurp(out_b / "truth.csv"));

    EXPECT_EQ(cli("compare " + (out_a / "filter_imu.csv").string() + " " + (out_b / "filter_imu.csv").string(), log),
              0);
    EXPECT_EQ(slurp(log).rfind("column,final_delta,max_abs_delta\n", 0), 0u);

    const fs::path out_c = dir_ / "c";
    ASSERT_EQ(cli("run --config " + cfg + " --out " + out_c.string() + " --filter basic --runs 2", log), 0)
        << slurp(log);
    EXPECT_TRUE(fs::exists(out_c / "filter_basic_run1.csv"));
    EXPECT_EQ(cli("compare " + (out_a / "filter_imu.csv").string() + " " + (out_c / "truth_run0.csv").string(), log),
              2);
}

TEST_F(CApiTest, CliExitCodes) {
    const fs::path log = dir_ / "log.txt";
    const std::string bad = write("bad.json", "{\n  \"world\": {\n    \"landmarks\": 5\n  }\n}");
    EXPECT_EQ(cli("run --config " + bad, log), 2);
    EXPECT_NE(slurp(log).find("line 3:"), std::string::npos) << slurp(log);
    EXPECT_EQ(cli("run --config " + (dir_ / "missing.json").string(), log), 2);
    EXPECT_EQ(cli("run", log), 2);
    EXPECT_EQ(cli("frobnicate", log), 2);
    EXPECT_EQ(cli("run --config " + config_path("paper_fig5.json") + " --filter basic --out " + (dir_ / "d").string(),
                  log),
              3);
    EXPECT_NE(slurp(log).find("at step"), std::string::npos) << slurp(log);
}
