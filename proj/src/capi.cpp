#include "slamn/slamn.h"

#include "slamn/config.hpp"
#include "slamn/errors.hpp"
#include "slamn/filter_basic.hpp"
#include "slamn/filter_imu.hpp"
#include "slamn/filter_quat.hpp"
#include "slamn/harness.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

struct slamn_config {
    slamn::RunConfig cfg;
};

struct slamn_filter {
    enum class Kind { basic, imu, imu_quat } kind = Kind::basic;
    slamn::RunConfig cfg;
    slamn::AttitudeKernel kernel;
    slamn::ImuOptions options;
    slamn::FilterState fs;
    slamn::QuatFilterState qs;
    std::uint64_t step = 0;

    slamn::FilterState state() const { return kind == Kind::imu_quat ? qs.to_matrix_state() : fs; }
};

namespace {

thread_local std::string g_last_error;
thread_local std::int64_t g_last_step = -1;

slamn_status fail(slamn_status s, const std::string& msg, std::int64_t step = -1) {
    g_last_error = msg;
    g_last_step = step;
    return s;
}

slamn_status ok() {
    g_last_error.clear();
    g_last_step = -1;
    return SLAMN_OK;
}

// Runs `fn`, translating exceptions into status codes and the thread-local
// error message.
template <class Fn>
slamn_status guarded(Fn&& fn) {
    try {
        fn();
        return ok();
    } catch (const slamn::ConfigError& e) {
        return fail(SLAMN_ERR_CONFIG, e.what());
    } catch (const slamn::NumericalError& e) {
        return fail(SLAMN_ERR_NUMERICAL, e.what(), static_cast<std::int64_t>(e.step()));
    } catch (const slamn::SchemaError& e) {
        return fail(SLAMN_ERR_SCHEMA, e.what());
    } catch (const slamn::IoError& e) {
        return fail(SLAMN_ERR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(SLAMN_ERR_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SLAMN_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SLAMN_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SLAMN_ERR_INTERNAL, "unknown error");
    }
}

slamn_status null_argument(const char* what) { return fail(SLAMN_ERR_ARGUMENT, std::string(what) + " is null"); }

}  // namespace

extern "C" {

const char* slamn_version(void) { return "1.0.0"; }

const char* slamn_last_error(void) { return g_last_error.c_str(); }

int64_t slamn_last_error_step(void) { return g_last_step; }

const char* slamn_status_string(slamn_status status) {
    switch (status) {
        case SLAMN_OK: return "ok";
        case SLAMN_ERR_ARGUMENT: return "invalid argument";
        case SLAMN_ERR_CONFIG: return "configuration error";
        case SLAMN_ERR_NUMERICAL: return "numerical error";
        case SLAMN_ERR_SCHEMA: return "schema mismatch";
        case SLAMN_ERR_IO: return "i/o error";
        case SLAMN_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

slamn_status slamn_config_load_file(const char* path, slamn_config** out) {
    if (!path) return null_argument("path");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] { *out = new slamn_config{slamn::load_run_config(path)}; });
}

slamn_status slamn_config_load_string(const char* json, slamn_config** out) {
    if (!json) return null_argument("json");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] { *out = new slamn_config{slamn::parse_run_config(json)}; });
}

void slamn_config_free(slamn_config* cfg) { delete cfg; }

slamn_status slamn_config_set_seed(slamn_config* cfg, uint64_t seed) {
    if (!cfg) return null_argument("cfg");
    cfg->cfg.world.rng_seed = seed;
    return ok();
}

slamn_status slamn_config_set_filter(slamn_config* cfg, const char* name) {
    if (!cfg) return null_argument("cfg");
    if (!name) return null_argument("name");
    return guarded([&] { cfg->cfg.filter = slamn::parse_filter_kind(name); });
}

slamn_status slamn_config_set_output_dir(slamn_config* cfg, const char* dir) {
    if (!cfg) return null_argument("cfg");
    if (!dir || !*dir) return fail(SLAMN_ERR_ARGUMENT, "output directory is empty");
    return guarded([&] { cfg->cfg.output_dir = dir; });
}

slamn_status slamn_config_landmark_count(const slamn_config* cfg, size_t* out) {
    if (!cfg) return null_argument("cfg");
    if (!out) return null_argument("out");
    *out = cfg->cfg.world.landmarks.size();
    return ok();
}

slamn_status slamn_config_step_count(const slamn_config* cfg, size_t* out) {
    if (!cfg) return null_argument("cfg");
    if (!out) return null_argument("out");
    *out = cfg->cfg.world.step_count();
    return ok();
}

slamn_status slamn_run(const slamn_config* cfg, uint32_t runs) {
    if (!cfg) return null_argument("cfg");
    if (runs == 0) return fail(SLAMN_ERR_ARGUMENT, "runs must be >= 1");
    return guarded([&] { slamn::run_batch(cfg->cfg, runs); });
}

slamn_status slamn_compare(const char* path_a, const char* path_b, char** summary) {
    if (!path_a || !path_b) return null_argument("path");
    if (!summary) return null_argument("summary");
    *summary = nullptr;
    return guarded([&] {
        const std::string text = slamn::compare_csv(path_a, path_b);
        char* buf = static_cast<char*>(std::malloc(text.size() + 1));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *summary = buf;
    });
}

void slamn_string_free(char* s) { std::free(s); }

slamn_status slamn_filter_create(const slamn_config* cfg, const char* kind, slamn_filter** out) {
    if (!cfg) return null_argument("cfg");
    if (!kind) return null_argument("kind");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        auto f = std::make_unique<slamn_filter>();
        const std::string k = kind;
        if (k == "basic")
            f->kind = slamn_filter::Kind::basic;
        else if (k == "imu")
            f->kind = slamn_filter::Kind::imu;
        else if (k == "imu_quat")
            f->kind = slamn_filter::Kind::imu_quat;
        else
            throw std::invalid_argument("unknown filter kind '" + k + "'");
        f->cfg = cfg->cfg;
        slamn::validate(f->cfg);
        f->kernel = slamn::build_kernel(slamn::reference_directions(f->cfg.world));
        f->options.simplified_form = f->cfg.simplified_form;
        f->options.order = f->cfg.update_order;
        f->fs = slamn::initial_filter_state(f->cfg);
        if (f->kind == slamn_filter::Kind::imu_quat) f->qs = slamn::QuatFilterState::from_matrix_state(f->fs);
        *out = f.release();
    });
}

void slamn_filter_free(slamn_filter* f) { delete f; }

slamn_status slamn_filter_step(slamn_filter* f, const double* u_m, const double* y, size_t y_len, const double* a,
                               size_t a_len, double dt) {
    if (!f) return null_argument("filter");
    if (!u_m) return null_argument("u_m");
    if (!y) return null_argument("y");
    const std::size_t n = f->cfg.world.landmarks.size();
    if (y_len != 3 * n) return fail(SLAMN_ERR_ARGUMENT, "y must hold " + std::to_string(3 * n) + " values");
    const std::size_t nr = f->cfg.world.imu_refs.size();
    if (f->kind != slamn_filter::Kind::basic) {
        if (!a) return null_argument("a");
        if (a_len != 3 * nr) return fail(SLAMN_ERR_ARGUMENT, "a must hold " + std::to_string(3 * nr) + " values");
    }
    if (!(dt > 0.0)) return fail(SLAMN_ERR_ARGUMENT, "dt must be positive");
    return guarded([&] {
        slamn::MeasurementBundle m;
        m.u_m = slamn::Twist{{u_m[0], u_m[1], u_m[2]}, {u_m[3], u_m[4], u_m[5]}};
        for (std::size_t i = 0; i < n; ++i) m.y.emplace_back(y[3 * i], y[3 * i + 1], y[3 * i + 2]);
        if (f->kind != slamn_filter::Kind::basic) {
            std::vector<slamn::Vec3> obs;
            for (std::size_t j = 0; j < nr; ++j) obs.emplace_back(a[3 * j], a[3 * j + 1], a[3 * j + 2]);
            m.imu_pairs = slamn::make_vector_pairs(f->cfg.world.imu_refs, obs);
        }
        const auto k = static_cast<std::size_t>(f->step);
        switch (f->kind) {
            case slamn_filter::Kind::basic:
                f->fs = slamn::basic_step(f->fs, m, f->cfg.basic, dt, f->cfg.update_order, k);
                break;
            case slamn_filter::Kind::imu:
                f->fs = slamn::imu_step(f->fs, m, f->kernel, f->cfg.imu, dt, f->options, k);
                break;
            case slamn_filter::Kind::imu_quat:
                f->qs = slamn::quat_imu_step(f->qs, m, f->kernel, f->cfg.imu, dt, f->options, k);
                break;
        }
        ++f->step;
    });
}

slamn_status slamn_filter_get_pose(const slamn_filter* f, double* rotation, double* position) {
    if (!f) return null_argument("filter");
    if (!rotation || !position) return null_argument("output buffer");
    const slamn::FilterState s = f->state();
    const slamn::Mat3& r = s.pose_hat.rotation.matrix();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) rotation[3 * i + j] = r(i, j);
        position[i] = s.pose_hat.position(i);
    }
    return ok();
}

slamn_status slamn_filter_get_landmarks(const slamn_filter* f, double* out, size_t out_len) {
    if (!f) return null_argument("filter");
    if (!out) return null_argument("out");
    const slamn::FilterState s = f->state();
    if (out_len < 3 * s.landmarks_hat.size())
        return fail(SLAMN_ERR_ARGUMENT, "out must hold " + std::to_string(3 * s.landmarks_hat.size()) + " values");
    for (std::size_t i = 0; i < s.landmarks_hat.size(); ++i)
        for (int c = 0; c < 3; ++c) out[3 * i + static_cast<std::size_t>(c)] = s.landmarks_hat[i](c);
    return ok();
}

slamn_status slamn_filter_get_bias(const slamn_filter* f, double* bias) {
    if (!f) return null_argument("filter");
    if (!bias) return null_argument("bias");
    const slamn::Vec6 b = f->state().bias_hat.vector();
    for (int i = 0; i < 6; ++i) bias[i] = b(i);
    return ok();
}

slamn_status slamn_filter_step_index(const slamn_filter* f, uint64_t* out) {
    if (!f) return null_argument("filter");
    if (!out) return null_argument("out");
    *out = f->step;
    return ok();
}

}  // extern "C"
