// slamn command-line front end. Talks to the library only through slamn.h.
#include "slamn/slamn.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

namespace {

int exit_code(slamn_status s) {
    switch (s) {
        case SLAMN_OK: return 0;
        case SLAMN_ERR_CONFIG:
        case SLAMN_ERR_SCHEMA: return 2;
        case SLAMN_ERR_NUMERICAL: return 3;
        default: return 1;
    }
}

int report(slamn_status s) {
    if (s != SLAMN_OK) std::fprintf(stderr, "slamn: %s: %s\n", slamn_status_string(s), slamn_last_error());
    return exit_code(s);
}

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> filter;
    std::optional<std::string> out;
    std::uint32_t runs = 1;
};

int do_run(const RunArgs& a) {
    slamn_config* cfg = nullptr;
    slamn_status s = slamn_config_load_file(a.config.c_str(), &cfg);
    if (s == SLAMN_OK && a.seed) s = slamn_config_set_seed(cfg, *a.seed);
    if (s == SLAMN_OK && a.filter) s = slamn_config_set_filter(cfg, a.filter->c_str());
    if (s == SLAMN_OK && a.out) s = slamn_config_set_output_dir(cfg, a.out->c_str());
    if (s == SLAMN_OK) s = slamn_run(cfg, a.runs);
    slamn_config_free(cfg);
    return report(s);
}

int do_compare(const std::string& a, const std::string& b) {
    char* summary = nullptr;
    const slamn_status s = slamn_compare(a.c_str(), b.c_str(), &summary);
    if (s == SLAMN_OK) std::fputs(summary, stdout);
    slamn_string_free(summary);
    return report(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear SLAM filter simulation"};
    app.set_version_flag("--version", std::string(slamn_version()));
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Simulate a configured scenario and write CSV outputs");
    run->add_option("--config", run_args.config, "JSON run configuration")->required();
    run->add_option("--seed", run_args.seed, "Override world.rng_seed");
    run->add_option("--filter", run_args.filter, "basic, imu, imu_quat or both")
        ->check(CLI::IsMember({"basic", "imu", "imu_quat", "both"}));
    run->add_option("--out", run_args.out, "Override output_dir");
    run->add_option("--runs", run_args.runs, "Independent runs executed in parallel")->check(CLI::PositiveNumber);

    std::string csv_a, csv_b;
    auto* compare = app.add_subcommand("compare", "Column-wise deltas between two CSV files");
    compare->add_option("a", csv_a, "First CSV")->required();
    compare->add_option("b", csv_b, "Second CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (run->parsed()) return do_run(run_args);
    return do_compare(csv_a, csv_b);
}
