#pragma once

#include "slamn/config.hpp"
#include "slamn/filter_quat.hpp"
#include "slamn/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace slamn {

/// One simulated world driving one or more filters in lockstep. All filters
/// receive the same measurement bundle at every step.
class Experiment {
public:
    /// Runs the filters named in cfg.filter.
    Experiment(const RunConfig& cfg, std::uint64_t run_index = 0);
    /// Runs an explicit list of filters ("basic", "imu", "imu_quat").
    Experiment(const RunConfig& cfg, std::vector<std::string> filters, std::uint64_t run_index = 0);
    ~Experiment();
    Experiment(Experiment&&) noexcept;
    Experiment& operator=(Experiment&&) noexcept;

    const RunConfig& config() const;
    const std::vector<std::string>& filter_names() const;
    const TrueState& truth() const;
    std::size_t step_index() const;
    std::size_t step_count() const;
    bool done() const { return step_index() >= step_count(); }

    /// Current estimate of filter `f` in matrix form.
    FilterState estimate(std::size_t f) const;
    ErrorReport report(std::size_t f) const;
    /// Diagnostics from the most recent step of an IMU filter.
    const ImuStepInfo& last_info(std::size_t f) const;

    /// Measure, update every filter, advance the truth. Throws NumericalError
    /// tagged with the step index.
    void step();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct RunSummary {
    std::uint64_t run_index = 0;
    std::size_t steps = 0;
    std::vector<std::filesystem::path> files;
    std::map<std::string, ErrorReport> final_reports;
};

/// Runs a full experiment and writes truth<suffix>.csv, filter_<name><suffix>.csv
/// and estimate_<name><suffix>.csv into cfg.output_dir. Rows are emitted every
/// cfg.sample_stride steps starting at t = 0, plus the final step.
RunSummary run(const RunConfig& cfg, std::uint64_t run_index = 0, const std::string& suffix = "");

/// `runs` independent runs (run index 0..runs-1, suffix "_run<k>") on a pool
/// of worker threads. With runs == 1 this is run(cfg) without a suffix.
std::vector<RunSummary> run_batch(const RunConfig& cfg, std::size_t runs, std::size_t workers = 0);

/// Column-wise comparison of two CSV files with identical headers and row
/// counts. Each output line is `column,final_delta,max_abs_delta`, with
/// final_delta = b - a on the last row. Throws SchemaError on a header or
/// row-count mismatch.
std::string compare_csv(const std::filesystem::path& a, const std::filesystem::path& b);

}  // namespace slamn
