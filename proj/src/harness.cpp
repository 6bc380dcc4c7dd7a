#include "slamn/harness.hpp"

#include "slamn/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace slamn {

namespace {

enum class SlotKind { basic, imu, imu_quat };

struct FilterSlot {
    std::string name;
    SlotKind kind = SlotKind::basic;
    FilterState fs;
    QuatFilterState qs;
    LyapunovWeights lyap;
    ImuStepInfo info;
};

SlotKind slot_kind(const std::string& name) {
    if (name == "basic") return SlotKind::basic;
    if (name == "imu") return SlotKind::imu;
    if (name == "imu_quat") return SlotKind::imu_quat;
    throw ConfigError("filter: unknown filter '" + name + "'");
}

}  // namespace

struct Experiment::Impl {
    RunConfig cfg;
    WorldSimulator sim;
    AttitudeKernel kernel;
    ImuOptions imu_options;
    std::vector<std::string> names;
    std::vector<FilterSlot> slots;

    Impl(const RunConfig& c, std::vector<std::string> filters, std::uint64_t run_index)
        : cfg(c), sim(c.world, run_index), names(std::move(filters)) {
        validate(cfg);
        kernel = build_kernel(reference_directions(cfg.world));
        imu_options.simplified_form = cfg.simplified_form;
        imu_options.order = cfg.update_order;
        const FilterState init = initial_filter_state(cfg);
        for (const auto& name : names) {
            FilterSlot s;
            s.name = name;
            s.kind = slot_kind(name);
            s.fs = init;
            if (s.kind == SlotKind::imu_quat) s.qs = QuatFilterState::from_matrix_state(init);
            s.lyap = s.kind == SlotKind::basic ? lyapunov_weights(cfg.basic)
                                               : lyapunov_weights(cfg.imu, kernel, cfg.simplified_form);
            slots.push_back(std::move(s));
        }
    }

    FilterState estimate(std::size_t f) const {
        const FilterSlot& s = slots.at(f);
        return s.kind == SlotKind::imu_quat ? s.qs.to_matrix_state() : s.fs;
    }

    void step() {
        const std::size_t k = sim.step_index();
        const MeasurementBundle m = sim.measure();
        const double dt = cfg.world.dt;
        for (auto& s : slots) {
            switch (s.kind) {
                case SlotKind::basic: s.fs = basic_step(s.fs, m, cfg.basic, dt, cfg.update_order, k); break;
                case SlotKind::imu: s.fs = imu_step(s.fs, m, kernel, cfg.imu, dt, imu_options, k, &s.info); break;
                case SlotKind::imu_quat:
                    s.qs = quat_imu_step(s.qs, m, kernel, cfg.imu, dt, imu_options, k, &s.info);
                    break;
            }
        }
        sim.advance();
    }
};

Experiment::Experiment(const RunConfig& cfg, std::uint64_t run_index)
    : Experiment(cfg, slamn::filter_names(cfg.filter), run_index) {}

Experiment::Experiment(const RunConfig& cfg, std::vector<std::string> filters, std::uint64_t run_index)
    : impl_(std::make_unique<Impl>(cfg, std::move(filters), run_index)) {}

Experiment::~Experiment() = default;
Experiment::Experiment(Experiment&&) noexcept = default;
Experiment& Experiment::operator=(Experiment&&) noexcept = default;

const RunConfig& Experiment::config() const { return impl_->cfg; }
const std::vector<std::string>& Experiment::filter_names() const { return impl_->names; }
const TrueState& Experiment::truth() const { return impl_->sim.state(); }
std::size_t Experiment::step_index() const { return impl_->sim.step_index(); }
std::size_t Experiment::step_count() const { return impl_->cfg.world.step_count(); }
FilterState Experiment::estimate(std::size_t f) const { return impl_->estimate(f); }

ErrorReport Experiment::report(std::size_t f) const {
    return evaluate(truth(), estimate(f), impl_->cfg.world.bias(), impl_->slots.at(f).lyap);
}

const ImuStepInfo& Experiment::last_info(std::size_t f) const { return impl_->slots.at(f).info; }

void Experiment::step() { impl_->step(); }

namespace {

void append_field(std::string& row, double v) {
    row += ',';
    append_number(row, v);
}

void append_pose(std::string& row, const Pose& pose) {
    for (int i = 0; i < 3; ++i) append_field(row, pose.position(i));
    const Mat3& r = pose.rotation.matrix();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) append_field(row, r(i, j));
}

void append_points(std::string& row, const std::vector<Vec3>& pts) {
    for (const auto& p : pts)
        for (int i = 0; i < 3; ++i) append_field(row, p(i));
}

std::string trajectory_header(std::string_view pos, std::string_view rot, std::string_view lm, std::size_t n) {
    std::string h = "t";
    for (const char* a : {"x", "y", "z"}) h += "," + std::string(pos) + "_" + a;
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) h += "," + std::string(rot) + std::to_string(i) + std::to_string(j);
    for (std::size_t i = 1; i <= n; ++i)
        for (const char* a : {"x", "y", "z"}) h += "," + std::string(lm) + std::to_string(i) + "_" + a;
    return h;
}

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError(path.string() + ": cannot open for writing");
        line(header);
    }
    void line(const std::string& s) {
        out_ << s << '\n';
        if (!out_) throw IoError(path_.string() + ": write failed");
    }
    void close() {
        out_.close();
        if (!out_) throw IoError(path_.string() + ": write failed");
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

}  // namespace

RunSummary run(const RunConfig& cfg, std::uint64_t run_index, const std::string& suffix) {
    Experiment exp(cfg, run_index);
    const std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir.string() + ": " + ec.message());

    const std::size_t n = cfg.world.landmarks.size();
    RunSummary summary;
    summary.run_index = run_index;

    const auto truth_path = dir / ("truth" + suffix + ".csv");
    CsvFile truth_csv(truth_path, trajectory_header("P", "r", "p", n));
    summary.files.push_back(truth_path);
    std::vector<CsvFile> error_csv;
    std::vector<CsvFile> estimate_csv;
    error_csv.reserve(exp.filter_names().size());
    estimate_csv.reserve(exp.filter_names().size());
    for (const auto& name : exp.filter_names()) {
        const auto ep = dir / ("filter_" + name + suffix + ".csv");
        const auto sp = dir / ("estimate_" + name + suffix + ".csv");
        error_csv.emplace_back(ep, csv_header(n));
        estimate_csv.emplace_back(sp, trajectory_header("P_hat", "r_hat", "p_hat", n));
        summary.files.push_back(ep);
        summary.files.push_back(sp);
    }

    const std::size_t steps = exp.step_count();
    for (std::size_t k = 0;; ++k) {
        const bool last = k == steps;
        if (k % cfg.sample_stride == 0 || last) {
            const TrueState& truth = exp.truth();
            std::string row;
            append_number(row, truth.t);
            append_pose(row, truth.pose);
            append_points(row, truth.landmarks);
            truth_csv.line(row);
            for (std::size_t f = 0; f < exp.filter_names().size(); ++f) {
                const ErrorReport rep = exp.report(f);
                error_csv[f].line(csv_row(rep));
                const FilterState est = exp.estimate(f);
                row.clear();
                append_number(row, truth.t);
                append_pose(row, est.pose_hat);
                append_points(row, est.landmarks_hat);
                estimate_csv[f].line(row);
                if (last) summary.final_reports[exp.filter_names()[f]] = rep;
            }
        }
        if (last) break;
        exp.step();
    }
    truth_csv.close();
    for (auto& c : error_csv) c.close();
    for (auto& c : estimate_csv) c.close();
    summary.steps = steps;
    return summary;
}

std::vector<RunSummary> run_batch(const RunConfig& cfg, std::size_t runs, std::size_t workers) {
    if (runs == 0) throw ConfigError("runs: must be >= 1");
    if (runs == 1) return {run(cfg)};
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, runs);

    std::vector<RunSummary> results(runs);
    std::vector<std::exception_ptr> errors(runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < runs; k = next++) {
            try {
                results[k] = run(cfg, k, "_run" + std::to_string(k));
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

namespace {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open");
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path.string() + ": empty file");
    t.columns = split_fields(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != t.columns.size())
            throw SchemaError(path.string() + ": line " + std::to_string(lineno) + " has " +
                              std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(t.columns.size()));
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto& f = fields[i];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), row[i]);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size())
                throw SchemaError(path.string() + ": line " + std::to_string(lineno) + ": non-numeric value in " +
                                  t.columns[i]);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace

std::string compare_csv(const std::filesystem::path& a, const std::filesystem::path& b) {
    const CsvTable ta = read_csv(a);
    const CsvTable tb = read_csv(b);
    if (ta.columns != tb.columns) {
        std::string msg = "column mismatch:";
        for (const auto& c : ta.columns)
            if (std::find(tb.columns.begin(), tb.columns.end(), c) == tb.columns.end()) msg += " -" + c;
        for (const auto& c : tb.columns)
            if (std::find(ta.columns.begin(), ta.columns.end(), c) == ta.columns.end()) msg += " +" + c;
        if (msg == "column mismatch:") msg = "columns appear in a different order";
        throw SchemaError(msg);
    }
    if (ta.rows.size() != tb.rows.size())
        throw SchemaError("row count mismatch: " + std::to_string(ta.rows.size()) + " vs " +
                          std::to_string(tb.rows.size()));
    if (ta.rows.empty()) throw SchemaError("no data rows");

    std::string out = "column,final_delta,max_abs_delta\n";
    for (std::size_t c = 0; c < ta.columns.size(); ++c) {
        double max_abs = 0.0;
        for (std::size_t r = 0; r < ta.rows.size(); ++r)
            max_abs = std::max(max_abs, std::abs(tb.rows[r][c] - ta.rows[r][c]));
        out += ta.columns[c];
        append_field(out, tb.rows.back()[c] - ta.rows.back()[c]);
        append_field(out, max_abs);
        out += '\n';
    }
    return out;
}

}  // namespace slamn
