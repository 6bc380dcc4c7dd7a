#include "slamn/config.hpp"

#include "slamn/errors.hpp"

#include <json.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace slamn {

using nlohmann::json;

FilterKind parse_filter_kind(std::string_view name) {
    if (name == "basic") return FilterKind::basic;
    if (name == "imu") return FilterKind::imu;
    if (name == "imu_quat") return FilterKind::imu_quat;
    if (name == "both") return FilterKind::both;
    throw ConfigError("filter: unknown filter '" + std::string(name) + "' (expected basic, imu, imu_quat or both)");
}

std::string_view to_string(FilterKind kind) {
    switch (kind) {
        case FilterKind::basic: return "basic";
        case FilterKind::imu: return "imu";
        case FilterKind::imu_quat: return "imu_quat";
        case FilterKind::both: return "both";
    }
    return "both";
}

std::vector<std::string> filter_names(FilterKind kind) {
    if (kind == FilterKind::both) return {"basic", "imu"};
    return {std::string(to_string(kind))};
}

namespace {

using Path = std::vector<std::string>;

std::size_t line_of(std::string_view text, std::size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

// Line of the deepest key of `path` found by scanning for each key in turn,
// starting after the previous one. Array indices in the path are skipped.
std::size_t locate(std::string_view text, const Path& path) {
    std::size_t pos = 0;
    std::size_t found = std::string_view::npos;
    for (const auto& key : path) {
        if (!key.empty() && key.front() == '[') continue;
        const std::string quoted = "\"" + key + "\"";
        std::size_t at = pos;
        while (true) {
            at = text.find(quoted, at);
            if (at == std::string_view::npos) break;
            std::size_t after = at + quoted.size();
            while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
            if (after < text.size() && text[after] == ':') break;
            at += quoted.size();
        }
        if (at == std::string_view::npos) break;
        found = at;
        pos = at + quoted.size();
    }
    return found == std::string_view::npos ? 1 : line_of(text, found);
}

std::string join(const Path& path) {
    std::string s;
    for (const auto& k : path) {
        if (!s.empty() && k.front() != '[') s += '.';
        s += k;
    }
    return s;
}

Path split(std::string_view dotted) {
    Path p;
    std::size_t start = 0;
    while (start <= dotted.size()) {
        const std::size_t dot = dotted.find('.', start);
        const std::size_t end = dot == std::string_view::npos ? dotted.size() : dot;
        p.emplace_back(dotted.substr(start, end - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return p;
}

Path child(const Path& p, std::string key) {
    Path c = p;
    c.push_back(std::move(key));
    return c;
}

Path index(const Path& p, std::size_t i) { return child(p, "[" + std::to_string(i) + "]"); }

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const Path& path, const std::string& msg) const {
        throw ConfigError("line " + std::to_string(locate(text_, path)) + ": " + join(path) + ": " + msg);
    }

    /// Re-raises a semantic error whose message starts with "key.path: ".
    [[noreturn]] void anchor(const Path& section, const ConfigError& err) const {
        const std::string msg = err.what();
        const std::size_t colon = msg.find(": ");
        Path path = section;
        if (colon != std::string::npos && msg.find(' ') > colon)
            for (auto& k : split(std::string_view(msg).substr(0, colon)))
                if (path.empty() || path.back() != k) path.push_back(k);
        throw ConfigError("line " + std::to_string(locate(text_, path)) + ": " + msg);
    }

    void require_object(const json& j, const Path& p) const {
        if (!j.is_object()) fail(p, "expected an object");
    }

    void allow_keys(const json& j, const Path& p, std::initializer_list<std::string_view> keys) const {
        for (const auto& [k, v] : j.items())
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(child(p, k), "unknown key");
    }

    const json& member(const json& obj, const Path& p, const std::string& key) const {
        const auto it = obj.find(key);
        if (it == obj.end()) fail(p, "missing required key '" + key + "'");
        return *it;
    }

    double number(const json& j, const Path& p) const {
        if (!j.is_number()) fail(p, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(p, "expected a finite number");
        return v;
    }

    bool boolean(const json& j, const Path& p) const {
        if (!j.is_boolean()) fail(p, "expected true or false");
        return j.get<bool>();
    }

    std::string string(const json& j, const Path& p) const {
        if (!j.is_string()) fail(p, "expected a string");
        return j.get<std::string>();
    }

    std::uint64_t unsigned_integer(const json& j, const Path& p) const {
        if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
            fail(p, "expected a non-negative integer");
        return j.get<std::uint64_t>();
    }

    std::vector<double> numbers(const json& j, const Path& p, std::size_t expected = 0) const {
        if (!j.is_array()) fail(p, "expected an array of numbers");
        if (expected && j.size() != expected)
            fail(p, "expected " + std::to_string(expected) + " numbers, got " + std::to_string(j.size()));
        std::vector<double> out;
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index(p, i)));
        return out;
    }

    Vec3 vec3(const json& j, const Path& p) const {
        const auto v = numbers(j, p, 3);
        return {v[0], v[1], v[2]};
    }

    /// Scalar (all diagonal entries equal) or explicit array.
    template <int N>
    Eigen::Matrix<double, N, 1> diagonal(const json& j, const Path& p) const {
        if (j.is_number()) return Eigen::Matrix<double, N, 1>::Constant(number(j, p));
        const auto v = numbers(j, p, N);
        return Eigen::Map<const Eigen::Matrix<double, N, 1>>(v.data());
    }

    std::vector<Vec3> vec3_list(const json& j, const Path& p) const {
        if (!j.is_array()) fail(p, "expected an array of [x, y, z] triples");
        std::vector<Vec3> out;
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec3(j[i], index(p, i)));
        return out;
    }

    Mat3 mat3(const json& j, const Path& p) const {
        const auto v = numbers(j, p, 9);
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m(r, c) = v[static_cast<std::size_t>(3 * r + c)];
        return m;
    }

    LinearTimeFunction time_function(const json& j, const Path& p) const {
        if (j.is_array()) return LinearTimeFunction::constant(vec3(j, p));
        if (!j.is_object()) fail(p, "expected [x, y, z] or {\"offset\": [...], \"slope\": [...]}");
        allow_keys(j, p, {"offset", "slope"});
        LinearTimeFunction f;
        if (j.contains("offset")) f.offset = vec3(j["offset"], child(p, "offset"));
        if (j.contains("slope")) f.slope = vec3(j["slope"], child(p, "slope"));
        return f;
    }

    /// Scalar broadcast to n entries, or an explicit list.
    std::vector<double> per_landmark(const json& j, const Path& p, std::size_t n) const {
        if (j.is_number()) return std::vector<double>(n, number(j, p));
        return numbers(j, p);
    }

private:
    std::string_view text_;
};

WorldConfig read_world(const Reader& rd, const json& j) {
    const Path p{"world"};
    rd.require_object(j, p);
    rd.allow_keys(j, p,
                  {"landmarks", "imu_refs", "sensor_weights", "omega_true", "v_true", "bias_omega", "bias_v",
                   "noise_std_omega", "noise_std_v", "feature_noise_std", "dt", "duration", "rng_seed",
                   "initial_rotation", "initial_position"});
    WorldConfig w;
    w.landmarks = rd.vec3_list(rd.member(j, p, "landmarks"), child(p, "landmarks"));
    w.imu_refs = rd.vec3_list(rd.member(j, p, "imu_refs"), child(p, "imu_refs"));
    if (j.contains("sensor_weights")) w.sensor_weights = rd.numbers(j["sensor_weights"], child(p, "sensor_weights"));
    if (j.contains("omega_true")) w.omega_true = rd.time_function(j["omega_true"], child(p, "omega_true"));
    if (j.contains("v_true")) w.v_true = rd.time_function(j["v_true"], child(p, "v_true"));
    if (j.contains("bias_omega")) w.bias_omega = rd.vec3(j["bias_omega"], child(p, "bias_omega"));
    if (j.contains("bias_v")) w.bias_v = rd.vec3(j["bias_v"], child(p, "bias_v"));
    if (j.contains("noise_std_omega")) w.noise_std_omega = rd.number(j["noise_std_omega"], child(p, "noise_std_omega"));
    if (j.contains("noise_std_v")) w.noise_std_v = rd.number(j["noise_std_v"], child(p, "noise_std_v"));
    if (j.contains("feature_noise_std"))
        w.feature_noise_std = rd.number(j["feature_noise_std"], child(p, "feature_noise_std"));
    if (j.contains("dt")) w.dt = rd.number(j["dt"], child(p, "dt"));
    if (j.contains("duration")) w.duration = rd.number(j["duration"], child(p, "duration"));
    if (j.contains("rng_seed")) w.rng_seed = rd.unsigned_integer(j["rng_seed"], child(p, "rng_seed"));
    if (j.contains("initial_rotation")) {
        const Path rp = child(p, "initial_rotation");
        try {
            w.initial_pose.rotation = Rotation::from_matrix(rd.mat3(j["initial_rotation"], rp));
        } catch (const std::invalid_argument& e) {
            rd.fail(rp, e.what());
        }
    }
    if (j.contains("initial_position"))
        w.initial_pose.position = rd.vec3(j["initial_position"], child(p, "initial_position"));
    return w;
}

BasicGains read_basic(const Reader& rd, const json& j, const Path& p, std::size_t n) {
    rd.require_object(j, p);
    rd.allow_keys(j, p, {"k_w", "k_1", "gamma", "alpha"});
    BasicGains g;
    if (j.contains("k_w")) g.k_w = rd.number(j["k_w"], child(p, "k_w"));
    if (j.contains("k_1")) g.k_1 = rd.number(j["k_1"], child(p, "k_1"));
    if (j.contains("gamma")) g.gamma = rd.diagonal<6>(j["gamma"], child(p, "gamma"));
    g.alpha = j.contains("alpha") ? rd.per_landmark(j["alpha"], child(p, "alpha"), n) : std::vector<double>(n, 0.1);
    return g;
}

ImuGains read_imu(const Reader& rd, const json& j, const Path& p, std::size_t n) {
    rd.require_object(j, p);
    rd.allow_keys(j, p, {"k_w", "k_1", "k_2", "gamma1", "gamma2", "alpha"});
    ImuGains g;
    if (j.contains("k_w")) g.k_w = rd.number(j["k_w"], child(p, "k_w"));
    if (j.contains("k_1")) g.k_1 = rd.number(j["k_1"], child(p, "k_1"));
    if (j.contains("k_2")) g.k_2 = rd.number(j["k_2"], child(p, "k_2"));
    if (j.contains("gamma1")) g.gamma1 = rd.diagonal<3>(j["gamma1"], child(p, "gamma1"));
    if (j.contains("gamma2")) g.gamma2 = rd.diagonal<3>(j["gamma2"], child(p, "gamma2"));
    g.alpha = j.contains("alpha") ? rd.per_landmark(j["alpha"], child(p, "alpha"), n) : std::vector<double>(n, 0.1);
    return g;
}

InitConfig read_init(const Reader& rd, const json& j) {
    const Path p{"init"};
    rd.require_object(j, p);
    rd.allow_keys(j, p, {"R_hat", "P_hat", "landmarks_hat", "bias_hat"});
    InitConfig init;
    if (j.contains("R_hat")) init.r_hat = rd.mat3(j["R_hat"], child(p, "R_hat"));
    if (j.contains("P_hat")) init.p_hat = rd.vec3(j["P_hat"], child(p, "P_hat"));
    if (j.contains("landmarks_hat")) init.landmarks_hat = rd.vec3_list(j["landmarks_hat"], child(p, "landmarks_hat"));
    if (j.contains("bias_hat")) {
        const auto b = rd.numbers(j["bias_hat"], child(p, "bias_hat"), 6);
        init.bias_hat = Twist::from_vector(Eigen::Map<const Vec6>(b.data()));
    }
    return init;
}

UpdateOrder parse_update_order(const Reader& rd, const json& j, const Path& p) {
    const std::string s = rd.string(j, p);
    if (s == "sequential") return UpdateOrder::sequential;
    if (s == "bias_first") return UpdateOrder::bias_first;
    rd.fail(p, "expected \"sequential\" or \"bias_first\"");
}

}  // namespace

void validate(const RunConfig& cfg) {
    validate(cfg.world);
    const std::size_t n = cfg.world.landmarks.size();
    cfg.basic.validate(n);
    cfg.imu.validate(n);
    try {
        build_kernel(reference_directions(cfg.world));
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("world.imu_refs: ") + e.what());
    }
    if (cfg.sample_stride < 1) throw ConfigError("sample_stride: must be >= 1");
    if (!cfg.init.landmarks_hat.empty() && cfg.init.landmarks_hat.size() != n)
        throw ConfigError("init.landmarks_hat: expected " + std::to_string(n) + " entries, got " +
                          std::to_string(cfg.init.landmarks_hat.size()));
    if (!cfg.init.r_hat.allFinite() ||
        (cfg.init.r_hat.transpose() * cfg.init.r_hat - Mat3::Identity()).norm() > kInitRotationTolerance ||
        cfg.init.r_hat.determinant() <= 0.0)
        throw ConfigError("init.R_hat: not close to a rotation matrix");
    if (!cfg.init.bias_hat.all_finite()) throw ConfigError("init.bias_hat: non-finite entry");
    if (cfg.output_dir.empty()) throw ConfigError("output_dir: must not be empty");
}

RunConfig parse_run_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw ConfigError("line " + std::to_string(line_of(json_text, byte)) + ": invalid JSON: " + e.what());
    }
    const Reader rd(json_text);
    rd.require_object(doc, {});
    rd.allow_keys(doc, {}, {"world", "filter", "gains", "init", "output_dir", "sample_stride", "simplified_form",
                            "update_order"});

    RunConfig cfg;
    cfg.world = read_world(rd, rd.member(doc, {}, "world"));
    const std::size_t n = cfg.world.landmarks.size();
    if (doc.contains("filter")) {
        const Path p{"filter"};
        try {
            cfg.filter = parse_filter_kind(rd.string(doc["filter"], p));
        } catch (const ConfigError& e) {
            rd.anchor({}, e);
        }
    }
    cfg.basic.alpha.assign(n, 0.1);
    cfg.imu.alpha.assign(n, 0.1);
    if (doc.contains("gains")) {
        const json& g = doc["gains"];
        const Path p{"gains"};
        rd.require_object(g, p);
        rd.allow_keys(g, p, {"basic", "imu"});
        if (g.contains("basic")) cfg.basic = read_basic(rd, g["basic"], child(p, "basic"), n);
        if (g.contains("imu")) cfg.imu = read_imu(rd, g["imu"], child(p, "imu"), n);
    }
    if (doc.contains("init")) cfg.init = read_init(rd, doc["init"]);
    if (doc.contains("output_dir")) cfg.output_dir = rd.string(doc["output_dir"], {"output_dir"});
    if (doc.contains("sample_stride")) {
        const auto s = rd.unsigned_integer(doc["sample_stride"], {"sample_stride"});
        if (s < 1) rd.fail({"sample_stride"}, "must be >= 1");
        cfg.sample_stride = static_cast<std::size_t>(s);
    }
    if (doc.contains("simplified_form")) cfg.simplified_form = rd.boolean(doc["simplified_form"], {"simplified_form"});
    if (doc.contains("update_order")) cfg.update_order = parse_update_order(rd, doc["update_order"], {"update_order"});

    try {
        validate(cfg.world);
    } catch (const ConfigError& e) {
        rd.anchor({"world"}, e);
    }
    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        rd.anchor({}, e);
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_run_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

FilterState initial_filter_state(const RunConfig& cfg) {
    FilterState fs;
    fs.pose_hat.rotation = Rotation::nearest(cfg.init.r_hat);
    fs.pose_hat.position = cfg.init.p_hat;
    fs.landmarks_hat = cfg.init.landmarks_hat.empty()
                           ? std::vector<Vec3>(cfg.world.landmarks.size(), Vec3::Zero())
                           : cfg.init.landmarks_hat;
    fs.bias_hat = cfg.init.bias_hat;
    return fs;
}

}  // namespace slamn
