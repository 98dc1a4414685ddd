#include "choreo/archive.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace choreo {

namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "choreo 1.0.0";

json config_to_json(const ContinuationConfig& c) {
    return json{{"ds", c.ds},
                {"ds_min", c.ds_min},
                {"ds_max", c.ds_max},
                {"cond_threshold", c.cond_threshold},
                {"bisect_tol", c.bisect_tol},
                {"max_steps", c.max_steps},
                {"amplitude_measure", "sup_u3"}};
}

ContinuationConfig config_from_json(const json& j) {
    ContinuationConfig c;
    c.ds = j.at("ds").get<double>();
    c.ds_min = j.at("ds_min").get<double>();
    c.ds_max = j.at("ds_max").get<double>();
    c.cond_threshold = j.at("cond_threshold").get<double>();
    c.bisect_tol = j.at("bisect_tol").get<double>();
    c.max_steps = j.at("max_steps").get<int>();
    return c;
}

json record_to_json(const BranchRecord& r) {
    json j{{"step", r.step},
           {"omega", r.omega},
           {"arclength", r.arclength},
           {"amplitude", r.amplitude},
           {"det_sign", r.det_sign},
           {"condition", r.condition},
           {"state_ref", r.state_ref}};
    if (r.morse_index) j["morse_index"] = *r.morse_index;
    return j;
}

BranchRecord record_from_json(const json& j) {
    BranchRecord r;
    r.step = j.at("step").get<int>();
    r.omega = j.at("omega").get<double>();
    r.arclength = j.at("arclength").get<double>();
    r.amplitude = j.at("amplitude").get<double>();
    r.det_sign = j.at("det_sign").get<int>();
    r.condition = j.at("condition").get<double>();
    r.state_ref = j.at("state_ref").get<std::string>();
    if (j.contains("morse_index")) r.morse_index = j.at("morse_index").get<int>();
    return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("archive: cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("archive: write failed: " + path.string());
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("archive: cannot open: " + path.string());
    return json::parse(in);
}

}  // namespace

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    json j{{"n", m.n},
           {"k", m.k},
           {"m", m.m},
           {"config", config_to_json(m.config)},
           {"status", m.status},
           {"omega_eight", m.omega_eight},
           {"switch_record_index", m.switch_record_index},
           {"switch_side", m.switch_side},
           {"artifacts", m.artifacts},
           {"tool_version", m.tool_version.empty() ? kToolVersion : m.tool_version},
           {"wall_seconds", m.wall_seconds}};
    write_text(path, j.dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& path) {
    const json j = load_json(path);
    RunManifest m;
    m.n = j.at("n").get<int>();
    m.k = j.at("k").get<int>();
    m.m = j.at("m").get<int>();
    m.config = config_from_json(j.at("config"));
    m.status = j.at("status").get<std::string>();
    m.omega_eight = j.at("omega_eight").get<double>();
    m.switch_record_index = j.at("switch_record_index").get<int>();
    m.switch_side = j.at("switch_side").get<int>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
    return m;
}

void write_branch_records(const std::filesystem::path& path,
                          const std::vector<BranchRecord>& records) {
    std::string text;
    for (const auto& r : records) text += record_to_json(r).dump() + "\n";
    write_text(path, text);
}

std::vector<BranchRecord> read_branch_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("archive: cannot open: " + path.string());
    std::vector<BranchRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(record_from_json(json::parse(line)));
    }
    return records;
}

void write_orbit_coeffs(const std::filesystem::path& path, const Eigen::VectorXd& X, int n,
                        int m) {
    json j{{"n", n}, {"m", m}};
    std::vector<double> vals(X.data(), X.data() + X.size());
    j["X"] = vals;
    write_text(path, j.dump() + "\n");
}

Eigen::VectorXd read_orbit_coeffs(const std::filesystem::path& path, int& n, int& m) {
    const json j = load_json(path);
    n = j.at("n").get<int>();
    m = j.at("m").get<int>();
    const auto vals = j.at("X").get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                             static_cast<Eigen::Index>(vals.size()));
}

RunManifest write_pipeline_archive(const std::filesystem::path& dir, const ModelParams& params,
                                   const PipelineResult& result,
                                   const ContinuationConfig& config, double wall_seconds) {
    std::filesystem::create_directories(dir);
    RunManifest manifest;
    manifest.n = params.n;
    manifest.k = params.k;
    manifest.m = params.m;
    manifest.config = config;
    manifest.status = result.eight ? "eight-converged" : "incomplete";
    manifest.omega_eight = result.eight ? result.eight->omega : 0.0;
    manifest.switch_record_index = result.switch_record_index;
    manifest.switch_side = result.switch_side;
    manifest.tool_version = kToolVersion;
    manifest.wall_seconds = wall_seconds;

    write_branch_records(dir / "branch.jsonl", result.records);
    manifest.artifacts.push_back("branch.jsonl");
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        const std::string& name = result.records[i].state_ref;
        write_orbit_coeffs(dir / name, result.states[i], params.n, params.m);
        manifest.artifacts.push_back(name);
    }
    if (result.eight) {
        write_orbit_coeffs(dir / "orbit_eight.coeffs", result.eight->pack(), params.n,
                           params.m);
        manifest.artifacts.push_back("orbit_eight.coeffs");
    }
    write_manifest(dir / "manifest.json", manifest);
    return manifest;
}

}  // namespace choreo
