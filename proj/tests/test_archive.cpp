#include "choreo/archive.hpp"
#include "choreo/render.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace choreo;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("choreo_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("manifest round-trip is field-identical") {
    const fs::path dir = temp_dir("manifest");
    RunManifest m;
    m.n = 5;
    m.k = 2;
    m.m = 40;
    m.config.ds = 0.625e-3;  // exact binary fractions survive any formatter,
    m.config.ds_min = 1e-6;  // the decimal ones exercise round-trip printing
    m.config.ds_max = 0.0123456789012345678;
    m.config.cond_threshold = 1e3;
    m.config.bisect_tol = 1e-8;
    m.config.max_steps = 1234;
    m.status = "eight-converged";
    m.omega_eight = 2.0 * std::sqrt(compute_sk(5, 1));
    m.switch_record_index = 77;
    m.switch_side = -1;
    m.artifacts = {"branch.jsonl", "orbit_0.coeffs"};
    m.tool_version = "choreo 1.0.0";
    m.wall_seconds = 12.5;
    write_manifest(dir / "manifest.json", m);
    const RunManifest r = read_manifest(dir / "manifest.json");
    CHECK(r.n == m.n);
    CHECK(r.k == m.k);
    CHECK(r.m == m.m);
    CHECK(r.config.ds == m.config.ds);
    CHECK(r.config.ds_min == m.config.ds_min);
    CHECK(r.config.ds_max == m.config.ds_max);
    CHECK(r.config.cond_threshold == m.config.cond_threshold);
    CHECK(r.config.bisect_tol == m.config.bisect_tol);
    CHECK(r.config.max_steps == m.config.max_steps);
    CHECK(r.status == m.status);
    CHECK(r.omega_eight == m.omega_eight);
    CHECK(r.switch_record_index == m.switch_record_index);
    CHECK(r.switch_side == m.switch_side);
    CHECK(r.artifacts == m.artifacts);
    CHECK(r.tool_version == m.tool_version);
    CHECK(r.wall_seconds == m.wall_seconds);
    fs::remove_all(dir);
}

TEST_CASE("branch records round-trip bit-exactly through jsonl") {
    const fs::path dir = temp_dir("records");
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<BranchRecord> recs;
    for (int i = 0; i < 20; ++i) {
        BranchRecord r;
        r.step = i;
        r.omega = 0.7 + dist(rng) * 1e-3;
        r.arclength = i * 1e-3 + dist(rng) * 1e-9;
        r.amplitude = std::abs(dist(rng));
        r.det_sign = (i < 10) ? 1 : -1;
        r.condition = std::abs(dist(rng)) * 1e4;
        if (i % 3 == 0) r.morse_index = i % 5;
        r.state_ref = "orbit_" + std::to_string(i) + ".coeffs";
        recs.push_back(r);
    }
    write_branch_records(dir / "branch.jsonl", recs);

    // one record per line
    std::ifstream in(dir / "branch.jsonl");
    int lines = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++lines;
    CHECK(lines == 20);

    const auto back = read_branch_records(dir / "branch.jsonl");
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].step == recs[i].step);
        CHECK(back[i].omega == recs[i].omega);
        CHECK(back[i].arclength == recs[i].arclength);
        CHECK(back[i].amplitude == recs[i].amplitude);
        CHECK(back[i].det_sign == recs[i].det_sign);
        CHECK(back[i].condition == recs[i].condition);
        CHECK(back[i].morse_index == recs[i].morse_index);
        CHECK(back[i].state_ref == recs[i].state_ref);
    }
    fs::remove_all(dir);
}

TEST_CASE("orbit coefficient files round-trip bit-exactly") {
    const fs::path dir = temp_dir("coeffs");
    const auto p = ModelParams::create(3, 2, 8);
    Eigen::VectorXd X = polygon_state(p).pack();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index i = 0; i < X.size(); ++i) X[i] += 1e-3 * dist(rng);
    write_orbit_coeffs(dir / "orbit_0.coeffs", X, p.n, p.m);
    int n = 0, m = 0;
    const Eigen::VectorXd Y = read_orbit_coeffs(dir / "orbit_0.coeffs", n, m);
    CHECK(n == 3);
    CHECK(m == 8);
    REQUIRE(Y.size() == X.size());
    CHECK((Y - X).cwiseAbs().maxCoeff() == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("CSV export: header, row count, polygon values") {
    const fs::path dir = temp_dir("csv");
    const auto p = ModelParams::create(3, 2, 6);
    const StateVector X = polygon_state(p);
    export_orbit_csv(dir / "orbit.csv", X, p, /*inertial=*/false, /*samples=*/2);
    std::ifstream in(dir / "orbit.csv");
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "t,body,x,y,z");
    int rows = 0;
    double x0 = 0.0, y0 = 0.0, z0 = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (rows == 0) {
            int body = 0;
            double t = 0.0;
            REQUIRE(std::sscanf(line.c_str(), "%lf,%d,%lf,%lf,%lf", &t, &body, &x0, &y0,
                                &z0) == 5);
        }
        ++rows;
    }
    CHECK(rows == 2 * 3);  // samples * bodies
    // polygon body 1 sits at (cos zeta, sin zeta, 0) in the rotating frame
    CHECK(x0 == doctest::Approx(std::cos(p.zeta)).epsilon(1e-12));
    CHECK(y0 == doctest::Approx(std::sin(p.zeta)).epsilon(1e-12));
    CHECK(z0 == doctest::Approx(0.0));
    fs::remove_all(dir);
}

TEST_CASE("SVG plots: valid skeleton even for empty inputs") {
    const fs::path dir = temp_dir("svg");
    plot_bifurcation_diagram(dir / "empty.svg", {}, -1, std::nullopt);
    const std::string empty_svg = slurp(dir / "empty.svg");
    CHECK(empty_svg.find("<svg") != std::string::npos);
    CHECK(empty_svg.find("</svg>") != std::string::npos);

    std::vector<BranchRecord> recs;
    for (int i = 0; i < 8; ++i) {
        BranchRecord r;
        r.step = i;
        r.omega = 0.76 - 0.005 * i;
        r.arclength = 1e-3 * i;
        r.amplitude = 1e-3 * i;
        r.det_sign = i < 4 ? 1 : -1;
        r.condition = 10.0;
        if (i == 6) r.morse_index = 2;
        recs.push_back(r);
    }
    plot_bifurcation_diagram(dir / "diagram.svg", recs, 4,
                             std::make_pair(recs.back().omega, recs.back().amplitude));
    const std::string svg = slurp(dir / "diagram.svg");
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("steelblue") != std::string::npos);
    CHECK(svg.find("darkorange") != std::string::npos);

    const auto p = ModelParams::create(3, 2, 6);
    plot_orbit_curves(dir / "orbit.svg", polygon_state(p), p, /*inertial=*/true);
    const std::string orbit_svg = slurp(dir / "orbit.svg");
    CHECK(orbit_svg.find("</svg>") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("write_pipeline_archive: files exist and reload consistently") {
    const fs::path dir = temp_dir("pipeline");
    const auto p = ModelParams::create(3, 2, 12);
    ContinuationConfig cfg;
    ContinuationEngine engine(p, cfg);
    const PipelineResult result = engine.run_polygon_to_eight();
    const RunManifest manifest = write_pipeline_archive(dir, p, result, cfg, 1.0);

    CHECK(manifest.status == "eight-converged");
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "branch.jsonl"));
    CHECK(fs::exists(dir / "orbit_eight.coeffs"));

    const auto recs = read_branch_records(dir / "branch.jsonl");
    REQUIRE(recs.size() == result.records.size());
    for (const auto& r : recs) {
        REQUIRE_FALSE(r.state_ref.empty());
        REQUIRE(fs::exists(dir / r.state_ref));
        int n = 0, m = 0;
        const Eigen::VectorXd X = read_orbit_coeffs(dir / r.state_ref, n, m);
        CHECK(n == p.n);
        CHECK(m == p.m);
        CHECK((X - result.states[static_cast<std::size_t>(&r - recs.data())])
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }

    int n = 0, m = 0;
    const Eigen::VectorXd Xe = read_orbit_coeffs(dir / "orbit_eight.coeffs", n, m);
    CHECK((Xe - result.eight->pack()).cwiseAbs().maxCoeff() == 0.0);

    const RunManifest back = read_manifest(dir / "manifest.json");
    CHECK(back.n == p.n);
    CHECK(back.omega_eight == result.eight->omega);
    CHECK(back.switch_record_index == result.switch_record_index);
    fs::remove_all(dir);
}
