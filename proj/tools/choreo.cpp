// choreo: batch front door for the polygon-to-eight pipeline.
//
//   choreo run       --n 3 --m 40 [--k 2 --ds 1e-3 --max-steps 4000]
//                    [--out DIR] [--with-stability] [--plot] [--resume MANIFEST]
//   choreo export    --archive DIR [--step eight] [--format csv|coeffs]
//                    [--frame rotating|inertial] [--samples 1024] [--out FILE]
//   choreo plot      --archive DIR [--out DIR]
//   choreo stability --archive DIR [--stride 1]
//
// All outputs are static artifacts; there is no interactive mode.

#include "choreo/archive.hpp"
#include "choreo/continuation.hpp"
#include "choreo/render.hpp"
#include "choreo/stability.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace choreo;

namespace {

struct Archive {
    fs::path dir;
    RunManifest manifest;
    ModelParams params;
    std::vector<BranchRecord> records;

    explicit Archive(const fs::path& archive_dir)
        : dir(archive_dir),
          manifest(read_manifest(archive_dir / "manifest.json")),
          params(ModelParams::create(manifest.n, manifest.k, manifest.m)),
          records(read_branch_records(archive_dir / "branch.jsonl")) {}

    StateVector load_state(const std::string& step_key) const {
        fs::path file;
        if (step_key == "eight") {
            file = dir / "orbit_eight.coeffs";
        } else {
            const int step = std::stoi(step_key);
            for (const auto& r : records)
                if (r.step == step && !r.state_ref.empty()) file = dir / r.state_ref;
            if (file.empty())
                throw std::runtime_error("step " + step_key + " not found in branch.jsonl");
        }
        int n = 0, m = 0;
        const Eigen::VectorXd X = read_orbit_coeffs(file, n, m);
        return StateVector::unpack(X, n, m);
    }
};

// Fills morse_index on the archive's records in place and rewrites branch.jsonl.
void annotate_stability(Archive& archive, int stride) {
    std::vector<Eigen::VectorXd> states;
    states.reserve(archive.records.size());
    for (const auto& r : archive.records) {
        int n = 0, m = 0;
        states.push_back(read_orbit_coeffs(archive.dir / r.state_ref, n, m));
    }
    const auto profile = morse_profile(archive.records, states, archive.params, stride);
    for (const auto& entry : profile)
        for (auto& r : archive.records)
            if (r.step == entry.step) r.morse_index = entry.morse_index;
    write_branch_records(archive.dir / "branch.jsonl", archive.records);
    for (const auto& entry : profile)
        std::printf("step %4d  morse_index %s\n", entry.step,
                    entry.morse_index ? std::to_string(*entry.morse_index).c_str() : "-");
}

void render_plots(const Archive& archive) {
    std::optional<std::pair<double, double>> eight_point;
    if (archive.manifest.status == "eight-converged") {
        const StateVector eight = archive.load_state("eight");
        eight_point = std::make_pair(eight.omega, eight.u[2].sup_norm());
        plot_orbit_curves(archive.dir / "orbit_eight.svg", eight, archive.params,
                          /*inertial=*/true);
    }
    plot_bifurcation_diagram(archive.dir / "diagram.svg", archive.records,
                             archive.manifest.switch_record_index, eight_point);
    std::printf("wrote %s\n", (archive.dir / "diagram.svg").string().c_str());
}

int cmd_run(int n, int k, int m, double ds, int max_steps, const fs::path& out,
            bool with_stability, bool plot, const std::string& resume) {
    ContinuationConfig config;
    fs::path dir = out;
    if (!resume.empty()) {
        const RunManifest prev = read_manifest(resume);
        n = prev.n;
        k = prev.k;
        m = prev.m;
        config = prev.config;
        if (out == "choreo_out") dir = fs::path(resume).parent_path();
    } else {
        if (ds > 0.0) config.ds = ds;
        if (max_steps > 0) config.max_steps = max_steps;
    }

    const auto params = ModelParams::create(n, k, m);
    ContinuationEngine engine(params, config);
    engine.on_log = [](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); };

    const auto t0 = std::chrono::steady_clock::now();
    const PipelineResult result = engine.run_polygon_to_eight();
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(dir);
    write_pipeline_archive(dir, params, result, config, wall);
    std::printf("archive: %s (%zu records, omega_eight = %.17g, %.1f s)\n",
                dir.string().c_str(), result.records.size(), result.eight->omega, wall);

    Archive archive(dir);
    if (with_stability) annotate_stability(archive, 1);
    if (plot) render_plots(archive);
    return 0;
}

int cmd_export(const fs::path& archive_dir, const std::string& step, const std::string& format,
               const std::string& frame, int samples, std::string out) {
    const Archive archive(archive_dir);
    const StateVector state = archive.load_state(step);
    if (format == "coeffs") {
        if (out.empty()) out = (archive_dir / ("export_" + step + ".coeffs")).string();
        export_orbit_coeffs_file(out, state, archive.params);
    } else {
        if (out.empty()) out = (archive_dir / ("export_" + step + ".csv")).string();
        export_orbit_csv(out, state, archive.params, frame == "inertial", samples);
    }
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"n-body choreography continuation: polygon to figure eight"};
    app.require_subcommand(1);

    int n = 3, k = 2, m = 40, max_steps = 0, samples = 1024, stride = 1;
    double ds = 0.0;
    bool with_stability = false, plot = false;
    std::string out_dir = "choreo_out", resume, archive_dir, step = "eight", format = "csv",
                frame = "inertial", out_file;

    auto* run = app.add_subcommand("run", "run the polygon-to-eight pipeline");
    run->add_option("--n", n, "number of bodies (odd, >= 3)");
    run->add_option("--k", k, "symmetry class k (default 2)");
    run->add_option("--m", m, "Fourier truncation order");
    run->add_option("--ds", ds, "initial arclength step");
    run->add_option("--max-steps", max_steps, "continuation step budget");
    run->add_flag("--with-stability", with_stability, "compute the Morse profile");
    run->add_flag("--plot", plot, "render SVG plots");
    run->add_option("--out", out_dir, "archive output directory");
    run->add_option("--resume", resume, "manifest.json of a previous run to reproduce");

    auto* exp = app.add_subcommand("export", "export one archived orbit");
    exp->add_option("--archive", archive_dir, "archive directory")->required();
    exp->add_option("--step", step, "record step index or 'eight'");
    exp->add_option("--format", format, "csv or coeffs")
        ->check(CLI::IsMember({"csv", "coeffs"}));
    exp->add_option("--frame", frame, "rotating or inertial")
        ->check(CLI::IsMember({"rotating", "inertial"}));
    exp->add_option("--samples", samples, "time samples per body");
    exp->add_option("--out", out_file, "output file path");

    auto* plt = app.add_subcommand("plot", "render bifurcation diagram and orbit curves");
    plt->add_option("--archive", archive_dir, "archive directory")->required();

    auto* stab = app.add_subcommand("stability", "Morse profile over an archive");
    stab->add_option("--archive", archive_dir, "archive directory")->required();
    stab->add_option("--stride", stride, "sample every stride-th record");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(n, k, m, ds, max_steps, out_dir, with_stability, plot, resume);
        if (exp->parsed())
            return cmd_export(archive_dir, step, format, frame, samples, out_file);
        if (plt->parsed()) {
            render_plots(Archive(archive_dir));
            return 0;
        }
        if (stab->parsed()) {
            Archive archive(archive_dir);
            annotate_stability(archive, stride);
            return 0;
        }
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
