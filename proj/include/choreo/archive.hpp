#pragma once

// On-disk run archive: manifest.json, branch.jsonl (one record per line), and
// per-step coefficient files.  All floating-point fields serialize with full
// round-trip precision so resumed runs bit-match.

#include "choreo/continuation.hpp"
#include "choreo/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace choreo {

struct RunManifest {
    int n = 0, k = 2, m = 0;
    ContinuationConfig config;
    std::string status;  // "eight-converged" or the failing stage
    double omega_eight = 0.0;
    int switch_record_index = -1;
    int switch_side = 0;
    std::vector<std::string> artifacts;  // paths relative to the manifest
    std::string tool_version;
    double wall_seconds = 0.0;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

void write_branch_records(const std::filesystem::path& path,
                          const std::vector<BranchRecord>& records);
std::vector<BranchRecord> read_branch_records(const std::filesystem::path& path);

// One packed state (length N+1) with its dimensions; used for orbit_<step>.coeffs.
void write_orbit_coeffs(const std::filesystem::path& path, const Eigen::VectorXd& X, int n,
                        int m);
Eigen::VectorXd read_orbit_coeffs(const std::filesystem::path& path, int& n, int& m);

// Writes the whole pipeline archive into `dir` and returns the manifest
// (records, per-step coefficient files, eight orbit, manifest.json).
RunManifest write_pipeline_archive(const std::filesystem::path& dir, const ModelParams& params,
                                   const PipelineResult& result, const ContinuationConfig& config,
                                   double wall_seconds);

}  // namespace choreo
