#pragma once

// Leaves the reduced picture: reconstructs all n bodies from the symmetry,
// integrates the rotating-frame Newton equations with first variation, and
// computes Floquet multipliers, Morse index, and conservation diagnostics.

#include "choreo/continuation.hpp"
#include "choreo/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace choreo {

// Rotating-frame positions and velocities of all n bodies (physical time).
struct FullState {
    Eigen::Matrix<double, Eigen::Dynamic, 3> positions;
    Eigen::Matrix<double, Eigen::Dynamic, 3> velocities;
};

struct MonodromyResult {
    Eigen::VectorXcd multipliers;  // 6n Floquet multipliers
    int morse_index = 0;           // #{|lambda| > 1 + 1e-4}, trivial unit multipliers excluded
    double symplectic_defect = 0.0;    // |det M(T) - 1|
    double unit_circle_defect = 0.0;   // max ||lambda| - 1| over trivial multipliers
};

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
};

// Body j (1-based, j = 1..n) series: R_j * delay_shift(u, j k zeta); body n is
// u itself.  Returned in body order 1..n.
std::vector<FourierVec3> reconstruct_bodies(const FourierVec3& u, const ModelParams& params);

// First-order rotating-frame field (physical time; orbit period T = 2 pi / omega):
// d(pos)/ds = vel, d(vel)/ds = -2 sqrt(s1) Jbar vel + s1 diag(1,1,0) pos - sum_i (q_j - q_i)/r^3.
// Throws on pairwise distance < 1e-8.
FullState rotating_vector_field(const FullState& state, const ModelParams& params);

// Jacobi-type first integral of the rotating frame (conservation diagnostic).
double rotating_energy(const FullState& state, const ModelParams& params);

// Initial condition of the full system at t = 0 from the orbit series.
FullState initial_full_state(const FourierVec3& u, double omega, const ModelParams& params);

// Integrates the coupled 6n + (6n)^2 variational system over one period and
// extracts the Floquet data.
MonodromyResult monodromy(const FourierVec3& u, double omega, const ModelParams& params,
                          const IntegratorOptions& opts = {});

// Inertial-frame position q(s) = e^{sqrt(s1) s Jbar} u_body(omega s).
Eigen::Vector3d inertial_point(const FourierVec3& u_body, double omega, double s1, double s);

struct MorseProfileEntry {
    int step = 0;
    std::optional<int> morse_index;  // empty on per-record failure (gap)
};

// Monodromy per sampled archive record (every `stride`-th record).  Fan-out
// across worker threads; `max_threads` <= 0 reads CHOREO_THREADS, falling back
// to hardware concurrency.  Per-record failures become gaps, not errors.
std::vector<MorseProfileEntry> morse_profile(const std::vector<BranchRecord>& records,
                                             const std::vector<Eigen::VectorXd>& states,
                                             const ModelParams& params, int stride = 1,
                                             int max_threads = 0);

}  // namespace choreo
