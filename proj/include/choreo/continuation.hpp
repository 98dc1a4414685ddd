#pragma once

// Pseudo-arclength engine: predictor-corrector stepping, determinant-sign
// bifurcation detection with bisection, branch switching, and frequency
// targeting that lands on the figure eight.

#include "choreo/augmented.hpp"
#include "choreo/model.hpp"
#include "choreo/solver.hpp"
#include "choreo/state.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace choreo {

struct ContinuationConfig {
    double ds = 1e-3;
    double ds_min = 1e-6;
    double ds_max = 1e-2;
    double cond_threshold = 1e3;
    double bisect_tol = 1e-8;
    int max_steps = 4000;
    // amplitude measure: sup norm of u_3 (vertical component)
};

struct BranchRecord {
    int step = 0;
    double omega = 0.0;
    double arclength = 0.0;
    double amplitude = 0.0;
    int det_sign = 0;
    double condition = 0.0;
    std::optional<int> morse_index;
    std::string state_ref;
};

struct BranchPoint {
    Eigen::VectorXd X_bif;
    Eigen::VectorXd phi1, phi2;      // orthonormal kernel vectors
    Eigen::VectorXd switch_tangent;  // zero omega entry by construction
};

// Archive of one full pipeline: every accepted step with its state, the
// located branch point, and the converged eight.
struct PipelineResult {
    std::vector<BranchRecord> records;
    std::vector<Eigen::VectorXd> states;  // parallel to records
    BranchPoint branch_point;
    int switch_record_index = -1;  // first record on the second branch
    int switch_side = 0;           // +1 or -1 along switch_tangent
    std::optional<StateVector> eight;
    std::optional<ReferencePhase> eight_reference;
};

class ContinuationEngine {
  public:
    ContinuationEngine(const ModelParams& params, const ContinuationConfig& config);

    // Optional log sink (progress lines); default discards.
    std::function<void(const std::string&)> on_log;

    // Unit nullspace vector of the N x (N+1) Jacobian at X, oriented so that
    // <tangent, previous> > 0.  Computed by a bordered solve with `previous`
    // as the border row.
    Eigen::VectorXd tangent_vector(const Eigen::VectorXd& X, const ReferencePhase& ref,
                                   const Eigen::VectorXd& previous) const;

    struct StepResult {
        Eigen::VectorXd X;
        NewtonReport report;
    };
    // One predictor-corrector step of length ds from X0 along the unit
    // tangent Xdot (no retry logic; callers adapt ds).
    StepResult step(const Eigen::VectorXd& X0, const Eigen::VectorXd& Xdot, double ds,
                    const ReferencePhase& ref) const;

    // Fixed-frequency Newton solve of F(x, omega_target) = 0 starting from
    // X_near (its omega slot is overwritten).  Throws on failure.
    StateVector solve_at_frequency(const Eigen::VectorXd& X_near, double omega_target,
                                   const ReferencePhase& ref) const;

    // Full pipeline: polygon -> vertical family -> det-sign flip -> bisection
    // -> branch switch -> omega = 2*sqrt(s1) -> eight.  Throws with the stage
    // name on failure.
    PipelineResult run_polygon_to_eight();

    // Continue an existing branch from a converged state until omega crosses
    // omega_target, then converge there at fixed frequency.  Used for the
    // torus-knot frequencies past the eight.  `seed_direction`: initial
    // orientation (e.g. unit vector with +1 in the omega slot).
    StateVector continue_to_frequency(const StateVector& start, const ReferencePhase& ref,
                                      double omega_target, int max_steps,
                                      const Eigen::VectorXd& seed_direction);

    const ModelParams& params() const { return params_; }
    const ContinuationConfig& config() const { return config_; }

    // Sup of odd-mode coefficients of the planar components u_1, u_2: the
    // symmetry broken at the pitchfork (zero on the vertical family).
    static double planar_symmetry_indicator(const StateVector& X);

  private:
    struct Monitor {
        int det_sign;
        double condition;
        Eigen::VectorXd next_tangent;
    };
    Monitor monitor_point(const Eigen::VectorXd& X, const Eigen::VectorXd& border,
                          const ReferencePhase& ref) const;

    struct SegmentState {
        Eigen::VectorXd X;
        Eigen::VectorXd tangent;
        ReferencePhase ref;
        double ds;
        double arclength = 0.0;
        int prev_sign = 0;
        // set when a det-sign flip stops the segment: seg stays at the last
        // pre-flip state and flip_ds is the step that produced the flip
        double flip_ds = 0.0;
    };
    enum class SegmentStop { DetFlip, TargetCrossed, StepLimit, DsUnderflow };
    // Advances `seg` in place, appending records/states; stops per flags.
    SegmentStop run_segment(SegmentState& seg, bool detect_flips,
                            std::optional<double> omega_target, int max_steps,
                            PipelineResult& out, const std::string& label);

    BranchPoint locate_branch_point(const SegmentState& pre_flip) const;

    void record_point(const Eigen::VectorXd& X, const Monitor& mon, double arclength,
                      PipelineResult& out, const std::string& label);
    void log(const std::string& msg) const;

    ModelParams params_;
    ContinuationConfig config_;
};

}  // namespace choreo
