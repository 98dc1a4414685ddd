#include "choreo/continuation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace choreo {

namespace {

Eigen::MatrixXd bordered_matrix(const Eigen::VectorXd& border, const Eigen::MatrixXd& J) {
    Eigen::MatrixXd A(J.rows() + 1, J.cols());
    A.row(0) = border.transpose();
    A.bottomRows(J.rows()) = J;
    return A;
}

int det_sign_from_lu(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
    const Eigen::VectorXd d = lu.matrixLU().diagonal();
    const double dmax = d.cwiseAbs().maxCoeff();
    int sign = lu.permutationP().determinant() > 0 ? 1 : -1;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (std::abs(d[i]) < 1e-14 * dmax) return 0;
        if (d[i] < 0.0) sign = -sign;
    }
    return sign;
}

}  // namespace

ContinuationEngine::ContinuationEngine(const ModelParams& params,
                                       const ContinuationConfig& config)
    : params_(params), config_(config) {
    if (!(0.0 < config_.ds_min && config_.ds_min <= config_.ds && config_.ds <= config_.ds_max))
        throw std::invalid_argument("ContinuationConfig: need 0 < ds_min <= ds <= ds_max");
}

void ContinuationEngine::log(const std::string& msg) const {
    if (on_log) on_log(msg);
}

ContinuationEngine::Monitor ContinuationEngine::monitor_point(
    const Eigen::VectorXd& X, const Eigen::VectorXd& border, const ReferencePhase& ref) const {
    const Eigen::MatrixXd J = eval_jacobian_packed(X, ref, params_);
    const Eigen::MatrixXd A = bordered_matrix(border, J);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Monitor mon;
    mon.det_sign = det_sign_from_lu(lu);
    mon.condition = condition_from_lu(lu);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(A.rows());
    e1[0] = 1.0;
    Eigen::VectorXd t = lu.solve(e1);
    mon.next_tangent = t.normalized();
    return mon;
}

Eigen::VectorXd ContinuationEngine::tangent_vector(const Eigen::VectorXd& X,
                                                   const ReferencePhase& ref,
                                                   const Eigen::VectorXd& previous) const {
    const Eigen::MatrixXd J = eval_jacobian_packed(X, ref, params_);
    const Eigen::MatrixXd A = bordered_matrix(previous.normalized(), J);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double cond = condition_from_lu(lu);
    if (!(cond < 1e12)) {  // NaN-safe: a singular LU yields NaN here
        // Bordered solve degenerates when the nullspace of J exceeds one
        // dimension (e.g. exactly at the polygon, where the omega column
        // vanishes).  Fall back to projecting the seed onto the nullspace.
        Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        Eigen::VectorXd t = Eigen::VectorXd::Zero(J.cols());
        // the wide matrix carries one structural null column beyond its
        // singular values, hence the extra trailing vector
        for (Eigen::Index i = 0; i < J.cols(); ++i) {
            if (i < s.size() && s[i] > 1e-8 * s[0]) continue;
            const Eigen::VectorXd phi = svd.matrixV().col(i);
            t += phi.dot(previous) * phi;
        }
        if (t.norm() < 1e-8 * previous.norm())
            throw std::runtime_error(
                "tangent_vector: seed is orthogonal to the local nullspace");
        return t.normalized();
    }
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(A.rows());
    e1[0] = 1.0;
    Eigen::VectorXd t = lu.solve(e1).normalized();
    if (t.dot(previous) < 0.0) t = -t;  // the bordered solve already orients positively
    return t;
}

ContinuationEngine::StepResult ContinuationEngine::step(const Eigen::VectorXd& X0,
                                                        const Eigen::VectorXd& Xdot, double ds,
                                                        const ReferencePhase& ref) const {
    const Eigen::VectorXd Xhat = X0 + ds * Xdot;
    const Layout L(params_.n, params_.m);
    VectorFn value = [&](const Eigen::VectorXd& X) {
        Eigen::VectorXd r(L.N + 1);
        r[0] = (X - Xhat).dot(Xdot);
        r.tail(L.N) = eval_F_packed(X, ref, params_);
        return r;
    };
    MatrixFn jac = [&](const Eigen::VectorXd& X) {
        return bordered_matrix(Xdot, eval_jacobian_packed(X, ref, params_));
    };
    auto [X, report] = newton_correct(value, jac, Xhat);
    return StepResult{std::move(X), report};
}

StateVector ContinuationEngine::solve_at_frequency(const Eigen::VectorXd& X_near,
                                                   double omega_target,
                                                   const ReferencePhase& ref) const {
    const Layout L(params_.n, params_.m);
    VectorFn value = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd X(L.N + 1);
        X.head(L.N) = x;
        X[L.omega_off] = omega_target;
        return eval_F_packed(X, ref, params_);
    };
    MatrixFn jac = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd X(L.N + 1);
        X.head(L.N) = x;
        X[L.omega_off] = omega_target;
        return eval_jacobian_packed(X, ref, params_).leftCols(L.N).eval();
    };
    NewtonOptions opts;
    opts.max_iterations = 40;
    auto [x, report] = newton_correct(value, jac, X_near.head(L.N), opts);
    if (!report.converged) {
        std::ostringstream msg;
        msg << "solve_at_frequency: Newton failed at omega=" << omega_target
            << " (residual " << report.final_residual << " after " << report.iterations
            << " iterations)";
        throw std::runtime_error(msg.str());
    }
    Eigen::VectorXd X(L.N + 1);
    X.head(L.N) = x;
    X[L.omega_off] = omega_target;
    return StateVector::unpack(X, params_.n, params_.m);
}

double ContinuationEngine::planar_symmetry_indicator(const StateVector& X) {
    double s = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int l = 1; l < X.order(); l += 2) s = std::max(s, std::abs(X.u[c].coeff(l)));
    return s;
}

void ContinuationEngine::record_point(const Eigen::VectorXd& X, const Monitor& mon,
                                      double arclength, PipelineResult& out,
                                      const std::string& label) {
    const Layout L(params_.n, params_.m);
    const StateVector s = StateVector::unpack(X, params_.n, params_.m);
    BranchRecord rec;
    rec.step = static_cast<int>(out.records.size());
    rec.omega = X[L.omega_off];
    rec.arclength = arclength;
    rec.amplitude = s.u[2].sup_norm();
    rec.det_sign = mon.det_sign;
    rec.condition = mon.condition;
    rec.state_ref = "orbit_" + std::to_string(rec.step) + ".coeffs";
    out.records.push_back(rec);
    out.states.push_back(X);
    if (rec.step % 25 == 0) {
        std::ostringstream msg;
        msg << label << " step " << rec.step << " omega=" << rec.omega
            << " amplitude=" << rec.amplitude << " det_sign=" << rec.det_sign
            << " cond=" << rec.condition;
        log(msg.str());
    }
}

ContinuationEngine::SegmentStop ContinuationEngine::run_segment(
    SegmentState& seg, bool detect_flips, std::optional<double> omega_target, int max_steps,
    PipelineResult& out, const std::string& label) {
    const Layout L(params_.n, params_.m);
    int accepted = 0;
    while (accepted < max_steps) {
        StepResult sr = step(seg.X, seg.tangent, seg.ds, seg.ref);
        if (!sr.report.converged) {
            seg.ds *= 0.5;
            if (seg.ds < config_.ds_min) {
                log(label + ": step size underflow");
                return SegmentStop::DsUnderflow;
            }
            continue;
        }
        const Monitor mon = monitor_point(sr.X, seg.tangent, seg.ref);
        const double arc = seg.arclength + seg.ds;
        record_point(sr.X, mon, arc, out, label);
        const double om_new = sr.X[L.omega_off];
        const double om_prev = seg.X[L.omega_off];

        if (detect_flips && seg.prev_sign != 0 && mon.det_sign * seg.prev_sign < 0) {
            double cond = mon.condition;
            if (cond < config_.cond_threshold) {
                // rare path: confirm with the exact SVD condition number
                const Eigen::MatrixXd A = bordered_matrix(
                    seg.tangent, eval_jacobian_packed(sr.X, seg.ref, params_));
                cond = condition_estimate(A);
            }
            if (cond > config_.cond_threshold) {
                std::ostringstream msg;
                msg << label << ": det-sign flip at step " << out.records.size() - 1
                    << ", omega=" << om_new << ", condition=" << cond;
                log(msg.str());
                seg.flip_ds = seg.ds;
                return SegmentStop::DetFlip;  // seg still holds the pre-flip state
            }
            log(label + ": spurious det-sign flip dismissed (condition below threshold)");
        }

        const bool crossed =
            omega_target && (*omega_target - om_new) * (*omega_target - om_prev) < 0.0;
        seg.prev_sign = mon.det_sign;
        seg.X = sr.X;
        seg.tangent = mon.next_tangent;
        seg.arclength = arc;
        try {
            seg.ref = set_reference(StateVector::unpack(sr.X, params_.n, params_.m));
        } catch (const std::runtime_error&) {
            // degenerate reference: keep the previous phase
        }
        if (crossed) {
            std::ostringstream msg;
            msg << label << ": omega crossed " << *omega_target << " at step "
                << out.records.size() - 1;
            log(msg.str());
            return SegmentStop::TargetCrossed;
        }
        if (sr.report.iterations <= 3) seg.ds = std::min(seg.ds * 1.3, config_.ds_max);
        ++accepted;
    }
    return SegmentStop::StepLimit;
}

BranchPoint ContinuationEngine::locate_branch_point(const SegmentState& pre_flip) const {
    const Layout L(params_.n, params_.m);
    Eigen::VectorXd XA = pre_flip.X;
    Eigen::VectorXd Xdot = pre_flip.tangent;
    const ReferencePhase& ref = pre_flip.ref;
    const int sA = pre_flip.prev_sign;
    double width = pre_flip.flip_ds;
    int it = 0;
    while (width > config_.bisect_tol && it < 60) {
        StepResult sr = step(XA, Xdot, width / 2.0, ref);
        if (!sr.report.converged)
            throw std::runtime_error("locate_branch_point: corrector failed during bisection");
        const Monitor mon = monitor_point(sr.X, Xdot, ref);
        if (mon.det_sign == sA) {
            XA = sr.X;
            Xdot = mon.next_tangent;
        }
        width /= 2.0;
        ++it;
    }
    const Eigen::MatrixXd J = eval_jacobian_packed(XA, ref, params_);
    const auto kernel = kernel_basis(J, 2);  // throws "not a simple branching point"
    const Eigen::VectorXd& phi1 = kernel[0];
    const Eigen::VectorXd& phi2 = kernel[1];
    Eigen::VectorXd sw = phi2[L.omega_off] * phi1 - phi1[L.omega_off] * phi2;
    sw[L.omega_off] = 0.0;  // exact by construction; enforce against round-off
    const double nrm = sw.norm();
    if (nrm < 1e-12)
        throw std::runtime_error("locate_branch_point: degenerate switch tangent");
    sw /= nrm;
    if (std::abs(sw.dot(Xdot)) > 0.99)
        throw std::runtime_error(
            "locate_branch_point: switch tangent parallel to the incoming branch");
    std::ostringstream msg;
    msg << "branch point located: omega=" << XA[L.omega_off] << " after " << it
        << " bisection iterations";
    log(msg.str());
    return BranchPoint{XA, phi1, phi2, sw};
}

PipelineResult ContinuationEngine::run_polygon_to_eight() {
    const Layout L(params_.n, params_.m);
    const double om_target = 2.0 * std::sqrt(params_.s1);
    PipelineResult out;

    Eigen::VectorXd X0 = polygon_state(params_).pack();
    Eigen::VectorXd x1 = vertical_tangent(params_).pack().normalized();
    ReferencePhase ref0 = polygon_reference(params_);
    {
        const Monitor mon0 = monitor_point(X0, x1, ref0);
        record_point(X0, mon0, 0.0, out, "vertical");
    }

    SegmentState seg{X0, x1, ref0, config_.ds};
    const SegmentStop stop =
        run_segment(seg, true, om_target, config_.max_steps, out, "vertical");
    if (stop != SegmentStop::DetFlip) {
        std::ostringstream msg;
        msg << "vertical-family segment: no determinant-sign flip found before omega="
            << om_target << " (stop code " << static_cast<int>(stop) << ")";
        throw std::runtime_error(msg.str());
    }

    out.branch_point = locate_branch_point(seg);
    const BranchPoint& bp = out.branch_point;

    std::string last_error;
    for (const int side : {+1, -1}) {
        const std::size_t mark = out.records.size();
        try {
            // first post-switch step by hand: verifies departure from the old branch
            double ds = config_.ds;
            const Eigen::VectorXd dir = side > 0 ? bp.switch_tangent
                                                 : Eigen::VectorXd(-bp.switch_tangent);
            StepResult first = step(bp.X_bif, dir, ds, seg.ref);
            while (!first.report.converged) {
                ds *= 0.5;
                if (ds < config_.ds_min)
                    throw std::runtime_error("switch_branch: first corrected step failed");
                first = step(bp.X_bif, dir, ds, seg.ref);
            }
            const Monitor mon = monitor_point(first.X, dir, seg.ref);
            if (std::abs(mon.next_tangent.dot(seg.tangent)) > 0.999)
                throw std::runtime_error(
                    "switch_branch: first step fell back onto the original branch");
            out.switch_record_index = static_cast<int>(out.records.size());
            record_point(first.X, mon, seg.arclength + ds, out, "post-switch");

            SegmentState seg2{first.X, mon.next_tangent, seg.ref, ds,
                              seg.arclength + ds, mon.det_sign};
            try {
                seg2.ref = set_reference(StateVector::unpack(first.X, params_.n, params_.m));
            } catch (const std::runtime_error&) {
            }
            const SegmentStop stop2 = run_segment(seg2, false, om_target,
                                                  config_.max_steps, out, "post-switch");
            if (stop2 != SegmentStop::TargetCrossed)
                throw std::runtime_error("post-switch segment: omega never crossed 2*sqrt(s1)");
            out.eight = solve_at_frequency(seg2.X, om_target, seg2.ref);
            out.eight_reference = seg2.ref;
            out.switch_side = side;
            return out;
        } catch (const std::exception& e) {
            last_error = e.what();
            log(std::string("switch side ") + (side > 0 ? "+" : "-") + " failed: " + last_error);
            out.records.resize(mark);
            out.states.resize(mark);
            out.switch_record_index = -1;
        }
    }
    throw std::runtime_error("run_polygon_to_eight: both switch sides failed: " + last_error);
}

StateVector ContinuationEngine::continue_to_frequency(const StateVector& start,
                                                      const ReferencePhase& ref,
                                                      double omega_target, int max_steps,
                                                      const Eigen::VectorXd& seed_direction) {
    Eigen::VectorXd X = start.pack();
    const Eigen::VectorXd t0 = tangent_vector(X, ref, seed_direction);
    SegmentState seg{X, t0, ref, config_.ds};
    PipelineResult scratch;
    const SegmentStop stop =
        run_segment(seg, false, omega_target, max_steps, scratch, "extend");
    if (stop != SegmentStop::TargetCrossed)
        throw std::runtime_error("continue_to_frequency: omega target not reached");
    return solve_at_frequency(seg.X, omega_target, seg.ref);
}

}  // namespace choreo
