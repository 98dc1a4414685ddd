#include "choreo/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace choreo {

std::pair<Eigen::VectorXd, NewtonReport> newton_correct(const VectorFn& value,
                                                        const MatrixFn& jacobian,
                                                        const Eigen::VectorXd& Xhat,
                                                        const NewtonOptions& opts) {
    Eigen::VectorXd X = Xhat;
    NewtonReport rep;
    double prev = std::numeric_limits<double>::infinity();
    int growth = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        const Eigen::VectorXd F = value(X);
        const double res = F.cwiseAbs().maxCoeff();
        rep.final_residual = res;
        rep.iterations = it;
        if (!std::isfinite(res)) return {X, rep};
        if (res < opts.tol_residual) {
            rep.converged = true;
            return {X, rep};
        }
        if (res > prev) {
            if (++growth >= 3) return {X, rep};
        } else {
            growth = 0;
        }
        prev = res;
        const Eigen::MatrixXd J = jacobian(X);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        const Eigen::VectorXd dX = lu.solve(F);
        if (!dX.allFinite()) return {X, rep};  // singular solve
        X -= dX;
        rep.final_step = dX.cwiseAbs().maxCoeff();
        if (rep.final_step < opts.tol_step) {
            const double r = value(X).cwiseAbs().maxCoeff();
            rep.final_residual = r;
            rep.iterations = it + 1;
            rep.converged = r < opts.tol_residual;
            return {X, rep};
        }
    }
    rep.iterations = opts.max_iterations;
    return {X, rep};
}

int det_sign(const Eigen::Ref<const Eigen::MatrixXd>& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("det_sign: matrix must be square");
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::VectorXd d = lu.matrixLU().diagonal();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (dmax == 0.0) return 0;
    int sign = lu.permutationP().determinant() > 0 ? 1 : -1;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (std::abs(d[i]) < 1e-14 * dmax) return 0;
        if (d[i] < 0.0) sign = -sign;
    }
    return sign;
}

double condition_estimate(const Eigen::Ref<const Eigen::MatrixXd>& A) {
    if (A.rows() != A.cols())
        throw std::invalid_argument("condition_estimate: matrix must be square");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
    const auto& s = svd.singularValues();
    const double smin = s[s.size() - 1];
    if (smin < 1e-300) return 1e300;
    return s[0] / smin;
}

double condition_from_lu(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
    const double rc = lu.rcond();
    if (!(rc > 1e-300)) return 1e300;  // NaN-safe clamp for singular factors
    return 1.0 / rc;
}

std::vector<Eigen::VectorXd> kernel_basis(const Eigen::Ref<const Eigen::MatrixXd>& A,
                                          int count) {
    if (count < 1 || count > A.cols())
        throw std::invalid_argument("kernel_basis: invalid count");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const Eigen::Index cols = A.cols();
    const Eigen::Index nsv = s.size();
    const double smax = s[0];
    if (count == 2) {
        // For an N x (N+1) matrix the domain carries one structural null
        // direction beyond the N singular values; "two smallest" then means
        // that null direction plus sigma_N.  Rank deficiency exactly two:
        // sigma at the kernel edge tiny, a clean gap to the next one up.
        const bool wide = cols > A.rows();
        if (!wide && nsv < 3) throw std::invalid_argument("kernel_basis: matrix too small");
        const double s2 = wide ? s[nsv - 1] : s[nsv - 2];
        const double s3 = wide ? s[nsv - 2] : s[nsv - 3];
        if (!(s2 < 1e-6 * smax && (s3 > 1e-3 * smax || s3 > 1e3 * s2)))
            throw std::runtime_error("kernel_basis: not a simple branching point");
    }
    std::vector<Eigen::VectorXd> out;
    for (int i = 0; i < count; ++i) out.push_back(svd.matrixV().col(cols - 1 - i));
    return out;
}

}  // namespace choreo
