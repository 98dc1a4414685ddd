#pragma once

// Dense linear-algebra services: Newton correction, determinant sign,
// condition estimation, and near-kernel extraction.

#include <Eigen/Dense>

#include <functional>
#include <utility>
#include <vector>

namespace choreo {

struct NewtonOptions {
    double tol_residual = 1e-10;
    double tol_step = 1e-12;
    int max_iterations = 20;
};

struct NewtonReport {
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;  // sup norm
    double final_step = 0.0;      // sup norm of the last update
};

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using MatrixFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// Full (undamped) Newton on a square system supplied as callbacks.  Stops on
// residual sup norm < tol_residual or step sup norm < tol_step; fails after
// max_iterations or when the residual grows three iterations in a row.
std::pair<Eigen::VectorXd, NewtonReport> newton_correct(const VectorFn& value,
                                                        const MatrixFn& jacobian,
                                                        const Eigen::VectorXd& Xhat,
                                                        const NewtonOptions& opts = {});

// Sign of det(A) from the pivoted LU diagonal; 0 when any pivot magnitude
// falls below 1e-14 times the largest.
int det_sign(const Eigen::Ref<const Eigen::MatrixXd>& A);

// sigma_max / sigma_min by SVD, capped at 1e300 when sigma_min underflows.
double condition_estimate(const Eigen::Ref<const Eigen::MatrixXd>& A);

// Cheap 1-norm condition estimate from an existing LU factorization.
double condition_from_lu(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu);

// Right singular vectors for the `count` (1 or 2) smallest singular values of
// a rows x cols matrix with cols >= rows.  For count == 2 asserts numerical
// rank deficiency exactly two (simple branching point) and throws otherwise.
std::vector<Eigen::VectorXd> kernel_basis(const Eigen::Ref<const Eigen::MatrixXd>& A,
                                          int count);

}  // namespace choreo
