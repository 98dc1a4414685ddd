#pragma once

// The finite-dimensional projection of the augmented map F = (eta, gamma, f, g, h)
// and its analytic Jacobian, in the real parameterization used for
// determinant-sign tracking and SVD work.

#include "choreo/model.hpp"
#include "choreo/state.hpp"

#include <Eigen/Dense>

namespace choreo {

// Reference function anchoring the rotation and time-shift sections.
struct ReferencePhase {
    FourierVec3 u_ref;      // z mean removed
    FourierVec3 u_ref_dot;  // its derivative
};

// Builds the reference from a converged state: u with the z-component mean
// removed, plus its derivative.  Throws if the derivative vanishes (orbit
// collapsed to an equilibrium; the caller should keep its previous phase).
ReferencePhase set_reference(const StateVector& X);

// Reference used to leave the polygon, where the orbit itself is constant:
// the vertical tangent's u component, (0, 0, sin t).
ReferencePhase polygon_reference(const ModelParams& params);

Residual eval_F(const StateVector& X, const ReferencePhase& ref, const ModelParams& params);

// Dense real Jacobian, N rows by N+1 columns (the omega column last).
Eigen::MatrixXd eval_jacobian(const StateVector& X, const ReferencePhase& ref,
                              const ModelParams& params);

// Packed-vector conveniences for the continuation engine.
Eigen::VectorXd eval_F_packed(const Eigen::Ref<const Eigen::VectorXd>& X,
                              const ReferencePhase& ref, const ModelParams& params);
Eigen::MatrixXd eval_jacobian_packed(const Eigen::Ref<const Eigen::VectorXd>& X,
                                     const ReferencePhase& ref, const ModelParams& params);

}  // namespace choreo
