#pragma once

// Closed-form model data for the symmetrized n-body choreography problem:
// frequencies, geometry of the regular polygon, the vertical tangent
// direction, and the torus-knot frequency arithmetic.

#include "choreo/state.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace choreo {

// s_k = (1/4) sum_{j=1}^{n-1} sin^2(k j zeta / 2) / sin^3(j zeta / 2), zeta = 2 pi / n
double compute_sk(int n, int k);

struct ModelParams {
    int n;  // odd body count
    int k;  // branch index, in [2, n/2]
    int m;  // Fourier truncation order
    double zeta;
    double s1, sk;
    std::vector<double> delays;            // tau_j = j k zeta, j = 1..n-1
    std::vector<Eigen::Matrix3d> rotations; // R_j = xy-rotation by j zeta

    // Validates: n odd and >= 3 (a figure eight is impossible for even n),
    // 2 <= k <= n/2, m >= 2.
    static ModelParams create(int n, int k, int m);

  private:
    ModelParams() = default;
};

struct KnotClass {
    int p, q;             // coprime, omega / sqrt(s1) = p / q
    bool is_choreography; // k q - p = 0 (mod n)
};

// Planar rotation generator extended by zero in z.
Eigen::Matrix3d jbar_matrix();
// diag(1, 1, 0)
Eigen::Matrix3d ibar_matrix();

// Steady state of the augmented system: u = (1,0,0), v = 0,
// w_j = 1 / (2 sin(j pi / n)), omega = sqrt(s_k).
StateVector polygon_state(const ModelParams& params);

// Kernel direction at the polygon: u = (0,0,sin t), v = (0,0,cos t),
// omega slot zero.  Not normalized; see pack()/norm for the unit copy.
StateVector vertical_tangent(const ModelParams& params);

// Search coprime pairs with 1 <= q <= qmax for |omega/sqrt(s1) - p/q| < tol
// and the congruence k q - p = 0 (mod n).
std::optional<KnotClass> classify_frequency(double omega, const ModelParams& params,
                                            int qmax = 64, double tol = 1e-9);

}  // namespace choreo
