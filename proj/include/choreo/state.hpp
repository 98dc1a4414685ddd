#pragma once

// Unknown and residual containers for the augmented choreography system,
// plus the layout of their packed real-vector form used by the linear algebra.

#include "choreo/fourier.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace choreo {

// Offsets into the packed real vector.  Each reality-symmetric series
// contributes 2m-1 real degrees of freedom; the unknown vector carries the
// frequency omega as a trailing slot, so its full length is N+1 with
// N = 2m(n+5) - 3.
struct Layout {
    int n, m, M;  // M = 2m-1
    int lambda_off, alpha_off, u_off, v_off, w_off, omega_off;
    int N;
    // residual rows
    int eta_off, gamma_off, f_off, g_off, h_off;

    Layout(int n_, int m_) : n(n_), m(m_), M(2 * m_ - 1) {
        lambda_off = 0;
        alpha_off = 3;
        u_off = alpha_off + (n - 1);
        v_off = u_off + 3 * M;
        w_off = v_off + 3 * M;
        omega_off = w_off + (n - 1) * M;
        N = omega_off;
        eta_off = 0;
        gamma_off = 3;
        f_off = gamma_off + (n - 1);
        g_off = f_off + 3 * M;
        h_off = g_off + 3 * M;
    }

    int u_comp(int c) const { return u_off + c * M; }
    int v_comp(int c) const { return v_off + c * M; }
    int w_series(int j) const { return w_off + j * M; }  // j = 0 .. n-2
};

// Full unknown of the augmented system: X = (lambda, alpha, u, v, w, omega).
struct StateVector {
    Eigen::Vector3d lambda;
    Eigen::VectorXd alpha;          // n-1 regularization multipliers
    FourierVec3 u, v;               // body n position / velocity series
    std::vector<FourierScalar> w;   // n-1 regularized reciprocal distances
    double omega;

    StateVector(int n, int m)
        : lambda(Eigen::Vector3d::Zero()),
          alpha(Eigen::VectorXd::Zero(n - 1)),
          u(m),
          v(m),
          w(static_cast<std::size_t>(n - 1), FourierScalar(m)),
          omega(0.0) {}

    int body_count() const { return static_cast<int>(w.size()) + 1; }
    int order() const { return u.order(); }

    Eigen::VectorXd pack() const;  // length N+1
    static StateVector unpack(const Eigen::Ref<const Eigen::VectorXd>& X, int n, int m);
};

// F = (eta, gamma, f, g, h); total real dimension N.
struct Residual {
    Eigen::Vector3d eta;
    Eigen::VectorXd gamma;          // n-1
    FourierVec3 f, g;
    std::vector<FourierScalar> h;   // n-1
    bool collision_warning = false;
    std::string diagnostic;

    Residual(int n, int m)
        : eta(Eigen::Vector3d::Zero()),
          gamma(Eigen::VectorXd::Zero(n - 1)),
          f(m),
          g(m),
          h(static_cast<std::size_t>(n - 1), FourierScalar(m)) {}

    Eigen::VectorXd pack() const;  // length N
    double sup_norm() const;
};

}  // namespace choreo
