#include "choreo/augmented.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace choreo {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
using Cvec = Eigen::VectorXcd;
using Cmat = Eigen::MatrixXcd;

// Real view (c0, Re c1, Im c1, ...) of a raw symmetric coefficient vector.
Eigen::VectorXd extract_real(const Cvec& c, int m) {
    Eigen::VectorXd r(2 * m - 1);
    r[0] = c[m - 1].real();
    for (int i = 1; i < m; ++i) {
        r[2 * i - 1] = c[m - 1 + i].real();
        r[2 * i] = c[m - 1 + i].imag();
    }
    return r;
}

// Diagonal entries of the derivative and delay operators.
Cvec deriv_diag(int m) {
    Cvec d(2 * m - 1);
    for (int l = -(m - 1); l <= m - 1; ++l) d[l + m - 1] = Complex(0.0, l);
    return d;
}

Cvec delay_diag(int m, double tau) {
    Cvec d(2 * m - 1);
    for (int l = -(m - 1); l <= m - 1; ++l)
        d[l + m - 1] = std::exp(Complex(0.0, l * tau));
    return d;
}

// Multiplication operator by the series s: (T c)_l = sum_{l'} s_{l-l'} c_{l'}.
Cmat toeplitz_mult(const Cvec& s, int m) {
    const int M = 2 * m - 1;
    Cmat T = Cmat::Zero(M, M);
    for (int l = 0; l < M; ++l) {
        const int lo = std::max(0, l - (m - 1));
        const int hi = std::min(M - 1, l + (m - 1));
        for (int lp = lo; lp <= hi; ++lp) T(l, lp) = s[m - 1 + l - lp];
    }
    return T;
}

// Complex M x M operator restricted to the reality-symmetric subspace,
// expressed in the real parameterization.  Column for c0 is the image of the
// real basis vector; columns for (Re c_i, Im c_i) combine the +i and -i modes.
Eigen::MatrixXd realify_op(const Cmat& B, int m) {
    const int M = 2 * m - 1;
    Eigen::MatrixXd out(M, M);
    out.col(0) = extract_real(B.col(m - 1), m);
    for (int i = 1; i < m; ++i) {
        const Cvec re_dir = B.col(m - 1 + i) + B.col(m - 1 - i);
        const Cvec im_dir = Complex(0.0, 1.0) * (B.col(m - 1 + i) - B.col(m - 1 - i));
        out.col(2 * i - 1) = extract_real(re_dir, m);
        out.col(2 * i) = extract_real(im_dir, m);
    }
    return out;
}

// Real row of the linear functional c -> Re(sum_idx fr[idx] c[idx]) acting on
// the real parameterization of a symmetric coefficient vector.
Eigen::RowVectorXd realify_row(const Cvec& fr, int m) {
    Eigen::RowVectorXd out(2 * m - 1);
    out[0] = fr[m - 1].real();
    for (int i = 1; i < m; ++i) {
        out[2 * i - 1] = (fr[m - 1 + i] + fr[m - 1 - i]).real();
        out[2 * i] = (Complex(0.0, 1.0) * (fr[m - 1 + i] - fr[m - 1 - i])).real();
    }
    return out;
}

double reference_derivative_norm(const FourierVec3& utp) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s = std::max(s, utp[c].coeff_sup());
    return s;
}

}  // namespace

ReferencePhase set_reference(const StateVector& X) {
    const int m = X.order();
    Cvec cz = X.u[2].coeffs();
    cz[m - 1] = Complex(0.0, 0.0);
    FourierVec3 ut(X.u[0], X.u[1], FourierScalar(m, cz));
    FourierVec3 utp = differentiate(ut);
    if (reference_derivative_norm(utp) < 1e-10)
        throw std::runtime_error(
            "set_reference: degenerate reference (orbit collapsed to an equilibrium)");
    return ReferencePhase{ut, utp};
}

ReferencePhase polygon_reference(const ModelParams& params) {
    // Startup reference: polygon position plus the vertical tangent,
    // u~ = (1, 0, sin t).  The planar part keeps the rotation section I1
    // active (J u~ != 0) and the sine keeps the time-shift section I2 active;
    // with either part missing one symmetry direction goes unconstrained and
    // the bordered continuation matrix is exactly singular near the polygon.
    const StateVector t = vertical_tangent(params);
    const StateVector x0 = polygon_state(params);
    FourierVec3 ut = x0.u + t.u;
    ut[2] = ut[2] - FourierScalar::constant(params.m, ut[2].coeff(0).real());
    return ReferencePhase{ut, differentiate(ut)};
}

Residual eval_F(const StateVector& X, const ReferencePhase& ref, const ModelParams& p) {
    const int n = p.n;
    const int m = p.m;
    if (X.body_count() != n || X.order() != m)
        throw std::invalid_argument("eval_F: state does not match params");
    Residual r(n, m);
    const double s1 = p.s1;
    const double rs1 = std::sqrt(s1);
    const Eigen::Matrix3d Jb = jbar_matrix();
    const double om = X.omega;

    for (int c = 0; c < 3; ++c) r.f[c] = differentiate(X.u[c]) - X.v[c];

    std::vector<FourierScalar> w2, w3;
    std::vector<FourierVec3> du, dv;
    w2.reserve(n - 1);
    w3.reserve(n - 1);
    du.reserve(n - 1);
    dv.reserve(n - 1);
    for (int j = 0; j < n - 1; ++j) {
        const FourierScalar& wj = X.w[static_cast<std::size_t>(j)];
        w2.push_back(product(wj, wj));
        w3.push_back(product(w2.back(), wj));
        const double tau = p.delays[static_cast<std::size_t>(j)];
        const Eigen::Matrix3d& R = p.rotations[static_cast<std::size_t>(j)];
        du.push_back(X.u - apply_matrix(R, delay_shift(X.u, tau)));
        dv.push_back(X.v - apply_matrix(R, delay_shift(X.v, tau)));
    }

    FourierVec3 P(m);
    for (int j = 0; j < n - 1; ++j)
        for (int c = 0; c < 3; ++c)
            P[c] = P[c] + product(w3[static_cast<std::size_t>(j)], du[static_cast<std::size_t>(j)][c]);

    const FourierVec3 Ju = apply_matrix(Jb, X.u);
    const FourierVec3 Jv = apply_matrix(Jb, X.v);
    const Eigen::Matrix3d Ib = ibar_matrix();
    for (int c = 0; c < 3; ++c) {
        FourierScalar gc = om * om * differentiate(X.v[c]) + (2.0 * om * rs1) * Jv[c]
                           - s1 * Ib(c, c) * X.u[c] + P[c] + X.lambda[0] * Ju[c]
                           + X.lambda[1] * X.v[c];
        if (c == 2) gc = gc + FourierScalar::constant(m, X.lambda[2]);
        r.g[c] = gc;
    }

    for (int j = 0; j < n - 1; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const FourierScalar qj = dot(dv[js], du[js]);
        r.h[js] = differentiate(X.w[js]) + product(w3[js], qj) + X.alpha[j] * w3[js];
    }

    const FourierVec3 Jut = apply_matrix(Jb, ref.u_ref);
    double I1 = 0.0, I2 = 0.0;
    for (int c = 0; c < 3; ++c) {
        I1 += integral_pairing(X.u[c], Jut[c]);
        I2 += integral_pairing(X.u[c], ref.u_ref_dot[c]);
    }
    r.eta << I1, I2, kTwoPi * X.u[2].coeff(0).real();

    std::ostringstream diag;
    for (int j = 0; j < n - 1; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const double W = evaluate_at(X.w[js], 0.0);
        double nd = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double d0 = evaluate_at(du[js][c], 0.0);
            nd += d0 * d0;
        }
        r.gamma[j] = W * W * nd - 1.0;
        if (X.w[js].coeff(0).real() <= 0.0) {
            r.collision_warning = true;
            diag << "w_" << j + 1 << " mean nonpositive; ";
        }
        if (std::abs(r.gamma[j]) > 10.0) {
            r.collision_warning = true;
            diag << "gamma_" << j + 1 << " residual " << r.gamma[j] << " exceeds 10; ";
        }
    }
    if (r.collision_warning)
        r.diagnostic = "regularization breakdown near collision: " + diag.str();
    return r;
}

Eigen::MatrixXd eval_jacobian(const StateVector& X, const ReferencePhase& ref,
                              const ModelParams& p) {
    const int n = p.n;
    const int m = p.m;
    const Layout L(n, m);
    const int M = L.M;
    const double s1 = p.s1;
    const double rs1 = std::sqrt(s1);
    const Eigen::Matrix3d Jb = jbar_matrix();
    const Eigen::Matrix3d Ib = ibar_matrix();
    const double om = X.omega;
    const Cvec Dd = deriv_diag(m);

    // Shared series data.
    std::vector<FourierScalar> w2, w3;
    std::vector<FourierVec3> du, dv;
    std::vector<Cvec> Sd;
    for (int j = 0; j < n - 1; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const FourierScalar& wj = X.w[js];
        w2.push_back(product(wj, wj));
        w3.push_back(product(w2.back(), wj));
        const double tau = p.delays[js];
        const Eigen::Matrix3d& R = p.rotations[js];
        du.push_back(X.u - apply_matrix(R, delay_shift(X.u, tau)));
        dv.push_back(X.v - apply_matrix(R, delay_shift(X.v, tau)));
        Sd.push_back(delay_diag(m, tau));
    }
    std::vector<FourierScalar> q;
    for (int j = 0; j < n - 1; ++j) {
        const auto js = static_cast<std::size_t>(j);
        q.push_back(dot(dv[js], du[js]));
    }

    std::vector<Cmat> Tw3, W3p;
    for (int j = 0; j < n - 1; ++j) {
        const auto js = static_cast<std::size_t>(j);
        Tw3.push_back(toeplitz_mult(w3[js].coeffs(), m));
        const Cmat Tw = toeplitz_mult(X.w[js].coeffs(), m);
        W3p.push_back(toeplitz_mult(w2[js].coeffs(), m) + 2.0 * (Tw * Tw).eval());
    }

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(L.N, L.N + 1);

    // f rows: D u - v.
    const Eigen::MatrixXd Dreal = realify_op(Cmat(Dd.asDiagonal()), m);
    for (int c = 0; c < 3; ++c) {
        J.block(L.f_off + c * M, L.u_comp(c), M, M) = Dreal;
        J.block(L.f_off + c * M, L.v_comp(c), M, M) = -Eigen::MatrixXd::Identity(M, M);
    }

    // g rows.
    const FourierVec3 Ju = apply_matrix(Jb, X.u);
    const FourierVec3 Jv = apply_matrix(Jb, X.v);
    for (int c = 0; c < 3; ++c) {
        const int r0 = L.g_off + c * M;
        J.block(r0, L.lambda_off, M, 1) = Ju[c].real_params();
        J.block(r0, L.lambda_off + 1, M, 1) = X.v[c].real_params();
        if (c == 2) J(r0, L.lambda_off + 2) = 1.0;  // constant unit column, g z mode 0
        for (int b = 0; b < 3; ++b) {
            Cmat B = Cmat::Zero(M, M);
            if (b == c) B.diagonal().array() += Complex(-s1 * Ib(c, c), 0.0);
            if (Jb(c, b) != 0.0) B.diagonal().array() += Complex(X.lambda[0] * Jb(c, b), 0.0);
            for (int j = 0; j < n - 1; ++j) {
                const auto js = static_cast<std::size_t>(j);
                // T(w^3) (delta_{bc} I - R_j(c,b) S_j): S_j diagonal, column scaling.
                if (b == c) B += Tw3[js];
                const double Rcb = p.rotations[js](c, b);
                if (Rcb != 0.0)
                    B.noalias() -= Rcb * (Tw3[js] * Sd[js].asDiagonal());
            }
            J.block(r0, L.u_comp(b), M, M) = realify_op(B, m);
            Cmat Bv = Cmat::Zero(M, M);
            if (b == c) Bv.diagonal() = om * om * Dd;
            if (b == c) Bv.diagonal().array() += Complex(X.lambda[1], 0.0);
            if (Jb(c, b) != 0.0)
                Bv.diagonal().array() += Complex(2.0 * om * rs1 * Jb(c, b), 0.0);
            J.block(r0, L.v_comp(b), M, M) = realify_op(Bv, m);
        }
        for (int j = 0; j < n - 1; ++j) {
            const auto js = static_cast<std::size_t>(j);
            const Cmat B = toeplitz_mult(du[js][c].coeffs(), m) * W3p[js];
            J.block(r0, L.w_series(j), M, M) = realify_op(B, m);
        }
        const FourierScalar dom = 2.0 * om * differentiate(X.v[c]) + (2.0 * rs1) * Jv[c];
        J.block(r0, L.omega_off, M, 1) = dom.real_params();
    }

    // h rows.
    for (int j = 0; j < n - 1; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const int r0 = L.h_off + j * M;
        J.block(r0, L.alpha_off + j, M, 1) = w3[js].real_params();
        Cmat Bw = toeplitz_mult(q[js].coeffs(), m);
        Bw.diagonal().array() += Complex(X.alpha[j], 0.0);
        Cmat B = (Bw * W3p[js]).eval();
        B.diagonal() += Dd;
        J.block(r0, L.w_series(j), M, M) = realify_op(B, m);
        for (int b = 0; b < 3; ++b) {
            Cmat Bu = Cmat::Zero(M, M);
            Cmat Bvv = Cmat::Zero(M, M);
            for (int c = 0; c < 3; ++c) {
                const Cmat Tdv = toeplitz_mult(dv[js][c].coeffs(), m);
                const Cmat Tdu = toeplitz_mult(du[js][c].coeffs(), m);
                if (b == c) {
                    Bu += Tdv;
                    Bvv += Tdu;
                }
                const double Rcb = p.rotations[js](c, b);
                if (Rcb != 0.0) {
                    Bu.noalias() -= Rcb * (Tdv * Sd[js].asDiagonal());
                    Bvv.noalias() -= Rcb * (Tdu * Sd[js].asDiagonal());
                }
            }
            J.block(r0, L.u_comp(b), M, M) = realify_op((Tw3[js] * Bu).eval(), m);
            J.block(r0, L.v_comp(b), M, M) = realify_op((Tw3[js] * Bvv).eval(), m);
        }
    }

    // eta rows: pairings against the reference are linear in u with reversed
    // coefficient order (integral picks a_l b_{-l}).
    const FourierVec3 Jut = apply_matrix(Jb, ref.u_ref);
    for (int c = 0; c < 3; ++c) {
        J.block(L.eta_off, L.u_comp(c), 1, M) =
            realify_row(kTwoPi * Jut[c].coeffs().reverse(), m);
        J.block(L.eta_off + 1, L.u_comp(c), 1, M) =
            realify_row(kTwoPi * ref.u_ref_dot[c].coeffs().reverse(), m);
    }
    J(L.eta_off + 2, L.u_comp(2)) = kTwoPi;  // I3 = 2 pi (u_3)_0

    // gamma rows.
    for (int j = 0; j < n - 1; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const double W = evaluate_at(X.w[js], 0.0);
        Eigen::Vector3d d0;
        for (int c = 0; c < 3; ++c) d0[c] = evaluate_at(du[js][c], 0.0);
        const double nd = d0.squaredNorm();
        const Cvec ones = Cvec::Ones(M);
        J.block(L.gamma_off + j, L.w_series(j), 1, M) =
            realify_row((2.0 * W * nd) * ones, m);
        const Cvec eRow = delay_diag(m, p.delays[js]);
        for (int b = 0; b < 3; ++b) {
            Cvec row = Cvec::Zero(M);
            for (int c = 0; c < 3; ++c) {
                const double coef = W * W * 2.0 * d0[c];
                if (c == b) row += coef * ones;
                const double Rcb = p.rotations[js](c, b);
                if (Rcb != 0.0) row -= (coef * Rcb) * eRow;
            }
            J.block(L.gamma_off + j, L.u_comp(b), 1, M) = realify_row(row, m);
        }
    }
    return J;
}

Eigen::VectorXd eval_F_packed(const Eigen::Ref<const Eigen::VectorXd>& X,
                              const ReferencePhase& ref, const ModelParams& params) {
    return eval_F(StateVector::unpack(X, params.n, params.m), ref, params).pack();
}

Eigen::MatrixXd eval_jacobian_packed(const Eigen::Ref<const Eigen::VectorXd>& X,
                                     const ReferencePhase& ref, const ModelParams& params) {
    return eval_jacobian(StateVector::unpack(X, params.n, params.m), ref, params);
}

}  // namespace choreo
