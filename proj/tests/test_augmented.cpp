#include "choreo/augmented.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace choreo;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

// Random well-scaled state near the polygon (for Jacobian oracles).
Eigen::VectorXd random_state_near_polygon(const ModelParams& p, unsigned seed, double size) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd X = polygon_state(p).pack();
    for (Eigen::Index i = 0; i < X.size(); ++i) X[i] += size * dist(rng);
    return X;
}

ReferencePhase tangent_reference(const ModelParams& p) { return polygon_reference(p); }

// Grid oracle for the right-hand side of the reduced equation:
// G(u)(t) = sum_j (u(t) - R_j u(t + tau_j)) / ||u(t) - R_j u(t + tau_j)||^3.
Eigen::Vector3d G_grid(const ModelParams& p, double t,
                       const std::function<Eigen::Vector3d(double)>& u) {
    Eigen::Vector3d s = Eigen::Vector3d::Zero();
    for (int j = 0; j < p.n - 1; ++j) {
        const Eigen::Vector3d d =
            u(t) - p.rotations[static_cast<std::size_t>(j)]
                       * u(t + p.delays[static_cast<std::size_t>(j)]);
        s += d / std::pow(d.norm(), 3);
    }
    return s;
}

}  // namespace

TEST_CASE("polygon is a steady solution for every omega") {
    for (int n : {3, 5, 7}) {
        const auto p = ModelParams::create(n, 2, 8);
        for (double om : {std::sqrt(p.sk), 0.5, 2.0}) {
            StateVector X = polygon_state(p);
            X.omega = om;
            const auto r = eval_F(X, tangent_reference(p), p);
            CHECK(r.sup_norm() < 1e-12);
            CHECK_FALSE(r.collision_warning);
        }
    }
}

TEST_CASE("kernel direction: quadratic remainder along the vertical tangent") {
    const auto p = ModelParams::create(3, 2, 8);
    const auto ref = tangent_reference(p);
    const Eigen::VectorXd X0 = polygon_state(p).pack();
    const Eigen::VectorXd x1 = vertical_tangent(p).pack();
    for (double eps : {1e-4, 1e-6}) {
        const Eigen::VectorXd X = X0 + eps * x1;
        const double res = eval_F_packed(X, ref, p).cwiseAbs().maxCoeff();
        CHECK(res < 20.0 * eps * eps);
    }
}

TEST_CASE("lambda_3 unfolding column is the exact unit vector") {
    const auto p = ModelParams::create(3, 2, 6);
    const auto ref = tangent_reference(p);
    const Layout L(p.n, p.m);
    StateVector X = polygon_state(p);
    const Eigen::VectorXd r0 = eval_F(X, ref, p).pack();
    X.lambda[2] = 1.0;
    const Eigen::VectorXd r1 = eval_F(X, ref, p).pack();
    Eigen::VectorXd diff = r1 - r0;
    CHECK(diff[L.g_off + 2 * L.M] == doctest::Approx(1.0));
    diff[L.g_off + 2 * L.M] = 0.0;
    CHECK(diff.cwiseAbs().maxCoeff() == 0.0);

    // Jacobian column for lambda_3 matches
    const Eigen::MatrixXd J = eval_jacobian(X, ref, p);
    Eigen::VectorXd col = J.col(L.lambda_off + 2);
    CHECK(col[L.g_off + 2 * L.M] == doctest::Approx(1.0));
    col[L.g_off + 2 * L.M] = 0.0;
    CHECK(col.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Jacobian annihilates the vertical tangent at the polygon") {
    for (int n : {3, 5}) {
        const auto p = ModelParams::create(n, 2, 8);
        const auto ref = tangent_reference(p);
        const Eigen::MatrixXd J = eval_jacobian_packed(polygon_state(p).pack(), ref, p);
        const Eigen::VectorXd x1 = vertical_tangent(p).pack();
        CHECK((J * x1).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("Jacobian matches central finite differences near the polygon") {
    const auto p = ModelParams::create(3, 2, 6);
    const auto ref = tangent_reference(p);
    const Layout L(p.n, p.m);
    const Eigen::VectorXd X = random_state_near_polygon(p, 0, 1e-2);
    const Eigen::MatrixXd J = eval_jacobian_packed(X, ref, p);
    const double eps = 1e-6;
    Eigen::MatrixXd JFD(L.N, L.N + 1);
    for (int i = 0; i <= L.N; ++i) {
        Eigen::VectorXd Xp = X, Xm = X;
        Xp[i] += eps;
        Xm[i] -= eps;
        JFD.col(i) = (eval_F_packed(Xp, ref, p) - eval_F_packed(Xm, ref, p)) / (2.0 * eps);
    }
    CHECK((J - JFD).norm() / JFD.norm() < 5e-6);
}

TEST_CASE("directional derivatives show quadratic remainder reduction") {
    const auto p = ModelParams::create(3, 2, 5);
    const auto ref = tangent_reference(p);
    const Layout L(p.n, p.m);
    const Eigen::VectorXd X = random_state_near_polygon(p, 1, 1e-2);
    const Eigen::MatrixXd J = eval_jacobian_packed(X, ref, p);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd d(L.N + 1);
        for (Eigen::Index i = 0; i <= L.N; ++i) d[i] = dist(rng);
        d.normalize();
        double err[2];
        const double epss[2] = {1e-4, 1e-5};
        for (int e = 0; e < 2; ++e) {
            const double eps = epss[e];
            const Eigen::VectorXd fd =
                (eval_F_packed(X + eps * d, ref, p) - eval_F_packed(X - eps * d, ref, p))
                / (2.0 * eps);
            err[e] = (fd - J * d).norm();
        }
        // central differences: error ~ eps^2, so a 10x smaller eps gives ~100x
        CHECK(err[1] < err[0] / 20.0);
    }
}

TEST_CASE("Lemma oracle: DG(u0) u1 = s_k u1 on a grid") {
    for (int n : {3, 5, 7}) {
        const auto p = ModelParams::create(n, 2, 6);
        const double delta = 1e-5;
        for (int i = 0; i < 16; ++i) {
            const double t = 2.0 * kPi * i / 16.0;
            auto u_pert = [&](double sgn) {
                return [sgn, delta](double s) {
                    return Eigen::Vector3d(1.0, 0.0, sgn * delta * std::sin(s));
                };
            };
            const Eigen::Vector3d dG =
                (G_grid(p, t, u_pert(+1.0)) - G_grid(p, t, u_pert(-1.0))) / (2.0 * delta);
            const Eigen::Vector3d expect(0.0, 0.0, p.sk * std::sin(t));
            CHECK((dG - expect).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("set_reference: idempotence, self-pairing, degenerate error") {
    const auto p = ModelParams::create(3, 2, 8);
    StateVector X = polygon_state(p);
    // polygon u is constant: degenerate reference
    CHECK_THROWS(set_reference(X));

    // genuinely oscillating state
    X.u[0] = X.u[0] + 0.1 * oracles::random_series(8, 21, 0.5);
    X.u[2] = oracles::random_series(8, 22, 0.3);
    const auto ref1 = set_reference(X);
    const auto ref2 = set_reference(X);
    for (int c = 0; c < 3; ++c) {
        CHECK((ref1.u_ref[c].coeffs() - ref2.u_ref[c].coeffs()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(ref1.u_ref_dot[c].coeff(0) == differentiate(ref1.u_ref)[c].coeff(0));
    }
    CHECK(ref1.u_ref[2].coeff(0) == Complex(0.0, 0.0));  // z mean removed

    // with the refreshed reference, the rotation and time-shift sections vanish
    const auto r = eval_F(X, ref1, p);
    CHECK(std::abs(r.eta[0]) < 1e-12);
    CHECK(std::abs(r.eta[1]) < 1e-12);
}

TEST_CASE("collision guard flags nonpositive w mean") {
    const auto p = ModelParams::create(3, 2, 6);
    StateVector X = polygon_state(p);
    X.w[0] = FourierScalar::constant(6, -0.1);
    const auto r = eval_F(X, tangent_reference(p), p);
    CHECK(r.collision_warning);
    CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("residual dimension and reality audit") {
    for (int n : {3, 5, 7})
        for (int m : {4, 8, 16}) {
            const auto p = ModelParams::create(n, 2, m);
            const auto r = eval_F(polygon_state(p), polygon_reference(p), p);
            CHECK(r.pack().size() == 2 * m * (n + 5) - 3);
        }
}
