#include "choreo/state.hpp"

#include <stdexcept>

namespace choreo {

Eigen::VectorXd StateVector::pack() const {
    const int n = body_count();
    const int m = order();
    const Layout L(n, m);
    Eigen::VectorXd X(L.N + 1);
    X.segment(L.lambda_off, 3) = lambda;
    X.segment(L.alpha_off, n - 1) = alpha;
    for (int c = 0; c < 3; ++c) {
        X.segment(L.u_comp(c), L.M) = u[c].real_params();
        X.segment(L.v_comp(c), L.M) = v[c].real_params();
    }
    for (int j = 0; j < n - 1; ++j) X.segment(L.w_series(j), L.M) = w[static_cast<std::size_t>(j)].real_params();
    X[L.omega_off] = omega;
    return X;
}

StateVector StateVector::unpack(const Eigen::Ref<const Eigen::VectorXd>& X, int n, int m) {
    const Layout L(n, m);
    if (X.size() != L.N + 1) throw std::invalid_argument("StateVector::unpack: bad vector length");
    StateVector s(n, m);
    s.lambda = X.segment(L.lambda_off, 3);
    s.alpha = X.segment(L.alpha_off, n - 1);
    for (int c = 0; c < 3; ++c) {
        s.u[c] = FourierScalar::from_real_params(m, X.segment(L.u_comp(c), L.M));
        s.v[c] = FourierScalar::from_real_params(m, X.segment(L.v_comp(c), L.M));
    }
    for (int j = 0; j < n - 1; ++j)
        s.w[static_cast<std::size_t>(j)] = FourierScalar::from_real_params(m, X.segment(L.w_series(j), L.M));
    s.omega = X[L.omega_off];
    return s;
}

Eigen::VectorXd Residual::pack() const {
    const int n = static_cast<int>(gamma.size()) + 1;
    const int m = f.order();
    const Layout L(n, m);
    Eigen::VectorXd r(L.N);
    r.segment(L.eta_off, 3) = eta;
    r.segment(L.gamma_off, n - 1) = gamma;
    for (int c = 0; c < 3; ++c) {
        r.segment(L.f_off + c * L.M, L.M) = f[c].real_params();
        r.segment(L.g_off + c * L.M, L.M) = g[c].real_params();
    }
    for (int j = 0; j < n - 1; ++j)
        r.segment(L.h_off + j * L.M, L.M) = h[static_cast<std::size_t>(j)].real_params();
    return r;
}

double Residual::sup_norm() const { return pack().cwiseAbs().maxCoeff(); }

}  // namespace choreo
