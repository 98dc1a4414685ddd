#include "choreo/model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace choreo {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

double compute_sk(int n, int k) {
    if (n < 3) throw std::invalid_argument("compute_sk: n must be >= 3");
    if (k < 1 || k > n - 1) throw std::invalid_argument("compute_sk: k out of range [1, n-1]");
    const double zeta = 2.0 * kPi / n;
    double sum = 0.0;
    for (int j = 1; j < n; ++j) {
        const double s = std::sin(j * zeta / 2.0);
        const double sk = std::sin(k * j * zeta / 2.0);
        sum += sk * sk / (s * s * s);
    }
    return 0.25 * sum;
}

Eigen::Matrix3d jbar_matrix() {
    Eigen::Matrix3d J;
    J << 0, -1, 0,
         1,  0, 0,
         0,  0, 0;
    return J;
}

Eigen::Matrix3d ibar_matrix() {
    return Eigen::Vector3d(1, 1, 0).asDiagonal();
}

ModelParams ModelParams::create(int n, int k, int m) {
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("ModelParams: n must be odd and >= 3 (the eight is impossible for even n)");
    // k = 2 is always admissible (for n = 3 it aliases k = n - 1, s_2 = s_1);
    // beyond that the distinct families have 2k <= n.
    if (k < 2 || (2 * k > n && k != 2))
        throw std::invalid_argument("ModelParams: branch index k must satisfy 2 <= k <= n/2");
    if (m < 2) throw std::invalid_argument("ModelParams: truncation order m must be >= 2");
    ModelParams p;
    p.n = n;
    p.k = k;
    p.m = m;
    p.zeta = 2.0 * kPi / n;
    p.s1 = compute_sk(n, 1);
    p.sk = compute_sk(n, k);
    for (int j = 1; j < n; ++j) {
        p.delays.push_back(j * k * p.zeta);
        const double a = j * p.zeta;
        Eigen::Matrix3d R;
        R << std::cos(a), -std::sin(a), 0,
             std::sin(a),  std::cos(a), 0,
             0, 0, 1;
        p.rotations.push_back(R);
    }
    return p;
}

StateVector polygon_state(const ModelParams& params) {
    StateVector X(params.n, params.m);
    X.u[0] = FourierScalar::constant(params.m, 1.0);
    for (int j = 1; j < params.n; ++j)
        X.w[static_cast<std::size_t>(j - 1)] =
            FourierScalar::constant(params.m, 1.0 / (2.0 * std::sin(j * kPi / params.n)));
    X.omega = std::sqrt(params.sk);
    return X;
}

StateVector vertical_tangent(const ModelParams& params) {
    StateVector t(params.n, params.m);
    const int m = params.m;
    Eigen::VectorXcd uz = Eigen::VectorXcd::Zero(2 * m - 1);
    uz[m - 2] = Complex(0.0, 0.5);   // c_{-1} = i/2  -> sin t
    uz[m] = Complex(0.0, -0.5);      // c_{+1} = -i/2
    Eigen::VectorXcd vz = Eigen::VectorXcd::Zero(2 * m - 1);
    vz[m - 2] = Complex(0.5, 0.0);   // cos t
    vz[m] = Complex(0.5, 0.0);
    t.u[2] = FourierScalar(m, uz);
    t.v[2] = FourierScalar(m, vz);
    t.omega = 0.0;
    return t;
}

std::optional<KnotClass> classify_frequency(double omega, const ModelParams& params,
                                            int qmax, double tol) {
    if (omega <= 0.0 || qmax < 1) return std::nullopt;
    const double ratio = omega / std::sqrt(params.s1);
    for (int q = 1; q <= qmax; ++q) {
        const int p = static_cast<int>(std::lround(ratio * q));
        if (p < 1) continue;
        if (std::gcd(p, q) != 1) continue;
        if (std::abs(ratio - static_cast<double>(p) / q) >= tol) continue;
        const bool congruent = (params.k * q - p) % params.n == 0;
        return KnotClass{p, q, congruent};
    }
    return std::nullopt;
}

}  // namespace choreo
