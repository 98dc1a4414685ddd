#include "choreo/fourier.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace choreo {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_reality(const Eigen::VectorXcd& c, int m) {
    const double scale = 1.0 + c.cwiseAbs().maxCoeff();
    for (int l = 0; l < m; ++l) {
        const Complex defect = c[m - 1 + l] - std::conj(c[m - 1 - l]);
        if (std::abs(defect) > 1e-12 * scale)
            throw std::invalid_argument("FourierScalar: coefficients violate reality symmetry");
    }
}

// Exact symmetrization so the invariant holds bit-wise, not just to tolerance.
void symmetrize(Eigen::VectorXcd& c, int m) {
    c[m - 1] = Complex(c[m - 1].real(), 0.0);
    for (int l = 1; l < m; ++l) {
        const Complex avg = 0.5 * (c[m - 1 + l] + std::conj(c[m - 1 - l]));
        c[m - 1 + l] = avg;
        c[m - 1 - l] = std::conj(avg);
    }
}

// In-place iterative radix-2 FFT, size a power of two.
void fft_pow2(std::vector<Complex>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 1.0 : -1.0) * kTwoPi / static_cast<double>(len);
        const Complex wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const Complex x = a[i + j];
                const Complex y = a[i + j + len / 2] * w;
                a[i + j] = x + y;
                a[i + j + len / 2] = x - y;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv;
    }
}

}  // namespace

FourierScalar::FourierScalar(int order) : order_(order) {
    if (order < 2) throw std::invalid_argument("FourierScalar: order must be >= 2");
    coeffs_ = Eigen::VectorXcd::Zero(2 * order - 1);
}

FourierScalar::FourierScalar(int order, const Eigen::VectorXcd& coeffs) : order_(order) {
    if (order < 2) throw std::invalid_argument("FourierScalar: order must be >= 2");
    if (coeffs.size() != 2 * order - 1)
        throw std::invalid_argument("FourierScalar: coefficient count must be 2m-1");
    check_reality(coeffs, order);
    coeffs_ = coeffs;
    symmetrize(coeffs_, order);
}

FourierScalar FourierScalar::constant(int order, double value) {
    FourierScalar out(order);
    out.coeffs_[order - 1] = value;
    return out;
}

FourierScalar FourierScalar::from_real_params(int order,
                                              const Eigen::Ref<const Eigen::VectorXd>& r) {
    if (r.size() != 2 * order - 1)
        throw std::invalid_argument("FourierScalar: real parameter count must be 2m-1");
    FourierScalar out(order);
    out.coeffs_[order - 1] = r[0];
    for (int l = 1; l < order; ++l) {
        const Complex c(r[2 * l - 1], r[2 * l]);
        out.coeffs_[order - 1 + l] = c;
        out.coeffs_[order - 1 - l] = std::conj(c);
    }
    return out;
}

Eigen::VectorXd FourierScalar::real_params() const {
    Eigen::VectorXd r(num_coeffs());
    r[0] = coeffs_[order_ - 1].real();
    for (int l = 1; l < order_; ++l) {
        r[2 * l - 1] = coeffs_[order_ - 1 + l].real();
        r[2 * l] = coeffs_[order_ - 1 + l].imag();
    }
    return r;
}

double FourierScalar::sup_norm() const {
    constexpr int kGrid = 512;
    double best = 0.0;
    for (int i = 0; i < kGrid; ++i) best = std::max(best, std::abs(evaluate_at(*this, kTwoPi * i / kGrid)));
    return best;
}

FourierScalar FourierScalar::operator+(const FourierScalar& o) const {
    if (o.order_ != order_) throw std::invalid_argument("FourierScalar: order mismatch");
    return FourierScalar(Trusted{}, order_, coeffs_ + o.coeffs_);
}

FourierScalar FourierScalar::operator-(const FourierScalar& o) const {
    if (o.order_ != order_) throw std::invalid_argument("FourierScalar: order mismatch");
    return FourierScalar(Trusted{}, order_, coeffs_ - o.coeffs_);
}

FourierScalar FourierScalar::operator-() const {
    return FourierScalar(Trusted{}, order_, -coeffs_);
}

FourierScalar FourierScalar::operator*(double s) const {
    return FourierScalar(Trusted{}, order_, s * coeffs_);
}

FourierScalar differentiate(const FourierScalar& a) {
    const int m = a.order();
    Eigen::VectorXcd out(a.num_coeffs());
    for (int l = -(m - 1); l <= m - 1; ++l)
        out[l + m - 1] = Complex(0.0, static_cast<double>(l)) * a.coeff(l);
    return FourierScalar(FourierScalar::Trusted{}, m, std::move(out));
}

FourierScalar delay_shift(const FourierScalar& a, double tau) {
    const int m = a.order();
    Eigen::VectorXcd out(a.num_coeffs());
    for (int l = -(m - 1); l <= m - 1; ++l) {
        const Complex phase(std::cos(l * tau), std::sin(l * tau));
        out[l + m - 1] = phase * a.coeff(l);
    }
    // keep the invariant exact despite rounding in the phases
    out[m - 1] = Complex(out[m - 1].real(), 0.0);
    for (int l = 1; l < m; ++l) out[m - 1 - l] = std::conj(out[m - 1 + l]);
    return FourierScalar(FourierScalar::Trusted{}, m, std::move(out));
}

FourierScalar product(const FourierScalar& a, const FourierScalar& b) {
    if (a.order() != b.order()) throw std::invalid_argument("product: order mismatch");
    const int m = a.order();
    const int M = 2 * m - 1;
    std::size_t size = 1;
    while (size < static_cast<std::size_t>(2 * M)) size <<= 1;
    std::vector<Complex> fa(size, Complex(0.0, 0.0)), fb(size, Complex(0.0, 0.0));
    for (int i = 0; i < M; ++i) {
        fa[i] = a.coeffs()[i];
        fb[i] = b.coeffs()[i];
    }
    fft_pow2(fa, false);
    fft_pow2(fb, false);
    for (std::size_t i = 0; i < size; ++i) fa[i] *= fb[i];
    fft_pow2(fa, true);
    // full convolution index l+2(m-1) for l in [-2(m-1), 2(m-1)]; keep |l| < m
    Eigen::VectorXcd out(M);
    for (int l = -(m - 1); l <= m - 1; ++l) out[l + m - 1] = fa[static_cast<std::size_t>(l + 2 * (m - 1))];
    out[m - 1] = Complex(out[m - 1].real(), 0.0);
    for (int l = 1; l < m; ++l) out[m - 1 - l] = std::conj(out[m - 1 + l]);
    return FourierScalar(FourierScalar::Trusted{}, m, std::move(out));
}

double integral_pairing(const FourierScalar& a, const FourierScalar& b) {
    if (a.order() != b.order()) throw std::invalid_argument("integral_pairing: order mismatch");
    const int m = a.order();
    Complex acc(0.0, 0.0);
    for (int l = -(m - 1); l <= m - 1; ++l) acc += a.coeff(l) * b.coeff(-l);
    acc *= kTwoPi;
    if (std::abs(acc.imag()) > 1e-10 * (1.0 + std::abs(acc.real())))
        throw std::runtime_error("integral_pairing: non-real pairing value");
    return acc.real();
}

double evaluate_at(const FourierScalar& a, double t) {
    const int m = a.order();
    Complex acc = a.coeff(0);
    for (int l = 1; l < m; ++l) {
        const Complex phase(std::cos(l * t), std::sin(l * t));
        // c_l e^{ilt} + conj term = 2 Re(c_l e^{ilt})
        acc += 2.0 * (a.coeff(l) * phase).real();
    }
    if (std::abs(acc.imag()) > 1e-10 * (1.0 + std::abs(acc.real())))
        throw std::runtime_error("evaluate_at: non-real value");
    return acc.real();
}

FourierVec3::FourierVec3(FourierScalar x, FourierScalar y, FourierScalar z)
    : comp{std::move(x), std::move(y), std::move(z)} {
    if (comp[1].order() != comp[0].order() || comp[2].order() != comp[0].order())
        throw std::invalid_argument("FourierVec3: components must share order");
}

FourierVec3 differentiate(const FourierVec3& a) {
    return {differentiate(a[0]), differentiate(a[1]), differentiate(a[2])};
}

FourierVec3 delay_shift(const FourierVec3& a, double tau) {
    return {delay_shift(a[0], tau), delay_shift(a[1], tau), delay_shift(a[2], tau)};
}

FourierVec3 apply_matrix(const Eigen::Matrix3d& R, const FourierVec3& a) {
    FourierVec3 out(a.order());
    for (int c = 0; c < 3; ++c)
        out[c] = a[0] * R(c, 0) + a[1] * R(c, 1) + a[2] * R(c, 2);
    return out;
}

FourierVec3 operator+(const FourierVec3& a, const FourierVec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

FourierVec3 operator-(const FourierVec3& a, const FourierVec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

FourierScalar dot(const FourierVec3& a, const FourierVec3& b) {
    return product(a[0], b[0]) + product(a[1], b[1]) + product(a[2], b[2]);
}

Eigen::Vector3d evaluate_at(const FourierVec3& a, double t) {
    return {evaluate_at(a[0], t), evaluate_at(a[1], t), evaluate_at(a[2], t)};
}

}  // namespace choreo
