#pragma once

// Truncated complex Fourier series representing 2*pi-periodic real functions.
// The differential and delay operators of the reduced equations are diagonal
// on these coefficients; products are truncated convolutions.

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace choreo {

using Complex = std::complex<double>;

// Reality-symmetric coefficient sequence c_l, l = -(m-1) .. m-1, stored at
// index l + m - 1.  Invariant: c_{-l} = conj(c_l), hence c_0 is real.
// Immutable after construction; all operations return new values.
class FourierScalar {
  public:
    explicit FourierScalar(int order);
    FourierScalar(int order, const Eigen::VectorXcd& coeffs);

    static FourierScalar constant(int order, double value);
    // Real parameterization (c0, Re c1, Im c1, ..., Re c_{m-1}, Im c_{m-1}).
    static FourierScalar from_real_params(int order, const Eigen::Ref<const Eigen::VectorXd>& r);

    int order() const { return order_; }
    int num_coeffs() const { return 2 * order_ - 1; }

    Complex coeff(int ell) const { return coeffs_[ell + order_ - 1]; }
    const Eigen::VectorXcd& coeffs() const { return coeffs_; }

    Eigen::VectorXd real_params() const;

    // max_l |c_l|
    double coeff_sup() const { return coeffs_.cwiseAbs().maxCoeff(); }
    // sup_t |a(t)| sampled on a uniform grid (512 points)
    double sup_norm() const;

    FourierScalar operator+(const FourierScalar& o) const;
    FourierScalar operator-(const FourierScalar& o) const;
    FourierScalar operator-() const;
    FourierScalar operator*(double s) const;

  private:
    struct Trusted {};
    FourierScalar(Trusted, int order, Eigen::VectorXcd coeffs)
        : order_(order), coeffs_(std::move(coeffs)) {}

    int order_;
    Eigen::VectorXcd coeffs_;

    friend FourierScalar differentiate(const FourierScalar&);
    friend FourierScalar delay_shift(const FourierScalar&, double);
    friend FourierScalar product(const FourierScalar&, const FourierScalar&);
};

inline FourierScalar operator*(double s, const FourierScalar& a) { return a * s; }

// result_l = i*l*a_l
FourierScalar differentiate(const FourierScalar& a);

// a(t + tau): result_l = exp(i*l*tau)*a_l
FourierScalar delay_shift(const FourierScalar& a, double tau);

// Truncated convolution back to the common order (zero-padded FFT inside).
FourierScalar product(const FourierScalar& a, const FourierScalar& b);

// int_0^{2pi} a(t) b(t) dt = 2*pi * sum_l a_l b_{-l}
double integral_pairing(const FourierScalar& a, const FourierScalar& b);

// sum_l c_l exp(i*l*t), real part (imaginary part asserted tiny)
double evaluate_at(const FourierScalar& a, double t);

// Three components of equal order.
struct FourierVec3 {
    std::array<FourierScalar, 3> comp;

    explicit FourierVec3(int order)
        : comp{FourierScalar(order), FourierScalar(order), FourierScalar(order)} {}
    FourierVec3(FourierScalar x, FourierScalar y, FourierScalar z);

    int order() const { return comp[0].order(); }
    const FourierScalar& operator[](int i) const { return comp[i]; }
    FourierScalar& operator[](int i) { return comp[i]; }
};

FourierVec3 differentiate(const FourierVec3& a);
FourierVec3 delay_shift(const FourierVec3& a, double tau);
// component-wise linear map by a constant 3x3 matrix
FourierVec3 apply_matrix(const Eigen::Matrix3d& R, const FourierVec3& a);
FourierVec3 operator+(const FourierVec3& a, const FourierVec3& b);
FourierVec3 operator-(const FourierVec3& a, const FourierVec3& b);
// sum_c product(a_c, b_c)
FourierScalar dot(const FourierVec3& a, const FourierVec3& b);
Eigen::Vector3d evaluate_at(const FourierVec3& a, double t);

}  // namespace choreo
