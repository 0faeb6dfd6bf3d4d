#pragma once

#include <vector>

#include "sigmak/symmetric.hpp"
#include "sigmak/util.hpp"

namespace sigmak {

/// Inverse stereographic projection R^n -> S^n (unit sphere in R^{n+1}),
///   x_i = 2 y_i / (1+|y|^2),  x_{n+1} = (|y|^2 - 1)/(|y|^2 + 1).
/// y = 0 maps to the south pole (0,...,0,-1).
std::vector<double> stereo_to_sphere(const std::vector<double>& y);

/// Inverse map; throws std::domain_error at the north pole.
std::vector<double> sphere_to_stereo(const std::vector<double>& x);

/// Mobius dilation of S^n toward the pole P: in stereographic coordinates
/// with P at infinity, y -> t y. |P| must be 1 within 1e-12 and t >= 1.
struct MobiusMap {
    std::vector<double> P;
    double t = 1.0;
    MobiusMap(std::vector<double> pole, double dilation);
    int sphere_dim() const { return (int)P.size() - 1; }
};

/// apply phi_{P,t} to a point x on S^n
std::vector<double> mobius_apply(const MobiusMap& phi, const std::vector<double>& x);

/// conformal factor c with phi^* g0 = c^2 g0, evaluated at x
double mobius_conformal_factor(const MobiusMap& phi, const std::vector<double>& x);

/// Rotationally symmetric positive function on S^n sampled at
/// theta_j = j*pi/N, j = 0..N (colatitude from the north pole e_{n+1}).
/// Stencils use even reflection across both poles.
class SphereAxisymField {
  public:
    SphereAxisymField(int n, int N, std::vector<double> vals);
    SphereAxisymField(int n, int N, const std::function<double(double)>& f_theta);

    int n() const { return n_; }
    int N() const { return N_; }
    double h() const { return M_PI / N_; }
    double theta(int j) const { return M_PI * j / N_; }
    double operator[](int j) const { return v_[j]; }
    double& operator[](int j) { return v_[j]; }
    const std::vector<double>& values() const { return v_; }

    /// value with even reflection outside [0, N]
    double refl(int j) const {
        if (j < 0) j = -j;
        if (j > N_) j = 2 * N_ - j;
        return v_[j];
    }
    double d1(int j) const; // 4th-order theta-derivative
    double d2(int j) const;

    void require_positive(const char* what) const;

  private:
    int n_, N_;
    std::vector<double> v_;
};

/// Eigenvalues of the Schouten tensor of g_v = v^{4/(n-2)} g0 with respect
/// to g_v at node j: (lambda_theta, lambda_tan x (n-1)), assembled into a
/// Spectrum of length n. Poles use the regularized limit cot(theta) v' -> v''.
Spectrum schouten_sphere_axisym(const SphereAxisymField& v, int j);

/// T_phi v = (v o phi) |det d phi|^{(n-2)/(2n)} for phi = phi_{P,t} with the
/// pole on the symmetry axis: pole = +1 for P = e_{n+1}, -1 for P = -e_{n+1}.
/// t >= 1. For the inverse transform T_{phi^{-1}} use (-pole, t), since
/// phi_{P,t}^{-1} = phi_{-P,t}.
SphereAxisymField mobius_pullback_axisym(const SphereAxisymField& v, double t, int pole);

/// general-map wrapper: requires P on the symmetry axis
SphereAxisymField mobius_pullback(const SphereAxisymField& v, const MobiusMap& phi);

/// angle phi_{P,t} sends theta to (measured from P): tan(theta'/2) = tan(theta/2)/t
double mobius_theta(double theta, double t);
/// conformal factor along the axis parametrization
double mobius_factor(double theta, double t);

/// trapezoid quadrature weight at node j for integrals over S^n:
/// w_j = |S^{n-1}| sin^{n-1}(theta_j) * h * (1/2 at the poles)
std::vector<double> axisym_quad_weights(int n, int N);

/// discrete inner product sum_j w_j f_j g_j
double axisym_inner(const std::vector<double>& w, const std::vector<double>& f,
                    const std::vector<double>& g);

/// center of mass of the measure v^{2n/(n-2)} dv_{g0}: component along
/// e_{n+1} (the others vanish for axisymmetric fields)
double center_of_mass_axis(const SphereAxisymField& v);

/// cubic interpolation of an axisym field at angle theta in [0, pi]
double interp_axisym(const SphereAxisymField& v, double theta);

/// Quadrature rule on S^m: product Gauss-Legendre in colatitudes, uniform in
/// longitude. Exactness grows with level L (L Gauss nodes per colatitude,
/// 2L longitudes).
struct SphereRule {
    int m = 0;
    std::vector<double> nodes;   // flattened, (m+1) coords per node
    std::vector<double> weights; // sums to |S^m|
    std::int64_t size() const { return (std::int64_t)weights.size(); }
    const double* node(std::int64_t i) const { return nodes.data() + i * (m + 1); }
};
SphereRule sphere_rule(int m, int L);

/// Gauss-Legendre nodes/weights on [-1, 1]
void gauss_legendre(int L, std::vector<double>& x, std::vector<double>& w);

/// orthonormal basis of R^{d} whose last column is the unit vector p
std::vector<double> frame_with_last_axis(const std::vector<double>& p);

} // namespace sigmak
