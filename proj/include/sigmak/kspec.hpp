#pragma once

#include <map>
#include <string>
#include <vector>

#include "sigmak/util.hpp"

namespace sigmak {

/// Sparse multivariate polynomial, exponent vector -> coefficient.
class Poly {
  public:
    explicit Poly(int nvars) : nvars_(nvars) {}
    static Poly constant(int nvars, double c);
    static Poly var(int nvars, int i);

    int nvars() const { return nvars_; }
    double eval(const double* x) const;
    Poly deriv(int i) const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly pow(int p) const;
    void add_term(const std::vector<int>& exps, double c);
    bool empty() const { return terms_.empty(); }
    const std::map<std::vector<int>, double>& terms() const { return terms_; }

  private:
    int nvars_;
    std::map<std::vector<int>, double> terms_;
};

/// Parse a polynomial in variables x1..x<nvars>: numbers, + - * ^ and
/// parentheses ("2 + x5", "1.5 + 0.1*x5^2 - 0.2*(x1 - x2)^2").
Poly parse_poly(const std::string& expr, int nvars);

/// polynomial flattened for tight evaluation loops
struct PolyFlat {
    int nvars = 0;
    std::vector<double> coef;
    std::vector<signed char> exps; // nvars entries per term
    void build(const Poly& p);
    double eval(const double* x) const {
        double s = 0;
        const signed char* e = exps.data();
        for (size_t t = 0; t < coef.size(); ++t, e += nvars) {
            double term = coef[t];
            for (int i = 0; i < nvars; ++i) {
                double xi = x[i];
                for (int p = 0; p < e[i]; ++p) term *= xi;
            }
            s += term;
        }
        return s;
    }
};

/// Smooth function on S^n given by the restriction of an ambient polynomial
/// in x_1..x_{n+1}; carries analytic derivatives for critical-point work.
class KFunction {
  public:
    KFunction(Poly p, int n);
    static KFunction parse(const std::string& expr, int n);
    /// fast path used by quadrature loops
    double value_flat(const double* x) const { return pf_.eval(x); }

    int n() const { return n_; }
    double value(const std::vector<double>& x) const;
    /// ambient gradient and Hessian of the polynomial extension
    std::vector<double> ambient_grad(const std::vector<double>& x) const;
    std::vector<double> ambient_hess(const std::vector<double>& x) const; // (n+1)^2 row-major

    /// tangential gradient P_x grad, |.| is the sphere gradient norm
    std::vector<double> sphere_grad(const std::vector<double>& x) const;
    /// Laplace-Beltrami: tr(Hess) - x^T Hess x - n (x . grad)
    double sphere_laplacian(const std::vector<double>& x) const;
    /// intrinsic Hessian in the orthonormal tangent frame E (columns of the
    /// (n+1)x(n+1) frame matrix, last column = x): H_ij = E_i^T Hess E_j - mu delta_ij
    std::vector<double> intrinsic_hessian(const std::vector<double>& x,
                                          const std::vector<double>& frame) const;

  private:
    int n_;
    Poly p_;
    PolyFlat pf_;
    std::vector<Poly> dp_;
    std::vector<Poly> ddp_; // row-major (n+1)^2
};

/// Axisymmetric curvature target K(theta) with derivative, from a polynomial
/// in x_{n+1} or from a sampled (theta, K) table (cubic interpolation).
struct AxisymK {
    std::function<double(double)> K;   // of theta in [0, pi]
    std::function<double(double)> dK;  // dK/dtheta

    static AxisymK constant(double c);
    static AxisymK from_poly(const Poly& p_in_cos); // 1-variable polynomial in c = cos(theta)
    static AxisymK from_samples(const std::vector<double>& theta, const std::vector<double>& K);
};

} // namespace sigmak
