#pragma once

#include <vector>

#include "sigmak/util.hpp"

namespace sigmak {

/// Spectrum of a Schouten-type tensor: n real eigenvalues, n >= 1.
using Spectrum = std::vector<double>;

/// Dense symmetric n x n matrix. Stored full; set() keeps both triangles in
/// sync. Products are only formed between commuting polynomial combinations
/// of one matrix (Newton tensor recursion), which stay symmetric.
class SymMat {
  public:
    explicit SymMat(int n) : n_(n), a_(n * n, 0.0) {
        if (n < 1) throw std::invalid_argument("SymMat: dimension must be >= 1");
    }
    static SymMat identity(int n) {
        SymMat I(n);
        for (int i = 0; i < n; ++i) I.a_[i * n + i] = 1.0;
        return I;
    }
    int dim() const { return n_; }
    double operator()(int i, int j) const { return a_[i * n_ + j]; }
    void set(int i, int j, double v) { a_[i * n_ + j] = v; a_[j * n_ + i] = v; }
    void add(int i, int j, double v) {
        a_[i * n_ + j] += v;
        if (i != j) a_[j * n_ + i] += v;
    }
    double trace() const {
        double t = 0;
        for (int i = 0; i < n_; ++i) t += a_[i * n_ + i];
        return t;
    }
    SymMat& operator+=(const SymMat& o);
    SymMat& operator-=(const SymMat& o);
    SymMat& operator*=(double s);
    friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
    friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
    friend SymMat operator*(SymMat a, double s) { return a *= s; }
    friend SymMat operator*(double s, SymMat a) { return a *= s; }

    /// symmetrized product (valid for commuting factors; symmetrization
    /// absorbs round-off)
    SymMat mul_sym(const SymMat& o) const;

    /// max |a_ij - a_ji| relative to max|a|; 0 for exactly symmetric input
    double asymmetry() const;
    bool finite() const;

    const std::vector<double>& raw() const { return a_; }

  private:
    int n_;
    std::vector<double> a_;
};

/// k-th elementary symmetric function of the entries of lambda.
/// Computed by the characteristic-polynomial coefficient recurrence.
double sigma(const Spectrum& lambda, int k);

/// all elementary symmetric functions e_0..e_n at once
std::vector<double> sigma_all(const Spectrum& lambda);

/// Open-cone membership: sigma_j(lambda) > tol for every j = 1..k.
/// Boundary values (sigma_j == 0) are not in the open cone.
bool in_gamma_k(const Spectrum& lambda, int k, double tol = 1e-10);

/// l-th Newton tensor of F: T_0 = I, T_{l+1} = -T_l F + sigma_{l+1}(F) I,
/// with sigma_{l+1}(F) = tr(T_l F)/(l+1). Satisfies tr T_l = (n-l) sigma_l.
SymMat newton_tensor(const SymMat& F, int ell);

/// T_0..T_maxl together with sigma_0..sigma_{maxl+1} of F (trace recursion,
/// no eigensolver); sig has maxl+2 entries when maxl < n, else n+1.
struct NewtonChain {
    std::vector<SymMat> T;
    std::vector<double> sig;
};
NewtonChain newton_chain(const SymMat& F, int maxl);

/// sigma_k of the eigenvalues of A (cyclic Jacobi eigensolver)
double sigma_of_matrix(const SymMat& A, int k);

/// d sigma_k(lambda(A)) / dA = T_{k-1}(A)
SymMat dsigma_dA(const SymMat& A, int k);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps,
/// ascending order. Convergence: off-diagonal Frobenius norm below
/// 1e-13 * scale.
Spectrum eigenvalues_sym(const SymMat& A);

struct EigenSystem {
    Spectrum values;                       // ascending
    std::vector<std::vector<double>> vecs; // vecs[i] is the unit eigenvector of values[i]
};
EigenSystem eigen_sym(const SymMat& A);

} // namespace sigmak
