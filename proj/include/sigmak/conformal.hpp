#pragma once

#include "sigmak/grid.hpp"
#include "sigmak/symmetric.hpp"

namespace sigmak {

/// standard bubble (lam / (1 + lam^2 |z - y0|^2))^{(n-2)/2}
double bubble(const double* z, const double* y0, double lam, int n);

/// log-conformal factor of the bubble: psi = -2/(n-2) ln u = ln((1+lam^2|z-y0|^2)/lam)
double bubble_psi(const double* z, const double* y0, double lam, int n);

/// F[psi] = Hess psi + grad psi (x) grad psi - 1/2 |grad psi|^2 I,
/// assembled with 4th-order central stencils at an interior node (margin 2).
template <class Field>
SymMat f_of_psi_at(const Field& psi, const int* idx) {
    const BoxGrid& g = psi.grid();
    stencil::require_margin(g, idx, 2);
    const int n = g.n;
    double gr[kMaxDim];
    stencil::gradient(psi, idx, gr);
    double g2 = 0;
    for (int d = 0; d < n; ++d) g2 += gr[d] * gr[d];
    SymMat F(n);
    for (int i = 0; i < n; ++i) {
        F.set(i, i, stencil::d2(psi, idx, i) + gr[i] * gr[i] - 0.5 * g2);
        for (int j = i + 1; j < n; ++j)
            F.set(i, j, stencil::d1d1(psi, idx, i, j) + gr[i] * gr[j]);
    }
    return F;
}

/// (1,1)-Schouten tensor of u^{4/(n-2)} times the Euclidean metric:
///   A^u = -2/(n-2) u^{-(n+2)/(n-2)} Hess u
///         + 2n/(n-2)^2 u^{-2n/(n-2)} du (x) du
///         - 1/(n-2)^2 u^{-2n/(n-2)} |du|^2 I * 2
template <class Field>
SymMat schouten_euclidean_at(const Field& u, const int* idx) {
    const BoxGrid& g = u.grid();
    stencil::require_margin(g, idx, 2);
    const int n = g.n;
    if (n < 3) throw std::domain_error("schouten_euclidean: dimension must be >= 3");
    const double uv = u.value(idx);
    if (!(uv > 0)) throw PreconditionError("schouten_euclidean: u must be positive");
    double gr[kMaxDim];
    stencil::gradient(u, idx, gr);
    double g2 = 0;
    for (int d = 0; d < n; ++d) g2 += gr[d] * gr[d];
    const double cm = 2.0 / (n - 2.0);
    const double c1 = cm * std::pow(uv, -(n + 2.0) / (n - 2.0));
    const double c2 = 2.0 * n / ((n - 2.0) * (n - 2.0)) * std::pow(uv, -2.0 * n / (n - 2.0));
    const double c3 = cm / (n - 2.0) * std::pow(uv, -2.0 * n / (n - 2.0));
    SymMat A(n);
    for (int i = 0; i < n; ++i) {
        A.set(i, i, -c1 * stencil::d2(u, idx, i) + c2 * gr[i] * gr[i] - c3 * g2);
        for (int j = i + 1; j < n; ++j)
            A.set(i, j, -c1 * stencil::d1d1(u, idx, i, j) + c2 * gr[i] * gr[j]);
    }
    return A;
}

SymMat f_of_psi(const GridField& psi, const int* idx);
SymMat schouten_euclidean(const GridField& u, const int* idx);

/// Kelvin transform with normalization c = 1:
///   u~(x) = R^{n-2} |x|^{-(n-2)} u(R^2 x / |x|^2)
/// evaluated on target's nodes by cubic interpolation of u.
/// Target nodes must avoid 0 and map into u's grid.
GridField kelvin(const GridField& u, double R, const BoxGrid& target);

} // namespace sigmak
