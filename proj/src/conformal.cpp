#include "sigmak/conformal.hpp"

#include <cmath>

namespace sigmak {

double bubble(const double* z, const double* y0, double lam, int n) {
    if (!(lam > 0)) throw std::domain_error("bubble: lam must be positive");
    double r2 = 0;
    for (int d = 0; d < n; ++d) {
        double t = z[d] - y0[d];
        r2 += t * t;
    }
    return std::pow(lam / (1.0 + lam * lam * r2), 0.5 * (n - 2));
}

double bubble_psi(const double* z, const double* y0, double lam, int n) {
    (void)n;
    if (!(lam > 0)) throw std::domain_error("bubble_psi: lam must be positive");
    double r2 = 0;
    for (int d = 0; d < n; ++d) {
        double t = z[d] - y0[d];
        r2 += t * t;
    }
    return std::log1p(lam * lam * r2) - std::log(lam);
}

SymMat f_of_psi(const GridField& psi, const int* idx) { return f_of_psi_at(psi, idx); }

SymMat schouten_euclidean(const GridField& u, const int* idx) {
    return schouten_euclidean_at(u, idx);
}

GridField kelvin(const GridField& u, double R, const BoxGrid& target) {
    if (!(R > 0)) throw std::domain_error("kelvin: R must be positive");
    const int n = u.grid().n;
    if (target.n != n) throw std::invalid_argument("kelvin: dimension mismatch");
    std::vector<double> vals(target.size());
    int idx[kMaxDim];
    double x[kMaxDim], y[kMaxDim];
    for (std::int64_t i = 0; i < (std::int64_t)vals.size(); ++i) {
        target.unflat(i, idx);
        target.point(idx, x);
        double r2 = 0;
        for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
        if (r2 == 0) throw std::domain_error("kelvin: target node at the origin");
        for (int d = 0; d < n; ++d) y[d] = R * R * x[d] / r2;
        vals[i] = std::pow(R * R / r2, 0.5 * (n - 2)) * interp_cubic(u, y);
    }
    return GridField(target, std::move(vals));
}

} // namespace sigmak
