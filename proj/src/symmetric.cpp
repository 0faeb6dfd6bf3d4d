#include "sigmak/symmetric.hpp"

#include <algorithm>
#include <cmath>

namespace sigmak {

SymMat& SymMat::operator+=(const SymMat& o) {
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}
SymMat& SymMat::operator-=(const SymMat& o) {
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}
SymMat& SymMat::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

SymMat SymMat::mul_sym(const SymMat& o) const {
    SymMat r(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) {
            double sij = 0, sji = 0;
            for (int m = 0; m < n_; ++m) {
                sij += a_[i * n_ + m] * o.a_[m * n_ + j];
                sji += a_[j * n_ + m] * o.a_[m * n_ + i];
            }
            r.set(i, j, 0.5 * (sij + sji));
        }
    return r;
}

double SymMat::asymmetry() const {
    double scale = 0, worst = 0;
    for (double v : a_) scale = std::max(scale, std::fabs(v));
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            worst = std::max(worst, std::fabs(a_[i * n_ + j] - a_[j * n_ + i]));
    return scale > 0 ? worst / scale : worst;
}

bool SymMat::finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::vector<double> sigma_all(const Spectrum& lambda) {
    const int n = (int)lambda.size();
    std::vector<double> e(n + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::min(n, i + 1); j >= 1; --j) e[j] += lambda[i] * e[j - 1];
    return e;
}

double sigma(const Spectrum& lambda, int k) {
    const int n = (int)lambda.size();
    if (k < 1 || k > n) throw std::domain_error("sigma: k out of range 1..n");
    for (double v : lambda)
        if (!std::isfinite(v)) throw std::invalid_argument("sigma: non-finite eigenvalue");
    return sigma_all(lambda)[k];
}

bool in_gamma_k(const Spectrum& lambda, int k, double tol) {
    const int n = (int)lambda.size();
    if (k < 1 || k > n) throw std::domain_error("in_gamma_k: k out of range 1..n");
    if (tol < 0) throw std::invalid_argument("in_gamma_k: tol must be >= 0");
    auto e = sigma_all(lambda);
    for (int j = 1; j <= k; ++j)
        if (!(e[j] > tol)) return false;
    return true;
}

SymMat newton_tensor(const SymMat& F, int ell) {
    const int n = F.dim();
    if (ell < 0 || ell > n) throw std::domain_error("newton_tensor: ell out of range 0..n");
    if (F.asymmetry() > 1e-12) throw std::invalid_argument("newton_tensor: matrix not symmetric");
    SymMat T = SymMat::identity(n);
    for (int l = 0; l < ell; ++l) {
        SymMat TF = T.mul_sym(F);
        double s_next = TF.trace() / double(l + 1); // sigma_{l+1}(F)
        SymMat next = SymMat::identity(n) * s_next;
        next -= TF;
        T = next;
    }
    return T;
}

NewtonChain newton_chain(const SymMat& F, int maxl) {
    const int n = F.dim();
    if (maxl < 0 || maxl > n) throw std::domain_error("newton_chain: maxl out of range 0..n");
    NewtonChain c;
    c.T.reserve(maxl + 1);
    c.sig.reserve(maxl + 2);
    c.T.push_back(SymMat::identity(n));
    c.sig.push_back(1.0);
    for (int l = 0; l < maxl; ++l) {
        SymMat TF = c.T.back().mul_sym(F);
        double s = TF.trace() / double(l + 1); // sigma_{l+1}(F)
        c.sig.push_back(s);
        SymMat next = SymMat::identity(n) * s;
        next -= TF;
        c.T.push_back(next);
    }
    if (maxl < n) { // sigma_{maxl+1} is still defined
        SymMat TF = c.T.back().mul_sym(F);
        c.sig.push_back(TF.trace() / double(maxl + 1));
    }
    return c;
}

namespace {

// One cyclic Jacobi pass; returns remaining off-diagonal Frobenius norm^2.
double jacobi_sweep(std::vector<double>& a, std::vector<double>* V, int n) {
    for (int p = 0; p < n - 1; ++p)
        for (int q = p + 1; q < n; ++q) {
            double apq = a[p * n + q];
            if (apq == 0.0) continue;
            double app = a[p * n + p], aqq = a[q * n + q];
            double tau = (aqq - app) / (2.0 * apq);
            double t = (tau >= 0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
            double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
            for (int i = 0; i < n; ++i) {
                double aip = a[i * n + p], aiq = a[i * n + q];
                a[i * n + p] = c * aip - s * aiq;
                a[i * n + q] = s * aip + c * aiq;
            }
            for (int j = 0; j < n; ++j) {
                double apj = a[p * n + j], aqj = a[q * n + j];
                a[p * n + j] = c * apj - s * aqj;
                a[q * n + j] = s * apj + c * aqj;
            }
            if (V)
                for (int i = 0; i < n; ++i) {
                    double vip = (*V)[i * n + p], viq = (*V)[i * n + q];
                    (*V)[i * n + p] = c * vip - s * viq;
                    (*V)[i * n + q] = s * vip + c * viq;
                }
        }
    double off2 = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) off2 += 2.0 * a[i * n + j] * a[i * n + j];
    return off2;
}

void jacobi_diagonalize(const SymMat& A, std::vector<double>& a, std::vector<double>* V) {
    const int n = A.dim();
    if (!A.finite()) throw NumericError("eigenvalues_sym: non-finite entries");
    if (A.asymmetry() > 1e-12) throw std::invalid_argument("eigenvalues_sym: matrix not symmetric");
    a = A.raw();
    // symmetrize exactly so the rotations see a_pq == a_qp
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double m = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = a[j * n + i] = m;
        }
    if (V) {
        V->assign(n * n, 0.0);
        for (int i = 0; i < n; ++i) (*V)[i * n + i] = 1.0;
    }
    double scale = 0;
    for (double v : a) scale = std::max(scale, std::fabs(v));
    if (scale == 0) return;
    const double tol2 = (1e-13 * scale) * (1e-13 * scale);
    for (int sweep = 0; sweep < 64; ++sweep)
        if (jacobi_sweep(a, V, n) <= tol2) return;
    throw NumericError("eigenvalues_sym: Jacobi iteration did not converge");
}

} // namespace

Spectrum eigenvalues_sym(const SymMat& A) {
    const int n = A.dim();
    std::vector<double> a;
    jacobi_diagonalize(A, a, nullptr);
    Spectrum ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a[i * n + i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

EigenSystem eigen_sym(const SymMat& A) {
    const int n = A.dim();
    std::vector<double> a, V;
    jacobi_diagonalize(A, a, &V);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a[i * n + i] < a[j * n + j]; });
    EigenSystem es;
    es.values.resize(n);
    es.vecs.assign(n, std::vector<double>(n));
    for (int r = 0; r < n; ++r) {
        es.values[r] = a[order[r] * n + order[r]];
        for (int i = 0; i < n; ++i) es.vecs[r][i] = V[i * n + order[r]];
    }
    return es;
}

double sigma_of_matrix(const SymMat& A, int k) {
    return sigma(eigenvalues_sym(A), k);
}

SymMat dsigma_dA(const SymMat& A, int k) {
    if (k < 1 || k > A.dim()) throw std::domain_error("dsigma_dA: k out of range 1..n");
    return newton_tensor(A, k - 1);
}

} // namespace sigmak
