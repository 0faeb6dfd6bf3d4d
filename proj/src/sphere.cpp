#include "sigmak/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sigmak {

std::vector<double> stereo_to_sphere(const std::vector<double>& y) {
    const int n = (int)y.size();
    double r2 = 0;
    for (double v : y) r2 += v * v;
    std::vector<double> x(n + 1);
    const double d = 1.0 + r2;
    for (int i = 0; i < n; ++i) x[i] = 2.0 * y[i] / d;
    x[n] = (r2 - 1.0) / d;
    return x;
}

std::vector<double> sphere_to_stereo(const std::vector<double>& x) {
    const int n = (int)x.size() - 1;
    if (x[n] >= 1.0 - 1e-15) throw std::domain_error("sphere_to_stereo: north pole");
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = x[i] / (1.0 - x[n]);
    return y;
}

MobiusMap::MobiusMap(std::vector<double> pole, double dilation) : P(std::move(pole)), t(dilation) {
    double r2 = 0;
    for (double v : P) r2 += v * v;
    if (std::fabs(std::sqrt(r2) - 1.0) > 1e-12)
        throw std::invalid_argument("MobiusMap: |P| must be 1");
    if (!(t >= 1.0)) throw std::invalid_argument("MobiusMap: t must be >= 1");
}

double mobius_theta(double theta, double t) {
    return 2.0 * std::atan2(std::sin(0.5 * theta), t * std::cos(0.5 * theta));
}

double mobius_factor(double theta, double t) {
    double s = std::sin(0.5 * theta), c = std::cos(0.5 * theta);
    return t / (s * s + t * t * c * c);
}

std::vector<double> mobius_apply(const MobiusMap& phi, const std::vector<double>& x) {
    const int d = (int)x.size();
    double ct = 0;
    for (int i = 0; i < d; ++i) ct += x[i] * phi.P[i];
    ct = std::clamp(ct, -1.0, 1.0);
    double theta = std::acos(ct); // angle from P
    double st = std::sin(theta);
    std::vector<double> out(d);
    double tp = mobius_theta(theta, phi.t);
    double c2 = std::cos(tp), s2 = std::sin(tp);
    if (st < 1e-15) {
        // poles are fixed points of phi_{P,t}
        for (int i = 0; i < d; ++i) out[i] = c2 * phi.P[i];
        return out;
    }
    for (int i = 0; i < d; ++i) {
        double w = (x[i] - ct * phi.P[i]) / st; // unit tangential direction
        out[i] = c2 * phi.P[i] + s2 * w;
    }
    return out;
}

double mobius_conformal_factor(const MobiusMap& phi, const std::vector<double>& x) {
    double ct = 0;
    for (size_t i = 0; i < x.size(); ++i) ct += x[i] * phi.P[i];
    ct = std::clamp(ct, -1.0, 1.0);
    return mobius_factor(std::acos(ct), phi.t);
}

SphereAxisymField::SphereAxisymField(int n, int N, std::vector<double> vals)
    : n_(n), N_(N), v_(std::move(vals)) {
    if (n < 3) throw std::invalid_argument("SphereAxisymField: n must be >= 3");
    if (N < 8) throw std::invalid_argument("SphereAxisymField: need N >= 8");
    if ((int)v_.size() != N + 1)
        throw std::invalid_argument("SphereAxisymField: need N+1 node values");
}

SphereAxisymField::SphereAxisymField(int n, int N, const std::function<double(double)>& f_theta)
    : n_(n), N_(N) {
    if (n < 3) throw std::invalid_argument("SphereAxisymField: n must be >= 3");
    if (N < 8) throw std::invalid_argument("SphereAxisymField: need N >= 8");
    v_.resize(N + 1);
    for (int j = 0; j <= N; ++j) v_[j] = f_theta(theta(j));
}

double SphereAxisymField::d1(int j) const {
    const double hh = h();
    return (refl(j - 2) - 8.0 * refl(j - 1) + 8.0 * refl(j + 1) - refl(j + 2)) / (12.0 * hh);
}

double SphereAxisymField::d2(int j) const {
    const double hh = h();
    return (-refl(j - 2) + 16.0 * refl(j - 1) - 30.0 * v_[j] + 16.0 * refl(j + 1) - refl(j + 2)) /
           (12.0 * hh * hh);
}

void SphereAxisymField::require_positive(const char* what) const {
    for (double v : v_)
        if (!(v > 0)) throw PreconditionError(std::string(what) + ": field must be positive");
}

Spectrum schouten_sphere_axisym(const SphereAxisymField& v, int j) {
    const int n = v.n();
    if (j < 0 || j > v.N()) throw std::domain_error("schouten_sphere_axisym: node out of range");
    const double vv = v[j];
    if (!(vv > 0)) throw PreconditionError("schouten_sphere_axisym: v must be positive");
    const double a2 = 2.0 / (n - 2.0);
    const double a3 = 2.0 * (n - 1.0) / ((n - 2.0) * (n - 2.0));
    const double a4 = 2.0 / ((n - 2.0) * (n - 2.0));
    const double vp = v.d1(j), vpp = v.d2(j);
    const double s = std::pow(vv, -4.0 / (n - 2.0));
    double lam_theta, lam_tan;
    if (j == 0 || j == v.N()) {
        // pole: v' = 0 and cot(theta) v' -> v''
        lam_theta = s * (0.5 - a2 * vpp / vv);
        lam_tan = lam_theta;
    } else {
        const double q = vp / vv;
        lam_theta = s * (0.5 - a2 * vpp / vv + a3 * q * q);
        lam_tan = s * (0.5 - a2 * (1.0 / std::tan(v.theta(j))) * q - a4 * q * q);
    }
    Spectrum lam(n, lam_tan);
    lam[0] = lam_theta;
    return lam;
}

double interp_axisym(const SphereAxisymField& v, double theta) {
    if (theta < -1e-12 || theta > M_PI + 1e-12)
        throw NumericError("interp_axisym: angle out of [0, pi]");
    theta = std::clamp(theta, 0.0, M_PI);
    const double u = theta / v.h();
    int i = (int)std::floor(u);
    if (i >= v.N()) i = v.N() - 1;
    const double s = u - i;
    // 4-point Lagrange with reflection ghosts
    double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return w0 * v.refl(i - 1) + w1 * v.refl(i) + w2 * v.refl(i + 1) + w3 * v.refl(i + 2);
}

SphereAxisymField mobius_pullback_axisym(const SphereAxisymField& v, double t, int pole) {
    if (!(t >= 1.0)) throw std::invalid_argument("mobius_pullback_axisym: t must be >= 1");
    if (pole != 1 && pole != -1)
        throw std::invalid_argument("mobius_pullback_axisym: pole must be +1 or -1");
    const int n = v.n(), N = v.N();
    std::vector<double> out(N + 1);
    for (int j = 0; j <= N; ++j) {
        // angle from P
        double thP = pole == 1 ? v.theta(j) : M_PI - v.theta(j);
        double thP2 = mobius_theta(thP, t);
        double th2 = pole == 1 ? thP2 : M_PI - thP2;
        out[j] = interp_axisym(v, th2) * std::pow(mobius_factor(thP, t), 0.5 * (n - 2));
    }
    return SphereAxisymField(n, N, std::move(out));
}

SphereAxisymField mobius_pullback(const SphereAxisymField& v, const MobiusMap& phi) {
    if (phi.sphere_dim() != v.n())
        throw std::invalid_argument("mobius_pullback: dimension mismatch");
    const int d = v.n() + 1;
    double axis = phi.P[d - 1];
    for (int i = 0; i + 1 < d; ++i)
        if (std::fabs(phi.P[i]) > 1e-12)
            throw std::invalid_argument("mobius_pullback: pole must lie on the symmetry axis");
    return mobius_pullback_axisym(v, phi.t, axis > 0 ? 1 : -1);
}

std::vector<double> axisym_quad_weights(int n, int N) {
    const double h = M_PI / N;
    const double area = sphere_area(n - 1);
    std::vector<double> w(N + 1);
    for (int j = 0; j <= N; ++j) {
        double wj = (j == 0 || j == N) ? 0.5 * h : h;
        w[j] = area * std::pow(std::sin(M_PI * j / N), n - 1.0) * wj;
    }
    return w;
}

double axisym_inner(const std::vector<double>& w, const std::vector<double>& f,
                    const std::vector<double>& g) {
    double s = 0;
    for (size_t j = 0; j < w.size(); ++j) s += w[j] * f[j] * g[j];
    return s;
}

double center_of_mass_axis(const SphereAxisymField& v) {
    auto w = axisym_quad_weights(v.n(), v.N());
    const double p = 2.0 * v.n() / (v.n() - 2.0);
    double s = 0;
    for (int j = 0; j <= v.N(); ++j)
        s += w[j] * std::cos(v.theta(j)) * std::pow(v[j], p);
    return s;
}

void gauss_legendre(int L, std::vector<double>& x, std::vector<double>& w) {
    x.resize(L);
    w.resize(L);
    for (int i = 0; i < L; ++i) {
        // Newton from Chebyshev-like initial guess
        double t = std::cos(M_PI * (i + 0.75) / (L + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= L; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = L * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::fabs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= L; ++k) {
            double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = L * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

SphereRule sphere_rule(int m, int L) {
    if (m < 1) throw std::invalid_argument("sphere_rule: m must be >= 1");
    SphereRule rule;
    rule.m = m;
    if (m == 1) {
        int M = 2 * L;
        rule.nodes.resize(2 * M);
        rule.weights.assign(M, 2.0 * M_PI / M);
        for (int i = 0; i < M; ++i) {
            double phi = 2.0 * M_PI * i / M;
            rule.nodes[2 * i] = std::cos(phi);
            rule.nodes[2 * i + 1] = std::sin(phi);
        }
        return rule;
    }
    SphereRule sub = sphere_rule(m - 1, L);
    std::vector<double> gx, gw;
    gauss_legendre(L, gx, gw);
    rule.nodes.resize((std::int64_t)L * sub.size() * (m + 1));
    rule.weights.resize((std::int64_t)L * sub.size());
    std::int64_t out = 0;
    for (int i = 0; i < L; ++i) {
        // Gauss-Legendre in the colatitude itself: sin^{m-1} stays smooth on
        // odd-dimensional spheres, unlike the (1-u^2)^{(m-2)/2} weight in u
        const double theta = 0.5 * M_PI * (gx[i] + 1.0);
        const double u = std::cos(theta);
        const double st = std::sin(theta);
        const double wc = gw[i] * 0.5 * M_PI * std::pow(st, m - 1.0);
        for (std::int64_t q = 0; q < sub.size(); ++q, ++out) {
            const double* sn = sub.node(q);
            double* dst = rule.nodes.data() + out * (m + 1);
            for (int c = 0; c < m; ++c) dst[c] = st * sn[c];
            dst[m] = u;
            rule.weights[out] = wc * sub.weights[q];
        }
    }
    return rule;
}

std::vector<double> frame_with_last_axis(const std::vector<double>& p) {
    const int d = (int)p.size();
    // Householder reflection mapping e_d to p gives an orthogonal matrix
    std::vector<double> Q(d * d, 0.0);
    std::vector<double> v(d);
    double sign = p[d - 1] >= 0 ? 1.0 : -1.0;
    for (int i = 0; i < d; ++i) v[i] = p[i];
    v[d - 1] += sign;
    double v2 = 0;
    for (double t : v) v2 += t * t;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            Q[i * d + j] = (i == j ? 1.0 : 0.0) - (v2 > 0 ? 2.0 * v[i] * v[j] / v2 : 0.0);
    // columns of -sign*Q form the frame; last column equals p
    for (double& q : Q) q *= -sign;
    return Q; // column c: Q[i*d + c]
}

} // namespace sigmak
