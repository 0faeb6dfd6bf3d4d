#include "sigmak/radial.hpp"

#include <algorithm>
#include <cmath>

#include "sigmak/sphere.hpp"

namespace sigmak {

namespace {

double interp_series(const RadialProfile& p, const std::vector<double>& y, double tq) {
    if (tq < 0 || tq > p.t_max() + 1e-12)
        throw std::domain_error("RadialProfile: query time out of range");
    double u = std::min(tq, p.t_max()) / p.dt;
    int i = std::clamp((int)std::floor(u), 1, (int)y.size() - 3);
    double s = u - i;
    double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return w0 * y[i - 1] + w1 * y[i] + w2 * y[i + 1] + w3 * y[i + 2];
}

} // namespace

double RadialProfile::interp_xi(double tq) const { return interp_series(*this, xi, tq); }
double RadialProfile::interp_xip(double tq) const { return interp_series(*this, xip, tq); }

double sigma_cylindrical(double xi, double xip, double xipp, int ell, int n) {
    if (ell < 1 || ell > n) throw std::domain_error("sigma_cylindrical: ell out of range 1..n");
    const double one_m = 1.0 - xip * xip;
    if (!(one_m > 0)) throw ConeError("sigma_cylindrical: |xi'| >= 1 leaves the cone");
    return std::pow(2.0, 1.0 - ell) * binomial(n - 1, ell - 1) * std::exp(2.0 * ell * xi) *
           std::pow(one_m, ell - 1.0) * (xipp + (n - 2.0 * ell) / (2.0 * ell) * one_m);
}

double h_of_a(double a, int n) { return 1.0 - std::exp(-double(n) * a); }

double gamma_of_a(double a, int n) {
    double h = h_of_a(a, n);
    return 0.5 * (n - 2.0) * (1.0 + std::sqrt(1.0 - std::pow(h, 2.0 / n)));
}

namespace {

struct Rhs {
    std::function<double(double, double, double)> xipp; // (t, xi, xip)
};

RadialProfile rk4_integrate(double a, int n, double t_max, double step, const Rhs& rhs,
                            double cone_floor, bool throw_on_cone) {
    RadialProfile p;
    p.n = n;
    p.a = a;
    p.dt = step;
    double xi = a, xip = 0.0, t = 0.0;
    auto push = [&](double tt, double x, double xp) {
        p.t.push_back(tt);
        p.xi.push_back(x);
        p.xip.push_back(xp);
        p.xipp.push_back(rhs.xipp(tt, x, xp));
    };
    push(t, xi, xip);
    const std::int64_t steps = (std::int64_t)std::llround(t_max / step);
    for (std::int64_t i = 0; i < steps; ++i) {
        try {
            double k1x = xip, k1v = rhs.xipp(t, xi, xip);
            double k2x = xip + 0.5 * step * k1v,
                   k2v = rhs.xipp(t + 0.5 * step, xi + 0.5 * step * k1x, xip + 0.5 * step * k1v);
            double k3x = xip + 0.5 * step * k2v,
                   k3v = rhs.xipp(t + 0.5 * step, xi + 0.5 * step * k2x, xip + 0.5 * step * k2v);
            double k4x = xip + step * k3v, k4v = rhs.xipp(t + step, xi + step * k3x, xip + step * k3v);
            xi += step / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            xip += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        } catch (const ConeError&) {
            if (throw_on_cone) throw;
            break; // a stage left the cone: keep the admissible part only
        }
        t += step;
        if (1.0 - xip * xip <= cone_floor) {
            if (throw_on_cone)
                throw ConeError("radial integration: |xi'| reached 1 at t = " + std::to_string(t));
            break;
        }
        push(t, xi, xip);
    }
    return p;
}

} // namespace

RadialProfile integrate_Va(double a, int n, double t_max, double step) {
    if (a < 0) throw std::domain_error("integrate_Va: a must be >= 0");
    if (n < 4 || n % 2 != 0) throw std::domain_error("integrate_Va: n must be even and >= 4");
    Rhs rhs;
    rhs.xipp = [n](double, double xi, double xip) {
        double one_m = 1.0 - xip * xip;
        if (!(one_m > 0)) throw ConeError("integrate_Va: cone exit");
        return std::exp(-double(n) * xi) * std::pow(one_m, 1.0 - 0.5 * n);
    };
    // conservation keeps 1 - xi'^2 = (h + e^{-n xi})^{2/n} > 0; a tiny floor
    // only guards round-off at a = 0
    return rk4_integrate(a, n, t_max, step, rhs, 1e-14, true);
}

RadialProfile integrate_profile_sigma(double a, int n, int k,
                                      const std::function<double(double)>& target, double t_max,
                                      double step, double cone_floor) {
    if (k < 1 || k > n) throw std::domain_error("integrate_profile_sigma: k out of range");
    const double pref = std::pow(2.0, k - 1.0) / binomial(n - 1, k - 1);
    Rhs rhs;
    rhs.xipp = [=](double t, double xi, double xip) {
        double one_m = 1.0 - xip * xip;
        if (one_m <= cone_floor) throw ConeError("integrate_profile_sigma: cone exit");
        return target(t) * pref * std::exp(-2.0 * k * xi) * std::pow(one_m, 1.0 - k) -
               (n - 2.0 * k) / (2.0 * k) * one_m;
    };
    return rk4_integrate(a, n, t_max, step, rhs, cone_floor, false);
}

double conserved_E(const RadialProfile& p, int j) {
    double one_m = 1.0 - p.xip[j] * p.xip[j];
    return std::pow(one_m, 0.5 * p.n) - std::exp(-double(p.n) * p.xi[j]);
}

double conservation_drift(const RadialProfile& p) {
    const double h = h_of_a(p.a, p.n);
    double worst = 0;
    for (size_t j = 0; j < p.t.size(); ++j)
        worst = std::max(worst, std::fabs(conserved_E(p, (int)j) - h));
    return worst;
}

double tail_exponent(const RadialProfile& p) {
    if (p.t_max() < 15.0)
        throw PreconditionError("tail_exponent: profile must reach t_max >= 15");
    const double lo = p.t_max() - 5.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::int64_t m = 0;
    for (size_t j = 0; j < p.t.size(); ++j) {
        if (p.t[j] < lo) continue;
        double x = p.t[j];
        double y = 0.5 * (p.n - 2.0) * (p.xi[j] + p.t[j]); // = -ln V_a(r)
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

MonotoneReport check_H_monotone(const RadialProfile& p, int k) {
    MonotoneReport rep;
    const int n = p.n;
    // test over the maximal prefix range with xi' >= 0 (start included)
    int hi = 0;
    while (hi + 1 < (int)p.t.size() && p.xip[hi + 1] >= -1e-12) ++hi;
    rep.from = 0;
    rep.to = hi;
    auto H = [&](int j) {
        return std::exp((2.0 * k - n) * p.xi[j]) * std::pow(1.0 - p.xip[j] * p.xip[j], (double)k);
    };
    for (int j = rep.from; j < rep.to; ++j)
        rep.max_step_increase = std::max(rep.max_step_increase, H(j + 1) - H(j));
    return rep;
}

TwoSidedReport check_two_sided_bound(const RadialProfile& p, double r1, double r2, int k) {
    const int n = p.n;
    if (!(2 * k > n)) throw std::domain_error("check_two_sided_bound: requires k > n/2");
    if (!(r2 > r1) || !(r1 > 0)) throw std::invalid_argument("check_two_sided_bound: need 0 < r1 < r2");
    const double t1 = std::log(r1), t2 = std::log(r2);
    if (t1 < 0 || t2 > p.t_max())
        throw std::domain_error("check_two_sided_bound: [r1, r2] outside the profile range");
    // monotonicity precondition: r^{(n-2)/2} u non-increasing <=> xi' >= 0
    for (size_t j = 0; j < p.t.size(); ++j) {
        if (p.t[j] < t1 || p.t[j] > t2) continue;
        if (p.xip[j] < -1e-10)
            throw PreconditionError("check_two_sided_bound: r^{(n-2)/2} u not non-increasing on [r1, r2]");
    }
    TwoSidedReport rep;
    // ln(r^{n-2} u(r)) = (n-2)/2 (t - xi)
    double l1 = 0.5 * (n - 2.0) * (t1 - p.interp_xi(t1));
    double l2 = 0.5 * (n - 2.0) * (t2 - p.interp_xi(t2));
    rep.ratio = std::exp(l2 - l1);
    rep.bound = std::pow(2.0, (n - 2.0) * k / (2.0 * k - n));
    rep.ok = rep.ratio >= 1.0 - 1e-8 && rep.ratio <= rep.bound + 1e-8;
    return rep;
}

std::vector<double> spherical_average(const GridField& u, const std::vector<double>& center,
                                      const std::vector<double>& radii, int level) {
    const int n = u.grid().n;
    if ((int)center.size() != n) throw std::invalid_argument("spherical_average: center size");
    SphereRule rule = sphere_rule(n - 1, level);
    const double area = sphere_area(n - 1);
    const double pexp = -2.0 / (n - 2.0);
    std::vector<double> out;
    out.reserve(radii.size());
    std::vector<double> x(n);
    for (double r : radii) {
        if (!(r > 0)) throw std::domain_error("spherical_average: radius must be positive");
        double acc = 0;
        for (std::int64_t q = 0; q < rule.size(); ++q) {
            const double* om = rule.node(q);
            for (int d = 0; d < n; ++d) x[d] = center[d] + r * om[d];
            double uv = interp_cubic(u, x.data());
            if (!(uv > 0))
                throw PreconditionError("spherical_average: u must be positive on the sphere");
            acc += rule.weights[q] * std::pow(uv, pexp);
        }
        out.push_back(std::pow(acc / area, -0.5 * (n - 2.0)));
    }
    return out;
}

} // namespace sigmak
