#pragma once

#include "sigmak/grid.hpp"
#include "sigmak/util.hpp"

namespace sigmak {

/// Cylindrical-coordinate trajectory of a rotationally symmetric conformal
/// factor: t = ln r, xi(t) = -2/(n-2) ln u(r) - ln r. The cone condition
/// 1 - xi'^2 > 0 holds at every stored node.
struct RadialProfile {
    int n = 0;
    double a = 0;   // initial value xi(0); xi'(0) = 0 for V_a profiles
    double dt = 0;
    std::vector<double> t, xi, xip, xipp;

    double t_max() const { return t.empty() ? 0.0 : t.back(); }
    double interp_xi(double tq) const;
    double interp_xip(double tq) const;
};

/// sigma_l(lambda(A^u)) for the radial metric in cylindrical coordinates:
///   2^{1-l} C(n-1,l-1) e^{2 l xi} (1-xi'^2)^{l-1} [xi'' + (n-2l)/(2l) (1-xi'^2)]
/// Throws ConeError when |xi'| >= 1.
double sigma_cylindrical(double xi, double xip, double xipp, int ell, int n);

/// h(a) = 1 - e^{-na}
double h_of_a(double a, int n);

/// gamma(a) = (n-2)/2 [1 + (1 - h(a)^{2/n})^{1/2}]
double gamma_of_a(double a, int n);

/// Integrate the V_a profile: xi'' = e^{-n xi} (1 - xi'^2)^{1-n/2},
/// xi(0) = a, xi'(0) = 0 (classical RK4, fixed step). The conserved quantity
/// E = (1-xi'^2)^{n/2} - e^{-n xi} equals h(a); its drift is the accuracy
/// monitor. n must be even (k = n/2 equation).
RadialProfile integrate_Va(double a, int n, double t_max, double step = 1e-3);

/// Integrate a profile with prescribed curvature sigma_k(t) = target(t) >= 0,
/// xi(0) = a, xi'(0) = 0; used to sample admissible monotone profiles.
/// Integration stops early (profile truncated) when 1-xi'^2 falls under
/// cone_floor.
RadialProfile integrate_profile_sigma(double a, int n, int k,
                                      const std::function<double(double)>& target, double t_max,
                                      double step = 1e-3, double cone_floor = 5e-3);

/// conserved quantity at node j
double conserved_E(const RadialProfile& p, int j);
/// max_j |E(t_j) - h(a)|
double conservation_drift(const RadialProfile& p);

/// Least-squares slope of (n-2)/2 (xi(t)+t) = -ln V_a over the fit window
/// [t_max - 5, t_max]; equals the decay exponent gamma(a) of V_a.
/// Requires t_max >= 15.
double tail_exponent(const RadialProfile& p);

struct MonotoneReport {
    double max_step_increase = 0; // max over steps of H(t_{j+1}) - H(t_j)
    int from = 0, to = 0;         // tested index range (xi' >= 0)
};
/// H(xi, xi') = e^{(2k-n) xi} (1 - xi'^2)^k over the range where xi' >= 0
MonotoneReport check_H_monotone(const RadialProfile& p, int k);

struct TwoSidedReport {
    double ratio = 0; // r2^{n-2} u(r2) / (r1^{n-2} u(r1))
    double bound = 0; // 2^{(n-2)k/(2k-n)}
    bool ok = false;  // 1 - tol <= ratio <= bound + tol with tol = 1e-8
};
/// Lemma-A.2-type two-sided bound; requires k > n/2 and
/// r^{(n-2)/2} u non-increasing (xi' >= 0) on [r1, r2], verified numerically.
TwoSidedReport check_two_sided_bound(const RadialProfile& p, double r1, double r2, int k);

/// u-hat(r) = (|dB_r|^{-1} int_{dB_r} u^{-2/(n-2)})^{-(n-2)/2} by surface
/// quadrature around the given center; one value per requested radius.
std::vector<double> spherical_average(const GridField& u, const std::vector<double>& center,
                                      const std::vector<double>& radii, int level = 16);

} // namespace sigmak
