#include "sigmak/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "sigmak/identities.hpp"

namespace sigmak {

double round_sigma_k(int n, int k) { return std::pow(2.0, -k) * binomial(n, k); }

std::vector<double> residual_field(const SphereAxisymField& v, const AxisymK& K, double mu, int k) {
    const int N = v.N();
    const int n = v.n();
    const double c0 = round_sigma_k(n, k);
    std::vector<double> F(N + 1);
    std::string offenders;
    int bad = 0;
    for (int j = 0; j <= N; ++j) {
        Spectrum lam = schouten_sphere_axisym(v, j);
        if (!in_gamma_k(lam, k, 0.0)) {
            if (bad < 8) offenders += " " + std::to_string(j);
            ++bad;
            continue;
        }
        F[j] = sigma(lam, k) - (mu * K.K(v.theta(j)) + (1.0 - mu) * c0);
    }
    if (bad > 0)
        throw ConeError("residual_field: lambda(A_{g_v}) leaves Gamma_" + std::to_string(k) +
                        " at " + std::to_string(bad) + " nodes:" + offenders);
    return F;
}

double cone_margin(const SphereAxisymField& v, int k) {
    double margin = 1e300;
    for (int j = 0; j <= v.N(); ++j) {
        auto e = sigma_all(schouten_sphere_axisym(v, j));
        for (int l = 1; l <= k; ++l) {
            double m = e[l] >= 0 ? std::pow(e[l], 1.0 / l) : -std::pow(-e[l], 1.0 / l);
            margin = std::min(margin, m);
        }
    }
    return margin;
}

namespace {

inline int fold(int j, int N) {
    if (j < 0) j = -j;
    if (j > N) j = 2 * N - j;
    return j;
}

} // namespace

std::vector<double> linearize_sigma(const SphereAxisymField& v, int k) {
    const int N = v.N();
    const int n = v.n();
    const int dim = N + 1;
    const double h = v.h();
    const double a2 = 2.0 / (n - 2.0);
    const double a3 = 2.0 * (n - 1.0) / ((n - 2.0) * (n - 2.0));
    const double a4 = 2.0 / ((n - 2.0) * (n - 2.0));
    const double c4 = 4.0 / (n - 2.0);
    static const int off1[4] = {-2, -1, 1, 2};
    static const double cw1[4] = {1.0, -8.0, 8.0, -1.0};
    static const int off2[5] = {-2, -1, 0, 1, 2};
    static const double cw2[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};

    std::vector<double> J(dim * dim, 0.0);
    for (int i = 0; i <= N; ++i) {
        const double vv = v[i];
        const double vp = v.d1(i), vpp = v.d2(i);
        const bool pole = (i == 0 || i == N);
        const double s = std::pow(vv, -c4);
        const double sp = -c4 * s / vv;
        double Btheta, Btan, dLth_v, dLth_vp, dLth_vpp, dLt_v, dLt_vp, dLt_vpp;
        double lam_theta, lam_tan;
        if (pole) {
            Btheta = 0.5 - a2 * vpp / vv;
            Btan = Btheta;
            lam_theta = lam_tan = s * Btheta;
            dLth_v = sp * Btheta + s * (a2 * vpp / (vv * vv));
            dLth_vp = 0.0;
            dLth_vpp = -s * a2 / vv;
            dLt_v = dLth_v;
            dLt_vp = 0.0;
            dLt_vpp = dLth_vpp;
        } else {
            const double cot = 1.0 / std::tan(v.theta(i));
            const double q = vp / vv;
            Btheta = 0.5 - a2 * vpp / vv + a3 * q * q;
            Btan = 0.5 - a2 * cot * q - a4 * q * q;
            lam_theta = s * Btheta;
            lam_tan = s * Btan;
            dLth_v = sp * Btheta + s * (a2 * vpp / (vv * vv) - 2.0 * a3 * vp * vp / (vv * vv * vv));
            dLth_vp = s * (2.0 * a3 * vp / (vv * vv));
            dLth_vpp = -s * a2 / vv;
            dLt_v = sp * Btan + s * (a2 * cot * vp / (vv * vv) + 2.0 * a4 * vp * vp / (vv * vv * vv));
            dLt_vp = s * (-a2 * cot / vv - 2.0 * a4 * vp / (vv * vv));
            dLt_vpp = 0.0;
        }
        // d sigma_k / d lambda via the Newton tensor of the diagonal matrix
        SymMat A(n);
        A.set(0, 0, lam_theta);
        for (int m = 1; m < n; ++m) A.set(m, m, lam_tan);
        SymMat T = dsigma_dA(A, k);
        const double Dth = T(0, 0);
        double Dtan = 0;
        for (int m = 1; m < n; ++m) Dtan += T(m, m);

        const double g_v = Dth * dLth_v + Dtan * dLt_v;     // direct value dependence
        const double g_vp = Dth * dLth_vp + Dtan * dLt_vp;  // through v'
        const double g_vpp = Dth * dLth_vpp + Dtan * dLt_vpp;

        J[i * dim + i] += g_v;
        for (int a = 0; a < 4; ++a)
            J[i * dim + fold(i + off1[a], N)] += g_vp * cw1[a] / (12.0 * h);
        for (int a = 0; a < 5; ++a)
            J[i * dim + fold(i + off2[a], N)] += g_vpp * cw2[a] / (12.0 * h * h);
    }
    return J;
}

std::vector<double> project_Pi(const std::vector<double>& f, int n, int N) {
    if ((int)f.size() != N + 1) throw std::invalid_argument("project_Pi: size mismatch");
    auto w = axisym_quad_weights(n, N);
    double fc = 0, cc = 0;
    for (int j = 0; j <= N; ++j) {
        double c = std::cos(M_PI * j / N);
        fc += w[j] * f[j] * c;
        cc += w[j] * c * c;
    }
    std::vector<double> out(f);
    for (int j = 0; j <= N; ++j) out[j] -= std::cos(M_PI * j / N) * fc / cc;
    return out;
}

SphereAxisymField pi_parametrize(const SphereAxisymField& w, double xi) {
    if (std::fabs(xi) >= 1.0) throw std::domain_error("pi_parametrize: need |xi| < 1");
    if (xi == 0.0) return w;
    const double t = 1.0 / (1.0 - std::fabs(xi));
    // T_{phi_{P,t}^{-1}} = T_{phi_{-P,t}}
    return mobius_pullback_axisym(w, t, xi > 0 ? -1 : 1);
}

std::vector<double> mobius_matrix(int n, int N, double t, int pole) {
    const int dim = N + 1;
    std::vector<double> T(dim * dim, 0.0);
    // columns: image of each nodal basis vector (the map is linear)
    for (int c = 0; c <= N; ++c) {
        std::vector<double> e(dim, 0.0);
        e[c] = 1.0;
        SphereAxisymField ec(n, N, std::move(e));
        SphereAxisymField img = mobius_pullback_axisym(ec, t, pole);
        for (int r = 0; r <= N; ++r) T[r * dim + c] = img[r];
    }
    return T;
}

std::vector<double> pi_matrix(int n, int N, double xi) {
    if (std::fabs(xi) >= 1.0) throw std::domain_error("pi_matrix: need |xi| < 1");
    if (xi == 0.0) {
        std::vector<double> T((N + 1) * (N + 1), 0.0);
        for (int j = 0; j <= N; ++j) T[j * (N + 2)] = 1.0;
        return T;
    }
    return mobius_matrix(n, N, 1.0 / (1.0 - std::fabs(xi)), xi > 0 ? -1 : 1);
}

namespace {

double sup_norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s = std::max(s, std::fabs(x));
    return s;
}

} // namespace

ReducedSolution solve_reduced(const AxisymK& K, double xi, double mu, const HomotopyConfig& cfg) {
    const int n = cfg.n, k = cfg.k, N = cfg.N;
    const int dim = N + 1;
    auto wq = axisym_quad_weights(n, N);
    std::vector<double> costh(dim);
    for (int j = 0; j <= N; ++j) costh[j] = std::cos(M_PI * j / N);
    double cc = 0;
    for (int j = 0; j <= N; ++j) cc += wq[j] * costh[j] * costh[j];
    const double pexp = 2.0 * n / (n - 2.0);
    // S = matrix of w = T_{phi_{P,t}} v; identity at xi = 0
    std::vector<double> S;
    if (xi != 0.0) S = mobius_matrix(n, N, 1.0 / (1.0 - std::fabs(xi)), xi > 0 ? 1 : -1);

    auto w_of_v = [&](const std::vector<double>& v) {
        if (xi == 0.0) return v;
        std::vector<double> w(dim, 0.0);
        for (int r = 0; r < dim; ++r) {
            double s = 0;
            for (int c = 0; c < dim; ++c) s += S[r * dim + c] * v[c];
            w[r] = s;
        }
        return w;
    };
    auto center_of = [&](const std::vector<double>& w) {
        double s = 0;
        for (int j = 0; j <= N; ++j) s += wq[j] * costh[j] * std::pow(w[j], pexp);
        return s;
    };
    // R(v) = Pi F_mu[v] + (m(v)/cc) cos with m = center of mass of T_phi v
    auto residual = [&](const std::vector<double>& v, double* proj_norm, double* center_out) {
        SphereAxisymField vf(n, N, v);
        vf.require_positive("solve_reduced");
        auto F = residual_field(vf, K, mu, k);
        auto PF = project_Pi(F, n, N);
        double cm = center_of(w_of_v(v));
        double pn = 0;
        for (double x : PF) pn = std::max(pn, std::fabs(x));
        if (proj_norm) *proj_norm = pn;
        if (center_out) *center_out = cm;
        std::vector<double> R = PF;
        for (int j = 0; j <= N; ++j) R[j] += costh[j] * cm / cc;
        return R;
    };

    // start on the standard bubble pi(1, xi)
    SphereAxisymField one(n, N, std::vector<double>(dim, 1.0));
    std::vector<double> v = pi_parametrize(one, xi).values();
    double proj = 0, cm = 0;
    auto R = residual(v, &proj, &cm);
    double rn = sup_norm(R);
    int steps = 0;
    for (; steps < cfg.newton_max; ++steps) {
        if (proj <= cfg.reduced_tol && std::fabs(cm) <= 1e-9) break;
        SphereAxisymField vf(n, N, v);
        auto J = linearize_sigma(vf, k); // dF/dv, local stencils only
        // project rows of the output, then add the rank-one center term
        for (int c = 0; c < dim; ++c) {
            double fc = 0;
            for (int j = 0; j < dim; ++j) fc += wq[j] * J[j * dim + c] * costh[j];
            for (int j = 0; j < dim; ++j) J[j * dim + c] -= costh[j] * fc / cc;
        }
        auto w = w_of_v(v);
        for (int c = 0; c < dim; ++c) {
            double gc = 0;
            if (xi == 0.0) {
                gc = pexp * std::pow(w[c], pexp - 1.0) * wq[c] * costh[c] / cc;
            } else {
                for (int j = 0; j < dim; ++j)
                    gc += pexp * std::pow(w[j], pexp - 1.0) * wq[j] * costh[j] * S[j * dim + c] / cc;
            }
            for (int j = 0; j < dim; ++j) J[j * dim + c] += costh[j] * gc;
        }
        std::vector<double> delta = lu_solve(J, R, dim);
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            auto vt = v;
            for (int j = 0; j < dim; ++j) vt[j] -= alpha * delta[j];
            try {
                double p2, c2;
                auto Rt = residual(vt, &p2, &c2);
                double rt = sup_norm(Rt);
                if (rt < rn * (1.0 - 1e-4 * alpha) || rt < cfg.reduced_tol * 0.5) {
                    v = vt; R = Rt; rn = rt; proj = p2; cm = c2;
                    accepted = true;
                    break;
                }
            } catch (const PreconditionError&) {
                // cone exit or positivity loss: shorten the step
            }
            alpha *= 0.5;
        }
        if (!accepted) throw ConvergenceError("solve_reduced: Newton stalled (NoConvergence)");
    }
    if (proj > cfg.reduced_tol)
        throw ConvergenceError("solve_reduced: projected residual " + std::to_string(proj) +
                               " above tolerance (NoConvergence)");

    ReducedSolution sol{xi,
                        mu,
                        SphereAxisymField(n, N, w_of_v(v)),
                        SphereAxisymField(n, N, v),
                        {},
                        proj,
                        cm,
                        steps};
    // Lambda = -(n+1)/|S^n| int F x dv; axisymmetry kills the first n components
    auto F = residual_field(sol.v, K, mu, k);
    double fc = 0;
    for (int j = 0; j <= N; ++j) fc += wq[j] * F[j] * costh[j];
    sol.Lambda.assign(n + 1, 0.0);
    sol.Lambda[n] = -(n + 1.0) / sphere_area(n) * fc;
    return sol;
}

ConsistencyReport reduced_consistency(const AxisymK& K, double xi, double mu,
                                      const HomotopyConfig& cfg) {
    ReducedSolution sol = solve_reduced(K, xi, mu, cfg);
    const int n = cfg.n, N = cfg.N;
    auto wq = axisym_quad_weights(n, N);
    const double pexp = 2.0 * n / (n - 2.0);
    // At the solution sigma_k(lambda(A_{g_v})) = K_mu - Lambda . x holds for
    // v = pi(w, xi) itself, so the Kazdan-Warner identity gives the linear
    // system on the v-side with no Mobius composition:
    //   Lambda <grad x_i, grad x_j>-Gram(v) = mu int <grad K, grad x_i> v^p dv
    double gram = 0, rhs = 0;
    for (int j = 0; j <= N; ++j) {
        double th = sol.v.theta(j);
        double vp = std::pow(sol.v[j], pexp);
        double st = std::sin(th);
        gram += wq[j] * st * st * vp;
        rhs += wq[j] * (-K.dK(th) * st) * vp;
    }
    ConsistencyReport rep;
    rep.lambda_def = sol.Lambda[n];
    rep.lambda_kw = mu * rhs / gram;
    double denom = std::max(std::fabs(rep.lambda_def), std::fabs(rep.lambda_kw));
    rep.rel_gap = denom > 0 ? std::fabs(rep.lambda_def - rep.lambda_kw) / denom : 0.0;
    return rep;
}

namespace {

// damped Newton for the full system F_mu[v] = 0 on the theta grid
int full_newton(SphereAxisymField& v, const AxisymK& K, double mu, int k,
                const HomotopyConfig& cfg) {
    const int dim = cfg.N + 1;
    auto F = residual_field(v, K, mu, k);
    double rn = sup_norm(F);
    for (int it = 0; it < cfg.newton_max; ++it) {
        if (rn <= cfg.inner_tol) return it;
        auto J = linearize_sigma(v, k);
        std::vector<double> delta = lu_solve(J, F, dim);
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            SphereAxisymField vt = v;
            for (int j = 0; j < dim; ++j) vt[j] = v[j] - alpha * delta[j];
            try {
                vt.require_positive("solve_homotopy");
                auto Ft = residual_field(vt, K, mu, k);
                double rt = sup_norm(Ft);
                if (rt < rn * (1.0 - 1e-4 * alpha) || rt <= cfg.inner_tol) {
                    v = vt; F = Ft; rn = rt;
                    accepted = true;
                    break;
                }
            } catch (const PreconditionError&) {
                // cone guard: reject any step leaving Gamma_k
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (rn <= cfg.tol) return it; // good enough for acceptance, sharpening stalled
            throw ConvergenceError("solve_homotopy: Newton stalled at mu = " + std::to_string(mu));
        }
    }
    if (rn > cfg.tol)
        throw ConvergenceError("solve_homotopy: NoConvergence at mu = " + std::to_string(mu));
    return cfg.newton_max;
}

} // namespace

HomotopyResult solve_homotopy(const AxisymK& K, const HomotopyConfig& cfg) {
    const int n = cfg.n, k = cfg.k, N = cfg.N;

    // Stage 1: reduced bootstrap at mu_first; root of Lambda_{n+1} in xi.
    double mu0 = cfg.mu_first;
    auto lambda_at = [&](double xi) { return solve_reduced(K, xi, mu0, cfg).Lambda[n]; };
    double xi_star = 0.0;
    {
        const int M = 8;
        std::vector<double> xs, Ls;
        for (int i = 0; i <= M; ++i) {
            double xx = -cfg.xi_scan + 2.0 * cfg.xi_scan * i / M;
            xs.push_back(xx);
            Ls.push_back(lambda_at(xx));
        }
        int best = -1;
        for (int i = 0; i <= M; ++i)
            if (std::fabs(Ls[i]) < 1e-12) {
                best = i;
                break;
            }
        if (best >= 0) {
            xi_star = xs[best];
        } else {
            int bi = -1;
            double bw = 1e300;
            for (int i = 0; i + 1 <= M; ++i)
                if (Ls[i] * Ls[i + 1] < 0) {
                    double mid = std::fabs(0.5 * (xs[i] + xs[i + 1]));
                    if (mid < bw) {
                        bw = mid;
                        bi = i;
                    }
                }
            if (bi < 0)
                throw ConvergenceError(
                    "solve_homotopy: no zero of the reduced map Lambda on the scanned axis range");
            double lo = xs[bi], hi = xs[bi + 1], Flo = Ls[bi];
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                double Fm = lambda_at(mid);
                if (std::fabs(Fm) < 1e-12) {
                    lo = hi = mid;
                    break;
                }
                if (Flo * Fm < 0) {
                    hi = mid;
                } else {
                    lo = mid;
                    Flo = Fm;
                }
            }
            xi_star = 0.5 * (lo + hi);
        }
    }
    ReducedSolution red = solve_reduced(K, xi_star, mu0, cfg);
    SphereAxisymField v = red.v;

    HomotopyResult result{v, {}, xi_star, 0, 0, 0};
    double mu = mu0;
    int steps = full_newton(v, K, mu, k, cfg);
    auto record = [&](double m, int st) {
        auto F = residual_field(v, K, m, k);
        result.trace.push_back({m, sup_norm(F), cone_margin(v, k), st});
    };
    record(mu, steps);

    double dmu = cfg.mu_step_max;
    while (mu < 1.0) {
        // freebie: the current iterate may already solve the final equation
        // (exact for constant K, where F_mu does not depend on mu)
        try {
            auto F1 = residual_field(v, K, 1.0, k);
            if (sup_norm(F1) <= cfg.tol) {
                mu = 1.0;
                record(mu, 0);
                break;
            }
        } catch (const PreconditionError&) {
        }
        double next = std::min(1.0, mu + dmu);
        SphereAxisymField trial = v;
        try {
            int st = full_newton(trial, K, next, k, cfg);
            v = trial;
            mu = next;
            record(mu, st);
            dmu = std::min(cfg.mu_step_max, 2.0 * dmu);
        } catch (const std::runtime_error&) {
            dmu *= 0.5;
            if (dmu < cfg.mu_step_min)
                throw StepUnderflow("solve_homotopy: mu-step underflow below " +
                                    std::to_string(cfg.mu_step_min));
        }
    }
    result.v = v;
    result.residual = result.trace.back().residual_norm;
    result.margin = result.trace.back().cone_margin;
    result.kw_norm = std::fabs(kazdan_warner_axisym(v, K.dK));
    return result;
}

} // namespace sigmak
