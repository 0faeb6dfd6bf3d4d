#include <cstdio>
#include <fstream>
#include <memory>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sigmak/conformal.hpp"
#include "sigmak/degree.hpp"
#include "sigmak/fieldio.hpp"
#include "sigmak/identities.hpp"
#include "sigmak/radial.hpp"
#include "sigmak/reduction.hpp"
#include "sigmak/symmetric.hpp"

using nlohmann::json;
using namespace sigmak;

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitConvergence = 3;

void emit(const json& report, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << report.dump(2) << "\n";
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << report.dump(2) << "\n";
}

void check_dim(int n) {
    if (n < 3 || n > 10) throw std::invalid_argument("n must be in 3..10");
}

// K(theta) from an expression in x_{n+1} or a CSV file of "theta,value" rows
AxisymK load_axisym_K(const std::string& spec, int n) {
    if (spec.size() > 4 && spec.substr(spec.size() - 4) == ".csv") {
        std::ifstream in(spec);
        if (!in) throw std::invalid_argument("cannot read K profile " + spec);
        std::vector<double> th, kv;
        double a, b;
        char comma;
        while (in >> a >> comma >> b) {
            th.push_back(a);
            kv.push_back(b);
        }
        return AxisymK::from_samples(th, kv);
    }
    Poly p = parse_poly(spec, n + 1);
    // axisymmetry: only x_{n+1} may appear
    for (int i = 0; i < n; ++i)
        if (!p.deriv(i).empty())
            throw std::invalid_argument("axisymmetric K may only use x" + std::to_string(n + 1));
    // rewrite in the single variable c = cos(theta)
    Poly pc(1);
    Poly xc = Poly::var(n + 1, n);
    // evaluate exponent by exponent: p = sum c_j x_{n+1}^j
    for (int j = 0; j <= 64; ++j) {
        Poly dj = p;
        for (int d = 0; d < j; ++d) dj = dj.deriv(n);
        if (dj.empty()) break;
        std::vector<double> zero(n + 1, 0.0);
        double cj = dj.eval(zero.data());
        for (int d = 2; d <= j; ++d) cj /= d;
        if (cj != 0.0) pc.add_term({j}, cj);
    }
    return AxisymK::from_poly(pc);
}

json selftest_result(const std::string& name, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name.c_str());
    return json{{"name", name}, {"pass", ok}};
}

ScalarFn poly_psi(int n, std::uint64_t seed) {
    auto rng = std::make_shared<Rng>(seed);
    auto coeffs = std::make_shared<std::vector<double>>();
    for (int i = 0; i < n * (n + 3); ++i) coeffs->push_back(rng->uniform(-0.3, 0.3));
    return [n, coeffs](const double* x) {
        double s = 0;
        size_t c = 0;
        for (int i = 0; i < n; ++i) {
            s += (*coeffs)[c++] * x[i];
            for (int j = i; j < n; ++j) s += (*coeffs)[c++] * x[i] * x[j];
        }
        // a quartic touch keeps the fourth-order stencils honest
        double r2 = 0;
        for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
        return s + 0.1 * r2 * r2;
    };
}

int run_identities(const std::string& check, int n, int k, double width, int baseN, int refine,
                   double p, double q, double delta, std::uint64_t seed, const std::string& psi_kind,
                   bool selftest, const std::string& out) {
    if (selftest) {
        json rep = json::array();
        bool all = true;
        {
            AnalyticField psi(BoxGrid::centered_cube(3, 0.5, 9), [](const double*) { return 0.7; });
            double r = check_divergence_residual(view(psi), 1);
            bool ok = r < 1e-12;
            all &= ok;
            rep.push_back(selftest_result("divergence: constant psi gives zero residual", ok));
        }
        {
            AnalyticField psi(BoxGrid::centered_cube(3, 0.5, 9), [](const double* x) {
                return 0.2 * x[0] + 0.1 * x[1] * x[2];
            });
            double r0 = check_weighted_divergence_residual(view(psi), 1, 0.0, 0.0);
            double r1 = check_divergence_residual(view(psi), 1);
            // scalar contraction of the tensor identity: p=q=0 must not be worse
            bool ok = r0 <= 4.0 * r1 + 1e-12;
            all &= ok;
            rep.push_back(selftest_result("weighted p=q=0 consistent with divergence", ok));
        }
        {
            SmoothFn Kc{[](const double*) { return 2.0; },
                        [](const double* , double* g) { g[0] = g[1] = g[2] = 0.0; }};
            AnalyticField u(BoxGrid::centered_cube(3, 1.0, 17),
                            [](const double* x) { return bubble(x, (const double[3]){0, 0, 0}, 1.0, 3); });
            auto kw = kazdan_warner(view(u), Kc, 0.9, 1.0); // constant K: tail is irrelevant
            bool ok = std::fabs(kw[0]) + std::fabs(kw[1]) + std::fabs(kw[2]) == 0.0;
            all &= ok;
            rep.push_back(selftest_result("kazdan_warner: constant K integrates to zero", ok));
        }
        emit(json{{"schema_version", 1}, {"subcommand", "identities"}, {"selftest", rep}}, out);
        return all ? 0 : 1;
    }

    check_dim(n);
    if (k < 1 || k > n / 2)
        throw std::invalid_argument("identity paths require 1 <= k <= n/2");
    ScalarFn psi;
    if (psi_kind == "bubble") {
        psi = [n](const double* x) {
            double r2 = 0;
            for (int i = 0; i < n; ++i) r2 += x[i] * x[i];
            return std::log(1.0 + r2);
        };
    } else if (psi_kind == "poly") {
        psi = poly_psi(n, seed);
    } else {
        throw std::invalid_argument("--psi must be bubble or poly");
    }
    int levels = refine + 1;
    IdentityReport r;
    if (check == "divergence") {
        r = divergence_study(n, psi, k, width, baseN, levels, 20000);
    } else if (check == "weighted") {
        r = weighted_study(n, psi, k, p, q, width, baseN, levels, 20000);
    } else if (check == "summed") {
        r = summed_study(n, psi, k, q, n - k + 1.0, k + 1.0 + delta, width, baseN, levels, 20000);
    } else {
        throw std::invalid_argument("--check must be divergence, weighted or summed");
    }
    json rep{{"schema_version", 1},
             {"subcommand", "identities"},
             {"identity", r.id},
             {"h", r.hs},
             {"residual", r.residuals},
             {"order", r.orders},
             {"final_order", r.orders.empty() ? json() : json(r.final_order())},
             {"order_target", 3.5},
             {"pass", !r.orders.empty() && r.final_order() >= 3.5}};
    if (check == "summed") {
        rep["delta"] = delta;
        rep["specialization_coeffs"] = summed_specialization_coeffs(n, k, delta);
    }
    emit(rep, out);
    return rep["pass"].is_boolean() && !rep["pass"].get<bool>() ? 1 : 0;
}

int run_radial(double a, int n, double tmax, int k, bool selftest, const std::string& csv,
               const std::string& out) {
    if (selftest) {
        bool ok1 = false, ok2 = false;
        {
            // constant xi: sigma_l = 2^{1-l} C(n-1,l-1) e^{2la} (n-2l)/(2l)
            double got = sigma_cylindrical(0.3, 0.0, 0.0, 1, 4);
            double want = std::exp(0.6) * (4.0 - 2.0) / 2.0;
            ok1 = std::fabs(got - want) < 1e-12;
        }
        {
            TwoSidedReport dummy;
            dummy.bound = std::pow(2.0, (4.0 - 2.0) * 3.0 / (2.0 * 3.0 - 4.0));
            ok2 = std::fabs(dummy.bound - 8.0) < 1e-14;
        }
        selftest_result("sigma_cylindrical: constant profile", ok1);
        selftest_result("two-sided bound constant 8 at n=4,k=3", ok2);
        emit(json{{"schema_version", 1}, {"subcommand", "radial"}, {"selftest", ok1 && ok2}}, out);
        return ok1 && ok2 ? 0 : 1;
    }
    check_dim(n);
    if (n % 2 != 0) throw std::invalid_argument("radial V_a requires even n");
    if (k <= 0) k = n / 2;
    RadialProfile prof = integrate_Va(a, n, tmax);
    if (!csv.empty()) {
        std::ofstream f(csv);
        if (!f) throw std::runtime_error("cannot write " + csv);
        f << "t,xi,xip,E,H\n";
        for (size_t j = 0; j < prof.t.size(); ++j) {
            double H = std::exp((2.0 * k - n) * prof.xi[j]) *
                       std::pow(1.0 - prof.xip[j] * prof.xip[j], (double)k);
            f << format_double(prof.t[j]) << "," << format_double(prof.xi[j]) << ","
              << format_double(prof.xip[j]) << "," << format_double(conserved_E(prof, (int)j))
              << "," << format_double(H) << "\n";
        }
    }
    json rep{{"schema_version", 1},
             {"subcommand", "radial"},
             {"a", a},
             {"n", n},
             {"t_max", tmax},
             {"conservation_drift", conservation_drift(prof)},
             {"h_of_a", h_of_a(a, n)},
             {"gamma_formula", gamma_of_a(a, n)}};
    if (tmax >= 15.0) {
        double g = tail_exponent(prof);
        rep["gamma_fit"] = g;
        rep["gamma_rel_error"] = std::fabs(g - gamma_of_a(a, n)) / gamma_of_a(a, n);
    }
    emit(rep, out);
    return 0;
}

int run_degree(const std::string& kexpr, int n, std::vector<double> svals, bool selftest,
               const std::string& out) {
    if (selftest) {
        bool ok1, ok2, ok3;
        {
            VecMap id = [](const std::vector<double>& x) { return x; };
            ok1 = brouwer_degree(id, 4, 0.7).degree == 1;
        }
        {
            VecMap neg = [](const std::vector<double>& x) {
                auto y = x;
                for (double& v : y) v = -v;
                return y;
            };
            ok2 = brouwer_degree(neg, 5, 0.7).degree == -1;
        }
        {
            ok3 = false;
            try {
                find_critical_points(KFunction::parse("2", 3));
            } catch (const NondegeneracyViolation&) {
                ok3 = true;
            }
        }
        selftest_result("brouwer: identity map has degree 1", ok1);
        selftest_result("brouwer: antipodal map on R^5 has degree -1", ok2);
        selftest_result("constant K raises NondegeneracyViolation", ok3);
        emit(json{{"schema_version", 1}, {"subcommand", "degree"}, {"selftest", ok1 && ok2 && ok3}},
             out);
        return ok1 && ok2 && ok3 ? 0 : 1;
    }
    check_dim(n);
    KFunction K = KFunction::parse(kexpr, n);
    if (svals.empty()) svals = {0.5, 0.7, 0.9};
    DegreeAnalysis an = analyze_K(K, svals);
    json recs = json::array();
    for (const auto& r : an.records)
        recs.push_back(json{{"x", r.x},
                            {"grad_norm", r.grad_norm},
                            {"laplacian", r.laplacian},
                            {"hessian_spectrum", r.hess_spectrum},
                            {"morse_index", r.morse_index},
                            {"class", r.minus_class ? "minus" : "plus"},
                            {"hessian_degenerate", r.hess_degenerate}});
    json degs = json::object();
    for (auto& [s, d] : an.degG_by_s) degs[format_double(s)] = d;
    int sign_n = n % 2 == 0 ? 1 : -1;
    json rep{{"schema_version", 1},
             {"subcommand", "degree"},
             {"K", kexpr},
             {"n", n},
             {"records", recs},
             {"deg_crit_minus", an.deg_minus},
             {"deg_G_by_s", degs},
             {"s_scan_consistent", an.s_scan_consistent},
             {"morse", an.morse},
             {"euler_sum", an.morse ? json(an.euler_sum) : json()},
             {"criterion", an.criterion ? "deg != (-1)^n: existence criterion holds"
                                        : std::string("criterion fails: deg = (-1)^n = ") +
                                              std::to_string(sign_n)}};
    emit(rep, out);
    return 0;
}

int run_reduce(const std::string& kexpr, double xi, double mu, int n, int k, int N, bool selftest,
               const std::string& out) {
    if (selftest) {
        bool ok1, ok2, ok3;
        {
            SphereAxisymField one(4, 64, [](double) { return 1.0; });
            auto F = residual_field(one, AxisymK::constant(7.0), 0.0, 2);
            double r = 0;
            for (double f : F) r = std::max(r, std::fabs(f));
            ok1 = r < 1e-14;
        }
        {
            std::vector<double> f(65);
            for (int j = 0; j <= 64; ++j) f[j] = 1.0;
            auto Pf = project_Pi(f, 4, 64);
            double diff = 0;
            for (int j = 0; j <= 64; ++j) diff = std::max(diff, std::fabs(Pf[j] - 1.0));
            ok2 = diff < 1e-13;
        }
        {
            SphereAxisymField w(4, 64, [](double th) { return 1.0 + 0.1 * std::cos(2 * th); });
            auto same = pi_parametrize(w, 0.0);
            double diff = 0;
            for (int j = 0; j <= 64; ++j) diff = std::max(diff, std::fabs(same[j] - w[j]));
            ok3 = diff == 0.0;
        }
        selftest_result("residual: v=1, mu=0 vanishes", ok1);
        selftest_result("Pi fixes constants", ok2);
        selftest_result("pi(w, 0) = w", ok3);
        emit(json{{"schema_version", 1}, {"subcommand", "reduce"}, {"selftest", ok1 && ok2 && ok3}},
             out);
        return ok1 && ok2 && ok3 ? 0 : 1;
    }
    check_dim(n);
    if (2 * k < n || k > n) throw std::invalid_argument("solver paths require n/2 <= k <= n");
    HomotopyConfig cfg;
    cfg.n = n;
    cfg.k = k;
    cfg.N = N;
    AxisymK K = load_axisym_K(kexpr, n);
    ReducedSolution sol = solve_reduced(K, xi, mu, cfg);
    double wdev = 0;
    for (int j = 0; j <= N; ++j) wdev = std::max(wdev, std::fabs(sol.w[j] - 1.0));
    json rep{{"schema_version", 1},
             {"subcommand", "reduce"},
             {"xi", xi},
             {"mu", mu},
             {"Lambda", sol.Lambda},
             {"proj_residual", sol.proj_residual},
             {"center_mass", sol.center_mass},
             {"w_minus_1_sup", wdev},
             {"newton_steps", sol.newton_steps}};
    emit(rep, out);
    return 0;
}

int run_solve(const std::string& kexpr, int n, int k, int N, double tol, bool skip_criterion,
              bool selftest, const std::string& field_out, const std::string& out) {
    if (selftest) {
        HomotopyConfig cfg;
        cfg.n = 4;
        cfg.k = 2;
        cfg.N = 64;
        auto res = solve_homotopy(AxisymK::constant(round_sigma_k(4, 2)), cfg);
        bool ok = res.residual <= cfg.tol && res.trace.size() <= 2;
        selftest_result("round-curvature K solves to v = 1 in one step", ok);
        emit(json{{"schema_version", 1}, {"subcommand", "solve"}, {"selftest", ok}}, out);
        return ok ? 0 : 1;
    }
    check_dim(n);
    if (2 * k < n || k > n) throw std::invalid_argument("solver paths require n/2 <= k <= n");
    HomotopyConfig cfg;
    cfg.n = n;
    cfg.k = k;
    cfg.N = N;
    cfg.tol = tol;
    AxisymK K = load_axisym_K(kexpr, n);

    json criterion = json();
    if (!skip_criterion && kexpr.find(".csv") == std::string::npos) {
        KFunction Kf = KFunction::parse(kexpr, n);
        auto records = find_critical_points(Kf);
        int dm = deg_crit_minus(records);
        bool crit = existence_criterion(dm, n);
        criterion = json{{"deg_crit_minus", dm}, {"holds", crit}};
        if (!crit)
            throw PreconditionError("solve: existence criterion fails (deg = (-1)^n); "
                                    "pass --skip-criterion to attempt anyway");
    }

    HomotopyResult res = solve_homotopy(K, cfg);
    json trace = json::array();
    for (const auto& st : res.trace)
        trace.push_back(json{{"mu", st.mu},
                             {"residual", st.residual_norm},
                             {"cone_margin", st.cone_margin},
                             {"newton_steps", st.newton_steps}});
    json rep{{"schema_version", 1},
             {"subcommand", "solve"},
             {"K", kexpr},
             {"n", n},
             {"k", k},
             {"N", N},
             {"tol", tol},
             {"criterion", criterion},
             {"xi0", res.xi},
             {"trace", trace},
             {"residual", res.residual},
             {"cone_margin", res.margin},
             {"kazdan_warner", res.kw_norm}};
    if (!field_out.empty()) {
        save_axisym(res.v, field_out);
        rep["field"] = field_out;
    }
    emit(rep, out);
    return 0;
}

int run_moments(const std::string& qexpr, double d, double lam, int n, double r0, bool selftest,
                const std::string& out) {
    if (selftest) {
        // odd moment of the bubble: q(y) = y_1, d = 1
        double v = moment_limit([](const double* y) { return y[0]; }, 1.0, 4.0, 4, 30.0);
        bool ok = std::fabs(v) < 1e-12;
        selftest_result("odd first moment vanishes", ok);
        emit(json{{"schema_version", 1}, {"subcommand", "moments"}, {"selftest", ok}}, out);
        return ok ? 0 : 1;
    }
    check_dim(n);
    Poly q = parse_poly(qexpr, n);
    double v = moment_limit([&q](const double* y) { return q.eval(y); }, d, lam, n, r0);
    emit(json{{"schema_version", 1},
              {"subcommand", "moments"},
              {"q", qexpr},
              {"degree", d},
              {"lam", lam},
              {"r0", r0},
              {"value", v}},
         out);
    return 0;
}

int run_energy(int n, double lam, double r_in, double r_out, int gridN, bool selftest,
               const std::string& out) {
    if (selftest) {
        AnalyticField u(BoxGrid::centered_cube(3, 1.0, 17), [](const double*) { return 1e-3; });
        auto rep = delta_energy_profile(view(u), 0.0, 1.0);
        bool ok = rep.T <= 1e-3 && rep.energy < 1e-8;
        selftest_result("constant epsilon field has vanishing T and energy", ok);
        emit(json{{"schema_version", 1}, {"subcommand", "energy"}, {"selftest", ok}}, out);
        return ok ? 0 : 1;
    }
    check_dim(n);
    double w = r_out * 1.05;
    AnalyticField u(BoxGrid::centered_cube(n, w, gridN), [n, lam](const double* x) {
        std::vector<double> zero(n, 0.0);
        return bubble(x, zero.data(), lam, n);
    });
    auto rep = delta_energy_profile(view(u), r_in, r_out);
    emit(json{{"schema_version", 1},
              {"subcommand", "energy"},
              {"n", n},
              {"lam", lam},
              {"r_in", r_in},
              {"r_out", r_out},
              {"T", rep.T},
              {"energy", rep.energy},
              {"bound_4_pow", std::pow(4.0, 0.5 * (n - 2))}},
         out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sigma_k-curvature toolkit: cone algebra, conformal identities, radial profiles, "
                 "degree counts and the axisymmetric homotopy solver"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out;
    app.add_option("--out", out, "report path ('-' = stdout)");

    // identities
    auto* cid = app.add_subcommand("identities", "divergence-identity residuals under refinement");
    std::string check = "divergence", psi_kind = "bubble";
    int id_n = 4, id_k = 2, id_baseN = 13, id_refine = 2;
    double id_width = 0.5, id_p = 2, id_q = 1, id_delta = 0.05;
    std::uint64_t id_seed = 1;
    bool id_selftest = false;
    cid->add_option("--check", check, "divergence | weighted | summed");
    cid->add_option("--n", id_n);
    cid->add_option("--k", id_k, "tensor index (l for divergence checks)");
    cid->add_option("--width", id_width, "half-width of the box");
    cid->add_option("--baseN", id_baseN, "nodes per axis at the coarsest level");
    cid->add_option("--refine", id_refine, "number of h -> h/2 refinements");
    cid->add_option("--p", id_p);
    cid->add_option("--q", id_q);
    cid->add_option("--delta", id_delta);
    cid->add_option("--seed", id_seed);
    cid->add_option("--psi", psi_kind, "bubble | poly");
    cid->add_flag("--selftest", id_selftest);

    // radial
    auto* crad = app.add_subcommand("radial", "V_a profile: conservation and tail exponent");
    double ra = 0.0, rtmax = 20.0;
    int rn = 4, rk = 0;
    bool r_selftest = false;
    std::string rcsv;
    crad->add_option("--a", ra);
    crad->add_option("--n", rn);
    crad->add_option("--tmax", rtmax);
    crad->add_option("--k", rk, "exponent index for the H column (default n/2)");
    crad->add_option("--csv", rcsv, "write (t, xi, xi', E, H) rows");
    crad->add_flag("--selftest", r_selftest);

    // degree
    auto* cdeg = app.add_subcommand("degree", "critical points and degree counts of K");
    std::string dK = "2 + x5";
    int dn = 4;
    std::vector<double> ds;
    bool d_selftest = false;
    cdeg->add_option("--K", dK, "polynomial in x1..x_{n+1}");
    cdeg->add_option("--n", dn);
    cdeg->add_option("--s", ds, "radii for the deg(G, B_s, 0) scan");
    cdeg->add_flag("--selftest", d_selftest);

    // reduce
    auto* cred = app.add_subcommand("reduce", "reduced-map solve at fixed (xi, mu)");
    std::string redK = "1.5";
    double rxi = 0.0, rmu = 0.05;
    int red_n = 4, red_k = 2, red_N = 256;
    bool red_selftest = false;
    cred->add_option("--K", redK);
    cred->add_option("--xi", rxi);
    cred->add_option("--mu", rmu);
    cred->add_option("--n", red_n);
    cred->add_option("--k", red_k);
    cred->add_option("--N", red_N);
    cred->add_flag("--selftest", red_selftest);

    // solve
    auto* csol = app.add_subcommand("solve", "homotopy solver for the axisymmetric equation");
    std::string sK = "1.5 + 0.1*x5^2";
    int sn = 4, sk = 2, sN = 256;
    double stol = 1e-8;
    bool s_selftest = false, s_skip = false;
    std::string sfield;
    csol->add_option("--K", sK, "polynomial in x_{n+1} or a theta,K CSV file");
    csol->add_option("--n", sn);
    csol->add_option("--k", sk);
    csol->add_option("--N", sN);
    csol->add_option("--tol", stol);
    csol->add_option("--field-out", sfield, "base path for the solution field (json + csv)");
    csol->add_flag("--skip-criterion", s_skip);
    csol->add_flag("--selftest", s_selftest);

    // moments
    auto* cmom = app.add_subcommand("moments", "bubble-family moment limits");
    std::string mq = "1";
    double md = 0.0, mlam = 1.0, mr0 = 50.0;
    int mn = 4;
    bool m_selftest = false;
    cmom->add_option("--q", mq, "homogeneous polynomial in y1..yn");
    cmom->add_option("--d", md, "homogeneity degree");
    cmom->add_option("--lam", mlam);
    cmom->add_option("--n", mn);
    cmom->add_option("--r0", mr0);
    cmom->add_flag("--selftest", m_selftest);

    // energy
    auto* cen = app.add_subcommand("energy", "small-energy profile of bubble restrictions");
    int en = 4, egrid = 41;
    double elam = 1.0, erin = 0.0, erout = 1.0;
    bool e_selftest = false;
    cen->add_option("--n", en);
    cen->add_option("--lam", elam);
    cen->add_option("--r-in", erin);
    cen->add_option("--r-out", erout);
    cen->add_option("--gridN", egrid);
    cen->add_flag("--selftest", e_selftest);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cid->parsed())
            return run_identities(check, id_n, id_k, id_width, id_baseN, id_refine, id_p, id_q,
                                  id_delta, id_seed, psi_kind, id_selftest, out);
        if (crad->parsed()) return run_radial(ra, rn, rtmax, rk, r_selftest, rcsv, out);
        if (cdeg->parsed()) return run_degree(dK, dn, ds, d_selftest, out);
        if (cred->parsed())
            return run_reduce(redK, rxi, rmu, red_n, red_k, red_N, red_selftest, out);
        if (csol->parsed())
            return run_solve(sK, sn, sk, sN, stol, s_skip, s_selftest, sfield, out);
        if (cmom->parsed()) return run_moments(mq, md, mlam, mn, mr0, m_selftest, out);
        if (cen->parsed()) return run_energy(en, elam, erin, erout, egrid, e_selftest, out);
    } catch (const PreconditionError& e) {
        std::cerr << json{{"error", "precondition"}, {"message", e.what()}}.dump() << "\n";
        return kExitPrecondition;
    } catch (const std::domain_error& e) {
        std::cerr << json{{"error", "domain"}, {"message", e.what()}}.dump() << "\n";
        return kExitPrecondition;
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"error", "invalid_argument"}, {"message", e.what()}}.dump() << "\n";
        return kExitPrecondition;
    } catch (const ConvergenceError& e) {
        std::cerr << json{{"error", "convergence"}, {"message", e.what()}}.dump() << "\n";
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
