#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "sigmak/conformal.hpp"
#include "sigmak/fieldio.hpp"
#include "sigmak/sphere.hpp"
#include "sigmak/symmetric.hpp"

using namespace sigmak;

namespace {

double max_abs(const SymMat& A) {
    double m = 0;
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j) m = std::max(m, std::fabs(A(i, j)));
    return m;
}

double max_abs_minus_cI(const SymMat& A, double c) {
    double m = 0;
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j)
            m = std::max(m, std::fabs(A(i, j) - (i == j ? c : 0.0)));
    return m;
}

} // namespace

TEST_CASE("schouten of the flat metric vanishes") {
    AnalyticField u(BoxGrid::centered_cube(4, 0.5, 13), [](const double*) { return 1.0; });
    int idx[4] = {6, 6, 6, 6};
    CHECK(max_abs(schouten_euclidean_at(u, idx)) == 0.0);
}

TEST_CASE("bubble curvature is 2I at every node") {
    const int n = 4;
    std::vector<double> zero(n, 0.0);
    // near the origin and around |z| ~ 0.7 where the log-factor derivatives peak
    for (double center : {0.0, 0.7}) {
        BoxGrid g = BoxGrid::centered_cube(n, 0.0125, 11);
        for (double& lo : g.lo) lo += center / std::sqrt((double)n);
        AnalyticField u(g, [&](const double* x) { return bubble(x, zero.data(), 1.0, n); });
        double worst = 0, worst_sig = 0;
        for_each_interior(g, 2, [&](const int* idx) {
            SymMat A = schouten_euclidean_at(u, idx);
            worst = std::max(worst, max_abs_minus_cI(A, 2.0));
            worst_sig = std::max(worst_sig,
                                 std::fabs(sigma_of_matrix(A, 2) - 4.0 * binomial(n, 2)));
        });
        CHECK(worst < 1e-8);
        CHECK(worst_sig < 1e-7);
    }
}

TEST_CASE("inverted flat factor |x|^{2-n} is flat, order >= 3.5") {
    const int n = 3;
    auto make = [&](int N) {
        BoxGrid g(n, {N, N, N}, {1.0, 1.0, 1.0}, 0.4 / (N - 1));
        return AnalyticField(g, [](const double* x) {
            double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
            return 1.0 / r; // r^{2-n}, n = 3
        });
    };
    double res[2];
    int Ns[2] = {9, 17};
    for (int lev = 0; lev < 2; ++lev) {
        AnalyticField u = make(Ns[lev]);
        double worst = 0;
        for_each_interior(u.grid(), 2, [&](const int* idx) {
            worst = std::max(worst, max_abs(schouten_euclidean_at(u, idx)));
        });
        res[lev] = worst;
    }
    CHECK(res[1] < res[0]);
    CHECK(std::log2(res[0] / res[1]) >= 3.5);
}

TEST_CASE("F[psi] closed forms and consistency with A^u") {
    const int n = 4;
    SUBCASE("constant psi") {
        AnalyticField psi(BoxGrid::centered_cube(n, 0.5, 9), [](const double*) { return 1.3; });
        int idx[4] = {4, 4, 4, 4};
        CHECK(max_abs(f_of_psi_at(psi, idx)) < 1e-12);
    }
    SUBCASE("bubble log gives 2(1+|z|^2)^{-2} I") {
        BoxGrid g = BoxGrid::centered_cube(n, 0.3, 17);
        AnalyticField psi(g, [](const double* x) {
            double r2 = 0;
            for (int d = 0; d < 4; ++d) r2 += x[d] * x[d];
            return std::log(1.0 + r2);
        });
        double worst = 0;
        for_each_interior(g, 2, [&](const int* idx) {
            double x[kMaxDim];
            g.point(idx, x);
            double r2 = 0;
            for (int d = 0; d < 4; ++d) r2 += x[d] * x[d];
            worst = std::max(worst,
                             max_abs_minus_cI(f_of_psi_at(psi, idx), 2.0 / ((1 + r2) * (1 + r2))));
        });
        CHECK(worst < 5e-5);
    }
    SUBCASE("e^{2psi} F[psi] = A^u under refinement, order >= 3.5") {
        auto uf = [](const double* x) {
            return 1.0 + 0.3 * std::exp(-(x[0] * x[0] + 0.5 * x[1] * x[2])) +
                   0.1 * std::sin(x[3]);
        };
        auto pf = [&](const double* x) { return -std::log(uf(x)); }; // -2/(n-2) ln u, n = 4
        double res[2];
        int Ns[2] = {9, 17};
        for (int lev = 0; lev < 2; ++lev) {
            BoxGrid g = BoxGrid::centered_cube(n, 0.4, Ns[lev]);
            AnalyticField u(g, uf), psi(g, pf);
            double worst = 0;
            for_each_interior(g, 2, [&](const int* idx) {
                SymMat F = f_of_psi_at(psi, idx);
                SymMat A = schouten_euclidean_at(u, idx);
                double e2p = std::exp(2.0 * psi.value(idx));
                F *= e2p;
                F -= A;
                worst = std::max(worst, max_abs(F));
            });
            res[lev] = worst;
        }
        CHECK(std::log2(res[0] / res[1]) >= 3.5);
    }
}

TEST_CASE("stereographic projection") {
    std::vector<double> south = stereo_to_sphere({0.0, 0.0, 0.0});
    CHECK(south[3] == doctest::Approx(-1.0));
    CHECK(south[0] == 0.0);

    std::vector<double> eq = stereo_to_sphere({1.0, 0.0, 0.0});
    CHECK(eq[3] == doctest::Approx(0.0));

    Rng rng(31);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> y(4);
        for (double& v : y) v = rng.uniform(-5, 5);
        auto x = stereo_to_sphere(y);
        double norm = 0;
        for (double v : x) norm += v * v;
        CHECK(std::fabs(norm - 1.0) < 1e-14);
        auto y2 = sphere_to_stereo(x);
        for (int i = 0; i < 4; ++i) CHECK(std::fabs(y2[i] - y[i]) < 1e-13 * (1 + std::fabs(y[i])));
    }
    CHECK_THROWS_AS(sphere_to_stereo({0.0, 0.0, 0.0, 1.0}), std::domain_error);
}

TEST_CASE("kelvin transform") {
    const int n = 4;
    SUBCASE("u = 1 maps to |x|^{2-n}") {
        BoxGrid src(n, {9, 9, 9, 9}, {0.1, 0.1, 0.1, 0.1}, 0.5);
        GridField u(src, [](const double*) { return 1.0; });
        BoxGrid tgt(n, {7, 7, 7, 7}, {0.3, 0.3, 0.3, 0.3}, 0.1);
        GridField ut = kelvin(u, 1.0, tgt);
        int idx[4] = {3, 2, 1, 4};
        double x[4];
        tgt.point(idx, x);
        double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
        CHECK(ut.value(idx) == doctest::Approx(std::pow(r2, -1.0)).epsilon(1e-13));
    }
    SUBCASE("|x|^{2-n} maps back to 1") {
        BoxGrid src(n, {45, 45, 45, 45}, {0.2, 0.2, 0.2, 0.2}, 0.0125);
        GridField u(src, [](const double* x) {
            double r2 = 0;
            for (int d = 0; d < 4; ++d) r2 += x[d] * x[d];
            return 1.0 / r2;
        });
        BoxGrid tgt(n, {6, 6, 6, 6}, {0.55, 0.55, 0.55, 0.55}, 0.03);
        GridField ut = kelvin(u, 1.0, tgt);
        for (double v : ut.values()) CHECK(v == doctest::Approx(1.0).epsilon(5e-4));
    }
    SUBCASE("involution on a bubble to interpolation error") {
        const int m = 3;
        BoxGrid src(m, {173, 173, 173}, {0.05, 0.05, 0.05}, 0.0125);
        std::vector<double> c(m, 0.0);
        GridField u(src, [&](const double* x) { return bubble(x, c.data(), 1.0, m); });
        BoxGrid mid(m, {121, 121, 121}, {0.4, 0.4, 0.4}, 0.005);
        GridField once = kelvin(u, 1.0, mid);
        BoxGrid back(m, {6, 6, 6}, {0.5, 0.5, 0.5}, 0.02);
        GridField twice = kelvin(once, 1.0, back);
        int idx[3];
        double x[3];
        double worst = 0;
        for (std::int64_t f = 0; f < back.size(); ++f) {
            back.unflat(f, idx);
            back.point(idx, x);
            worst = std::max(worst, std::fabs(twice.value(idx) - bubble(x, c.data(), 1.0, m)));
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("axisymmetric Schouten spectrum") {
    const int n = 4;
    SUBCASE("round sphere: all one half") {
        SphereAxisymField v(n, 64, [](double) { return 1.0; });
        for (int j : {0, 1, 17, 32, 63, 64}) {
            Spectrum lam = schouten_sphere_axisym(v, j);
            for (double l : lam) CHECK(l == doctest::Approx(0.5).epsilon(1e-14));
        }
    }
    SUBCASE("constant rescaling") {
        const double c = 1.7;
        SphereAxisymField v(n, 64, [&](double) { return c; });
        Spectrum lam = schouten_sphere_axisym(v, 20);
        double want = 0.5 * std::pow(c, -4.0 / (n - 2.0));
        for (double l : lam) CHECK(l == doctest::Approx(want).epsilon(1e-14));
    }
    SUBCASE("bubble pullback has constant spectrum matching the Euclidean route") {
        // v(theta) = ((1+r^2)/2)^{(n-2)/2} u(r), r = cot(theta/2): the lam = 2
        // bubble corresponds to lambda(A) = 2 everywhere
        const double lam_b = 2.0;
        std::vector<double> c(n, 0.0);
        auto vf = [&](double th) {
            if (th < 1e-12) return std::pow(2.0 * lam_b, -0.5 * (n - 2.0)); // r = infinity limit
            double r = 1.0 / std::tan(0.5 * th);
            double y[4] = {r, 0, 0, 0};
            return std::pow(0.5 * (1.0 + r * r), 0.5 * (n - 2.0)) * bubble(y, c.data(), lam_b, n);
        };
        SphereAxisymField v(n, 128, vf);
        double worst = 0;
        for (int j = 0; j <= 128; ++j) {
            Spectrum lam = schouten_sphere_axisym(v, j);
            for (double l : lam) worst = std::max(worst, std::fabs(l - 2.0));
        }
        CHECK(worst < 2e-5); // O(h^4) interior, O(h^3) near the poles
    }
}

TEST_CASE("mobius pullback") {
    const int n = 4;
    SUBCASE("t = 1 is the identity") {
        SphereAxisymField v(n, 64, [](double th) { return 1.0 + 0.2 * std::cos(th); });
        SphereAxisymField w = mobius_pullback_axisym(v, 1.0, 1);
        for (int j = 0; j <= 64; ++j) CHECK(w[j] == doctest::Approx(v[j]).epsilon(1e-13));
    }
    SUBCASE("round metric is Mobius invariant") {
        SphereAxisymField one(n, 128, [](double) { return 1.0; });
        SphereAxisymField w = mobius_pullback_axisym(one, 3.0, 1);
        double worst = 0;
        for (int j = 0; j <= 128; ++j) {
            Spectrum lam = schouten_sphere_axisym(w, j);
            for (double l : lam) worst = std::max(worst, std::fabs(l - 0.5));
        }
        CHECK(worst < 1e-5);
    }
    SUBCASE("composition: T_{phi o phi'} = T_{phi'} o T_phi on the axis") {
        SphereAxisymField v(n, 256, [](double th) { return 1.0 + 0.1 * std::sin(th) * std::sin(th); });
        SphereAxisymField lhs = mobius_pullback_axisym(v, 2.0 * 1.5, 1); // phi_{P,tt'}
        SphereAxisymField rhs = mobius_pullback_axisym(mobius_pullback_axisym(v, 2.0, 1), 1.5, 1);
        double worst = 0;
        for (int j = 0; j <= 256; ++j) worst = std::max(worst, std::fabs(lhs[j] - rhs[j]));
        CHECK(worst < 1e-7); // interpolation error
    }
    SUBCASE("curvature naturality: sigma_k(A_{T_phi v}) = sigma_k(A_v) o phi") {
        SphereAxisymField v(n, 256, [](double th) { return 1.0 + 0.15 * std::cos(th); });
        const double t = 1.7;
        SphereAxisymField w = mobius_pullback_axisym(v, t, 1);
        std::vector<double> sig_v(257);
        for (int j = 0; j <= 256; ++j) sig_v[j] = sigma(schouten_sphere_axisym(v, j), 2);
        SphereAxisymField sig_v_field(n, 256, sig_v); // container reused for interpolation
        double worst = 0;
        for (int j = 0; j <= 256; ++j) {
            double sig_w = sigma(schouten_sphere_axisym(w, j), 2);
            double want = interp_axisym(sig_v_field, mobius_theta(w.theta(j), t));
            worst = std::max(worst, std::fabs(sig_w - want));
        }
        CHECK(worst < 5e-5); // discretization + interpolation error
    }
}

TEST_CASE("bubble values") {
    double y0[3] = {0.2, -0.1, 0.5};
    CHECK(bubble(y0, y0, 1.0, 3) == doctest::Approx(1.0));
    double z[3] = {1.0, 0.0, 0.0};
    double zero[3] = {0, 0, 0};
    CHECK(bubble(z, zero, 1.0, 3) == doctest::Approx(std::pow(2.0, -0.5)));
    CHECK_THROWS_AS(bubble(z, zero, 0.0, 3), std::domain_error);
}

TEST_CASE("field serialization round trip") {
    BoxGrid g(3, {6, 5, 7}, {-0.3, 0.2, 0.0}, 0.125);
    Rng rng(77);
    std::vector<double> vals(g.size());
    for (double& v : vals) v = rng.uniform(0.5, 2.0);
    GridField f(g, vals);
    save_field(f, "/tmp/sigmak_test_field");
    GridField f2 = load_field("/tmp/sigmak_test_field");
    CHECK(f2.grid().same_layout(g));
    for (std::int64_t i = 0; i < g.size(); ++i) CHECK(f2.values()[i] == f.values()[i]);

    SphereAxisymField v(4, 32, [](double th) { return 1.0 + 0.3 * std::cos(th); });
    save_axisym(v, "/tmp/sigmak_test_axisym");
    SphereAxisymField v2 = load_axisym("/tmp/sigmak_test_axisym");
    CHECK(v2.n() == 4);
    for (int j = 0; j <= 32; ++j) CHECK(v2[j] == v[j]);
    std::remove("/tmp/sigmak_test_field.json");
    std::remove("/tmp/sigmak_test_field.csv");
    std::remove("/tmp/sigmak_test_axisym.json");
    std::remove("/tmp/sigmak_test_axisym.csv");
}
