#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sigmak/degree.hpp"

using namespace sigmak;

namespace {

// Independent local-degree oracle for grad K at an isolated critical point:
// Brouwer degree of the chart representation of the tangent gradient field
// over a small ball, via the generic multistart machinery.
int local_grad_degree(const KFunction& K, const std::vector<double>& x0, double rho) {
    const int n = K.n();
    const int d = n + 1;
    auto frame = frame_with_last_axis(x0);
    VecMap chart = [&](const std::vector<double>& z) {
        std::vector<double> x(d);
        for (int i = 0; i < d; ++i) {
            double s = x0[i];
            for (int a = 0; a < n; ++a) s += frame[i * d + a] * z[a];
            x[i] = s;
        }
        double nr = 0;
        for (double v : x) nr += v * v;
        nr = std::sqrt(nr);
        for (double& v : x) v /= nr;
        auto g = K.sphere_grad(x);
        std::vector<double> out(n);
        for (int a = 0; a < n; ++a) {
            double s = 0;
            for (int i = 0; i < d; ++i) s += frame[i * d + a] * g[i];
            out[a] = s;
        }
        return out;
    };
    BrouwerOptions opts;
    opts.random_starts = 8;
    return brouwer_degree(chart, n, rho, {std::vector<double>(n, 0.0)}, opts).degree;
}

} // namespace

TEST_CASE("critical points of 2 + x_{n+1}") {
    const int n = 3;
    KFunction K = KFunction::parse("2 + x4", n);
    auto recs = find_critical_points(K);
    REQUIRE(recs.size() == 2);
    const auto& north = recs[0].x[3] > 0 ? recs[0] : recs[1];
    const auto& south = recs[0].x[3] > 0 ? recs[1] : recs[0];
    CHECK(north.x[3] == doctest::Approx(1.0));
    CHECK(south.x[3] == doctest::Approx(-1.0));
    for (const auto& r : recs) CHECK(r.grad_norm < 1e-10);
    CHECK(north.laplacian == doctest::Approx(-double(n)).epsilon(1e-10));
    CHECK(north.minus_class);
    CHECK(north.morse_index == n);
    CHECK(south.laplacian == doctest::Approx(double(n)).epsilon(1e-10));
    CHECK_FALSE(south.minus_class);
    CHECK(south.morse_index == 0);
    CHECK(deg_crit_minus(recs) == -1); // (-1)^n at n = 3
    CHECK_FALSE(existence_criterion(deg_crit_minus(recs), n));
}

TEST_CASE("critical points of a diagonal quadric") {
    const int n = 3;
    KFunction K = KFunction::parse("2 + x1^2 + 2*x2^2 + 3*x3^2 + 4*x4^2", n);
    auto recs = find_critical_points(K);
    REQUIRE(recs.size() == 8); // +-e_i
    int minus_count = 0;
    for (const auto& r : recs) {
        int axis = -1;
        for (int i = 0; i < 4; ++i)
            if (std::fabs(std::fabs(r.x[i]) - 1.0) < 1e-8) axis = i;
        REQUIRE(axis >= 0);
        double c[4] = {1, 2, 3, 4};
        int want_index = 0;
        for (int j = 0; j < 4; ++j)
            if (j != axis && c[j] < c[axis]) ++want_index;
        CHECK(r.morse_index == want_index);
        double S = 10.0;
        CHECK(r.minus_class == (c[axis] > S / 4.0));
        if (r.minus_class) ++minus_count;
    }
    CHECK(minus_count == 4); // +-e3, +-e4
    CHECK(deg_crit_minus(recs) == 0);
    CHECK(existence_criterion(0, n));
    CHECK(morse_euler_sum(recs) == 1 + ((n % 2 == 0) ? 1 : -1));
}

TEST_CASE("constant K violates nondegeneracy") {
    CHECK_THROWS_AS(find_critical_points(KFunction::parse("3", 3)), NondegeneracyViolation);
}

TEST_CASE("deg_crit_minus invariances") {
    const int n = 3;
    auto d1 = deg_crit_minus(find_critical_points(KFunction::parse("2 + x4 + 0.5*x1", n)));
    auto d2 = deg_crit_minus(
        find_critical_points(KFunction::parse("7 + 3*(2 + x4 + 0.5*x1)", n)));
    CHECK(d1 == d2); // aK + b with a > 0 preserves the critical structure
}

TEST_CASE("deg_crit_minus matches the sign-of-determinant oracle") {
    const int n = 3;
    for (const char* expr :
         {"2 + x4", "2 + x1^2 + 2*x2^2 + 3*x3^2 + 4*x4^2", "2 + x4 + 0.5*x1"}) {
        KFunction K = KFunction::parse(expr, n);
        auto recs = find_critical_points(K);
        int from_records = deg_crit_minus(recs);
        int from_oracle = 0;
        for (const auto& r : recs)
            if (r.minus_class) from_oracle += local_grad_degree(K, r.x, 0.15);
        CHECK(from_records == from_oracle);
    }
}

TEST_CASE("brouwer degree basics") {
    SUBCASE("identity and antipodal maps") {
        VecMap id = [](const std::vector<double>& x) { return x; };
        CHECK(brouwer_degree(id, 4, 0.5).degree == 1);
        CHECK(brouwer_degree(id, 5, 0.9).degree == 1);
        VecMap neg = [](const std::vector<double>& x) {
            auto y = x;
            for (double& v : y) v = -v;
            return y;
        };
        CHECK(brouwer_degree(neg, 5, 0.6).degree == -1); // (-1)^5
        CHECK(brouwer_degree(neg, 4, 0.6).degree == 1);
    }
    SUBCASE("boundary zero detected") {
        // vanishes on the whole sphere |x| = 0.5: any boundary sample hits it
        VecMap ring = [](const std::vector<double>& x) {
            double r2 = 0;
            for (double v : x) r2 += v * v;
            auto y = x;
            for (double& v : y) v *= (r2 - 0.25);
            return y;
        };
        CHECK_THROWS_AS(brouwer_degree(ring, 3, 0.5), BoundaryZeroError);
        VecMap shift = [](const std::vector<double>& x) {
            auto y = x;
            y[0] -= 0.5;
            return y;
        };
        CHECK(brouwer_degree(shift, 3, 0.8).degree == 1);
    }
    SUBCASE("degenerate zero detected") {
        // Newton converges to the origin where det J = 1e-10 < det_tol
        VecMap flat = [](const std::vector<double>& x) {
            return std::vector<double>{x[0] - x[1] * x[1], 1e-10 * x[1]};
        };
        CHECK_THROWS_AS(brouwer_degree(flat, 2, 0.4), DegenerateZeroError);
    }
    SUBCASE("two-zero map with canceling signs") {
        // f(x) = (x0^2 - 0.25, x1): zeros at (+-0.5, 0) with opposite Jacobian signs
        VecMap f = [](const std::vector<double>& x) {
            return std::vector<double>{x[0] * x[0] - 0.25, x[1]};
        };
        auto res = brouwer_degree(f, 2, 0.8);
        CHECK(res.zeros.size() == 2);
        CHECK(res.degree == 0);
    }
}

TEST_CASE("G of xi") {
    const int n = 3;
    SUBCASE("constant K integrates x to zero") {
        KFunction K = KFunction::parse("5", n);
        auto G = G_of_xi(K, {0.3, 0.0, 0.0, 0.2});
        for (double g : G) CHECK(std::fabs(g) < 1e-10);
    }
    SUBCASE("xi = 0 with K = 2 + x_{n+1}") {
        KFunction K = KFunction::parse("2 + x4", n);
        auto G = G_of_xi(K, std::vector<double>(4, 0.0));
        double area = sphere_area(n);
        for (int i = 0; i < n; ++i) CHECK(std::fabs(G[i]) < 1e-10);
        CHECK(G[n] == doctest::Approx(area / (n + 1)).epsilon(1e-10));
    }
    SUBCASE("radial sweep toward the boundary: G shrinks but stays nonzero") {
        KFunction K = KFunction::parse("2 + x4", n);
        double prev = 1e300;
        for (double s : {0.5, 0.7, 0.85}) {
            auto G = G_of_xi(K, {0.0, 0.0, 0.0, s});
            double norm = 0;
            for (double g : G) norm += g * g;
            norm = std::sqrt(norm);
            CHECK(norm > 1e-6);
            CHECK(norm < prev);
            prev = norm;
        }
    }
}

TEST_CASE("degree identity of the reduced map (n = 3)") {
    const int n = 3;
    // deg(G, B_s, 0) = -(-1)^n + deg(grad K, Crit_-)
    struct Case {
        const char* expr;
        int expected_deg_minus;
    };
    for (const Case& c : {Case{"2 + x4", -1}, Case{"2 + x1^2 + 2*x2^2 + 3*x3^2 + 4*x4^2", 0}}) {
        KFunction K = KFunction::parse(c.expr, n);
        DegreeAnalysis an = analyze_K(K, {0.5, 0.7});
        CHECK(an.deg_minus == c.expected_deg_minus);
        CHECK(an.s_scan_consistent);
        for (auto& [s, d] : an.degG_by_s) CHECK(d == 1 + an.deg_minus); // -(-1)^3 = 1
        if (an.morse) CHECK(an.euler_sum == 0); // chi(S^3)
    }
}
