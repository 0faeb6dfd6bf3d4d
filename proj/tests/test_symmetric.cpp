#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sigmak/symmetric.hpp"
#include "sigmak/util.hpp"

using namespace sigmak;

namespace {

// independent oracle: direct enumeration of k-subsets
double sigma_bruteforce(const Spectrum& lam, int k) {
    const int n = (int)lam.size();
    double total = 0;
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    for (;;) {
        double prod = 1;
        for (int i = 0; i < k; ++i) prod *= lam[pick[i]];
        total += prod;
        int i = k - 1;
        while (i >= 0 && pick[i] == n - k + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return total;
}

SymMat random_sym(Rng& rng, int n, double scale = 1.0) {
    SymMat A(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) A.set(i, j, scale * rng.normal());
    return A;
}

SymMat from_spectrum(Rng& rng, const Spectrum& lam) {
    const int n = (int)lam.size();
    // random rotation via a handful of Givens rotations
    SymMat A(n);
    for (int i = 0; i < n; ++i) A.set(i, i, lam[i]);
    std::vector<double> Q(n * n, 0.0);
    for (int i = 0; i < n; ++i) Q[i * n + i] = 1.0;
    for (int rep = 0; rep < 3 * n; ++rep) {
        int p = rng.integer(0, n - 2);
        int q = rng.integer(p + 1, n - 1);
        double ang = rng.uniform(0, 2 * M_PI), c = std::cos(ang), s = std::sin(ang);
        for (int i = 0; i < n; ++i) {
            double qp = Q[i * n + p], qq = Q[i * n + q];
            Q[i * n + p] = c * qp - s * qq;
            Q[i * n + q] = s * qp + c * qq;
        }
    }
    SymMat B(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0;
            for (int m = 0; m < n; ++m) s += Q[i * n + m] * lam[m] * Q[j * n + m];
            B.set(i, j, s);
        }
    return B;
}

} // namespace

TEST_CASE("sigma on simple spectra") {
    CHECK(sigma({1, 1, 1, 1}, 2) == doctest::Approx(6.0).epsilon(1e-15));
    for (int n = 3; n <= 8; ++n)
        for (int k = 1; k <= n; ++k) {
            Spectrum lam(n, 0.5);
            CHECK(sigma(lam, k) ==
                  doctest::Approx(std::pow(2.0, -k) * binomial(n, k)).epsilon(1e-14));
        }
    CHECK_THROWS_AS(sigma({1, 2, 3}, 0), std::domain_error);
    CHECK_THROWS_AS(sigma({1, 2, 3}, 4), std::domain_error);
}

TEST_CASE("sigma matches subset enumeration") {
    Rng rng(42);
    for (int rep = 0; rep < 50; ++rep) {
        Spectrum lam(6);
        for (double& v : lam) v = rng.uniform(-2, 2);
        for (int k = 1; k <= 6; ++k) {
            double want = sigma_bruteforce(lam, k);
            double got = sigma(lam, k);
            CHECK(std::fabs(got - want) <= 1e-12 * std::max(1.0, std::fabs(want)));
        }
    }
}

TEST_CASE("gamma_k membership") {
    CHECK(in_gamma_k({2, 2, 2, 2}, 4));
    CHECK_FALSE(in_gamma_k({-1, -1, -1}, 1));
    Spectrum lam{3, 3, 3, -1};
    CHECK(in_gamma_k(lam, 2));       // sigma_1 = 8, sigma_2 = 18
    CHECK_FALSE(in_gamma_k(lam, 3)); // sigma_3 = 0: boundary is outside the open cone

    SUBCASE("monotone in k") {
        Rng rng(7);
        for (int rep = 0; rep < 200; ++rep) {
            Spectrum l(5);
            for (double& v : l) v = rng.uniform(-1, 2);
            for (int k = 5; k >= 2; --k)
                if (in_gamma_k(l, k))
                    for (int j = 1; j < k; ++j) CHECK(in_gamma_k(l, j));
        }
    }
}

TEST_CASE("newton tensor basics") {
    Rng rng(3);
    SymMat F = random_sym(rng, 4);
    SymMat T0 = newton_tensor(F, 0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(T0(i, j) == (i == j ? 1.0 : 0.0));

    SymMat D(2);
    D.set(0, 0, 1.0);
    D.set(1, 1, 2.0);
    SymMat T1 = newton_tensor(D, 1);
    CHECK(T1(0, 0) == doctest::Approx(2.0));
    CHECK(T1(1, 1) == doctest::Approx(1.0));
    CHECK(T1(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("newton tensor trace identity") {
    Rng rng(11);
    for (int rep = 0; rep < 100; ++rep) {
        SymMat F = random_sym(rng, 5);
        Spectrum lam = eigenvalues_sym(F);
        for (int l = 0; l <= 4; ++l) {
            double tr = newton_tensor(F, l).trace();
            double want = (5 - l) * (l == 0 ? 1.0 : sigma(lam, l));
            CHECK(std::fabs(tr - want) <= 1e-11 * std::max(1.0, std::fabs(want)));
        }
    }
}

TEST_CASE("newton tensor positive semidefinite on the closed cone") {
    Rng rng(13);
    int tested = 0;
    for (int rep = 0; rep < 400 && tested < 60; ++rep) {
        Spectrum lam(5);
        for (double& v : lam) v = rng.uniform(-0.4, 1.4);
        for (int l = 0; l + 1 <= 5; ++l) {
            bool closed = true;
            auto e = sigma_all(lam);
            for (int j = 1; j <= l + 1; ++j) closed &= e[j] >= 0;
            if (!closed) continue;
            SymMat F = from_spectrum(rng, lam);
            auto ev = eigenvalues_sym(newton_tensor(F, l));
            CHECK(ev.front() >= -1e-10);
            ++tested;
        }
    }
    CHECK(tested >= 60);
}

TEST_CASE("sigma_of_matrix") {
    SymMat A = SymMat::identity(4) * 0.5;
    CHECK(sigma_of_matrix(A, 2) == doctest::Approx(1.5).epsilon(1e-14));
    SymMat B = SymMat::identity(4) * 2.0;
    CHECK(sigma_of_matrix(B, 2) == doctest::Approx(24.0).epsilon(1e-14));

    Rng rng(5);
    for (int rep = 0; rep < 40; ++rep) {
        Spectrum lam(5);
        for (double& v : lam) v = rng.uniform(-2, 2);
        SymMat M = from_spectrum(rng, lam);
        for (int k = 1; k <= 5; ++k) {
            double want = sigma(lam, k);
            CHECK(std::fabs(sigma_of_matrix(M, k) - want) <=
                  1e-12 * std::max(1.0, std::fabs(want)) + 1e-12);
        }
    }
}

TEST_CASE("dsigma_dA equals T_{k-1} and matches finite differences") {
    SymMat I3 = dsigma_dA(SymMat::identity(3), 1);
    for (int i = 0; i < 3; ++i) CHECK(I3(i, i) == doctest::Approx(1.0));

    SymMat D(2);
    D.set(0, 0, 1.0);
    D.set(1, 1, 2.0);
    SymMat G = dsigma_dA(D, 2);
    CHECK(G(0, 0) == doctest::Approx(2.0));
    CHECK(G(1, 1) == doctest::Approx(1.0));

    Rng rng(17);
    SymMat A = random_sym(rng, 4);
    SymMat dS = dsigma_dA(A, 2);
    const double step = 1e-5;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            SymMat Ap = A, Am = A;
            Ap.add(i, j, step);
            Am.add(i, j, -step);
            double fd = (sigma_of_matrix(Ap, 2) - sigma_of_matrix(Am, 2)) / (2 * step);
            // off-diagonal perturbations hit both symmetric slots
            double want = (i == j) ? dS(i, i) : 2.0 * dS(i, j);
            CHECK(std::fabs(fd - want) <= 1e-6 * std::max(1.0, std::fabs(want)));
        }
}

TEST_CASE("jacobi eigensolver recovers planted spectra") {
    Rng rng(23);
    for (int rep = 0; rep < 30; ++rep) {
        Spectrum lam(6);
        for (double& v : lam) v = rng.uniform(-3, 3);
        std::sort(lam.begin(), lam.end());
        SymMat M = from_spectrum(rng, lam);
        Spectrum got = eigenvalues_sym(M);
        for (int i = 0; i < 6; ++i) CHECK(got[i] == doctest::Approx(lam[i]).epsilon(1e-11));
    }
    SUBCASE("eigenvectors") {
        SymMat M = random_sym(rng, 5);
        auto es = eigen_sym(M);
        for (int r = 0; r < 5; ++r) {
            // M v = lambda v
            for (int i = 0; i < 5; ++i) {
                double mv = 0;
                for (int j = 0; j < 5; ++j) mv += M(i, j) * es.vecs[r][j];
                CHECK(mv == doctest::Approx(es.values[r] * es.vecs[r][i]).epsilon(1e-9).scale(1.0));
            }
        }
    }
}
