#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigmak {

// Error taxonomy shared across modules. Precondition-style failures (cone
// exit, degenerate data, bad stencil location) map to CLI exit code 2,
// convergence failures to exit code 3.
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConeError : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct StencilError : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct NondegeneracyViolation : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct BoundaryZeroError : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct DegenerateZeroError : PreconditionError {
    using PreconditionError::PreconditionError;
};
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return std::round(r);
}

// surface area of the unit m-sphere S^m embedded in R^{m+1}
inline double sphere_area(int m) {
    return 2.0 * std::pow(M_PI, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

// rising factorial x^(j) = x(x+1)...(x+j-1)
inline double rising(double x, int j) {
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= (x + i);
    return r;
}

// Solve A x = b in place by partial-pivot Gaussian elimination; A is dense
// row-major m x m. Throws NumericError on (near-)singular pivots.
std::vector<double> lu_solve(std::vector<double> A, std::vector<double> b, int m);

double det_sign(std::vector<double> A, int m); // +1/-1/0 via LU

// Deterministic parallel map over [0,count): chunks are fixed per thread
// count, results combined in chunk order by the caller if needed.
// nthreads <= 1 runs inline. Reads SIGMAK_THREADS when nthreads == 0.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t, std::int64_t)>& chunk_fn,
                  int nthreads = 0);

int env_threads();

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(gen);
    }
    double normal(double mu = 0.0, double sd = 1.0) {
        return std::normal_distribution<double>(mu, sd)(gen);
    }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); }
};

} // namespace sigmak
