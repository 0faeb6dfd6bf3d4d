#include "sigmak/util.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace sigmak {

std::vector<double> lu_solve(std::vector<double> A, std::vector<double> b, int m) {
    if ((int)b.size() != m || (int)A.size() != m * m)
        throw std::invalid_argument("lu_solve: shape mismatch");
    std::vector<int> piv(m);
    for (int i = 0; i < m; ++i) piv[i] = i;
    for (int c = 0; c < m; ++c) {
        int p = c;
        double best = std::fabs(A[c * m + c]);
        for (int r = c + 1; r < m; ++r) {
            double v = std::fabs(A[r * m + c]);
            if (v > best) { best = v; p = r; }
        }
        if (best == 0.0) throw NumericError("lu_solve: singular matrix");
        if (p != c) {
            for (int j = 0; j < m; ++j) std::swap(A[p * m + j], A[c * m + j]);
            std::swap(b[p], b[c]);
        }
        double d = A[c * m + c];
        for (int r = c + 1; r < m; ++r) {
            double f = A[r * m + c] / d;
            if (f == 0.0) continue;
            A[r * m + c] = 0.0;
            for (int j = c + 1; j < m; ++j) A[r * m + j] -= f * A[c * m + j];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(m);
    for (int r = m - 1; r >= 0; --r) {
        double s = b[r];
        for (int j = r + 1; j < m; ++j) s -= A[r * m + j] * x[j];
        x[r] = s / A[r * m + r];
    }
    return x;
}

double det_sign(std::vector<double> A, int m) {
    double sign = 1.0;
    for (int c = 0; c < m; ++c) {
        int p = c;
        double best = std::fabs(A[c * m + c]);
        for (int r = c + 1; r < m; ++r) {
            double v = std::fabs(A[r * m + c]);
            if (v > best) { best = v; p = r; }
        }
        if (best == 0.0) return 0.0;
        if (p != c) {
            for (int j = 0; j < m; ++j) std::swap(A[p * m + j], A[c * m + j]);
            sign = -sign;
        }
        if (A[c * m + c] < 0) sign = -sign;
        double d = A[c * m + c];
        for (int r = c + 1; r < m; ++r) {
            double f = A[r * m + c] / d;
            for (int j = c + 1; j < m; ++j) A[r * m + j] -= f * A[c * m + j];
        }
    }
    return sign;
}

int env_threads() {
    const char* s = std::getenv("SIGMAK_THREADS");
    if (!s) return 1;
    int t = std::atoi(s);
    return t < 1 ? 1 : t;
}

void parallel_for(std::int64_t count, const std::function<void(std::int64_t, std::int64_t)>& chunk_fn,
                  int nthreads) {
    if (nthreads == 0) nthreads = env_threads();
    if (nthreads <= 1 || count < 2) {
        chunk_fn(0, count);
        return;
    }
    nthreads = (int)std::min<std::int64_t>(nthreads, count);
    std::vector<std::thread> pool;
    std::int64_t per = (count + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
        std::int64_t lo = t * per, hi = std::min<std::int64_t>(count, lo + per);
        if (lo >= hi) break;
        pool.emplace_back(chunk_fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

} // namespace sigmak
