#include "sigmak/grid.hpp"

#include <cmath>

namespace sigmak {

BoxGrid::BoxGrid(int n_, std::vector<int> shape_, std::vector<double> lo_, double h_)
    : n(n_), shape(std::move(shape_)), lo(std::move(lo_)), h(h_) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("BoxGrid: dimension out of range");
    if ((int)shape.size() != n || (int)lo.size() != n)
        throw std::invalid_argument("BoxGrid: shape/lo size mismatch");
    for (int d : shape)
        if (d < 5) throw std::invalid_argument("BoxGrid: need >= 5 nodes per axis");
    if (!(h > 0)) throw std::invalid_argument("BoxGrid: spacing must be positive");
}

BoxGrid BoxGrid::centered_cube(int n, double w, int N) {
    std::vector<int> shape(n, N);
    std::vector<double> lo(n, -w);
    return BoxGrid(n, std::move(shape), std::move(lo), 2.0 * w / (N - 1));
}

bool BoxGrid::same_layout(const BoxGrid& o) const {
    if (n != o.n || h != o.h || shape != o.shape) return false;
    for (int d = 0; d < n; ++d)
        if (std::fabs(lo[d] - o.lo[d]) > 1e-14 * (1.0 + std::fabs(lo[d]))) return false;
    return true;
}

GridField::GridField(BoxGrid g, std::vector<double> vals) : g_(std::move(g)), v_(std::move(vals)) {
    if ((std::int64_t)v_.size() != g_.size())
        throw std::invalid_argument("GridField: value count does not match grid");
}

GridField::GridField(BoxGrid g, const std::function<double(const double*)>& f) : g_(std::move(g)) {
    v_.resize(g_.size());
    int idx[kMaxDim];
    double x[kMaxDim];
    for (std::int64_t i = 0; i < (std::int64_t)v_.size(); ++i) {
        g_.unflat(i, idx);
        g_.point(idx, x);
        v_[i] = f(x);
    }
}

void GridField::require_positive(const char* what) const {
    for (double v : v_)
        if (!(v > 0)) throw PreconditionError(std::string(what) + ": field values must be positive");
}

namespace {

inline void cubic_weights(double s, double* w) {
    // 4-point Lagrange basis at offsets -1,0,1,2; s in [0,1)
    w[0] = -s * (s - 1.0) * (s - 2.0) / 6.0;
    w[1] = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    w[2] = -(s + 1.0) * s * (s - 2.0) / 2.0;
    w[3] = (s + 1.0) * s * (s - 1.0) / 6.0;
}

double interp_rec(const GridField& f, int axis, int* base, const double* w4, const int* i0) {
    const BoxGrid& g = f.grid();
    if (axis == g.n) return f.value(base);
    double acc = 0;
    for (int a = 0; a < 4; ++a) {
        base[axis] = i0[axis] + a - 1;
        acc += w4[axis * 4 + a] * interp_rec(f, axis + 1, base, w4, i0);
    }
    return acc;
}

} // namespace

double interp_cubic(const GridField& f, const double* x) {
    const BoxGrid& g = f.grid();
    int i0[kMaxDim];
    double w4[kMaxDim * 4];
    for (int d = 0; d < g.n; ++d) {
        double u = (x[d] - g.lo[d]) / g.h;
        int i = (int)std::floor(u);
        if (i < 1) {
            if (u >= 0.0) i = 1; // clamp within first cell, still 4-point
            else throw NumericError("interp_cubic: point outside grid");
        }
        if (i > g.shape[d] - 3) {
            if (u <= g.shape[d] - 1 + 1e-12) i = g.shape[d] - 3;
            else throw NumericError("interp_cubic: point outside grid");
        }
        i0[d] = i;
        cubic_weights(u - i, w4 + d * 4);
    }
    int base[kMaxDim];
    return interp_rec(f, 0, base, w4, i0);
}

} // namespace sigmak
